"""Wavelet U-Net mapping an aligned RF channel stack to an envelope image.

Down/upsampling is done with the orthogonal wavelet transform instead of
pooling: the encoder keeps only the approximation band, while the three
detail bands are carried unchanged to the matching decoder stage and used
directly in the synthesis step. No image content is discarded on the way
down, which is the point of the construction.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn

from .errors import IndivisibleSpatialDims
from .wavelet import dwt2, idwt2


@dataclass(frozen=True)
class NetworkConfig:
    in_channels: int = 128
    levels: int = 4
    base_filters: int = 32
    max_filters: int = 128
    kernel_size: int = 3
    param_budget: float = 1.5e6

    def __post_init__(self):
        if self.in_channels < 1 or self.levels < 1 or self.base_filters < 1:
            raise ValueError("in_channels, levels, base_filters must be >= 1")
        if self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be odd")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkConfig":
        return cls(**d)


def _cbr(cin, cout, k):
    """conv -> batch norm -> rectified linear, the unit block everywhere."""
    return nn.Sequential(
        nn.Conv2d(cin, cout, k, padding=k // 2),
        nn.BatchNorm2d(cout),
        nn.ReLU(inplace=True),
    )


class WaveletUNet(nn.Module):
    def __init__(self, config: NetworkConfig):
        super().__init__()
        self.config = config
        k = config.kernel_size
        f = config.base_filters
        self.levels = config.levels

        # three stem convolutions; the first carries double the filters
        self.head1 = _cbr(config.in_channels, 2 * f, k)
        self.head2 = _cbr(2 * f, f, k)
        self.head3 = _cbr(f, f, k)

        chans = [f]
        for _ in range(config.levels):
            chans.append(min(2 * chans[-1], config.max_filters))
        self.channels = chans

        self.enc = nn.ModuleList(
            nn.Sequential(_cbr(chans[i], chans[i + 1], k),
                          _cbr(chans[i + 1], chans[i + 1], k))
            for i in range(config.levels)
        )
        self.dec = nn.ModuleList(
            nn.Sequential(_cbr(chans[i + 1], chans[i], k),
                          _cbr(chans[i], chans[i], k))
            for i in range(config.levels)
        )
        self.tail = nn.Conv2d(f, 1, k, padding=k // 2)
        # start predictions at the middle of the output range; with mostly
        # dark targets this also keeps the initial loss well off its floor
        nn.init.constant_(self.tail.bias, 3.0)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        squeeze = x.ndim == 3
        if squeeze:
            x = x.unsqueeze(0)
        h, w = x.shape[-2:]
        m = 2 ** self.levels
        if h % m or w % m:
            raise IndivisibleSpatialDims(
                f"spatial dims ({h}, {w}) must be divisible by {m}"
            )
        x = self.head1(x)
        x = self.head2(x)
        x = self.head3(x) + x  # residual over the stem

        details = []
        for stage in self.enc:
            ll, lh, hl, hh = dwt2(x)
            details.append((lh, hl, hh))
            x = stage(ll)
        for stage, bands in zip(reversed(self.dec), reversed(details)):
            x = stage(x)
            x = idwt2(x, *bands)

        out = torch.clamp(self.tail(x), 0.0, 6.0) / 6.0  # maps into [0, 1]
        out = out.squeeze(1)
        return out.squeeze(0) if squeeze else out


def build_network(config: NetworkConfig) -> WaveletUNet:
    return WaveletUNet(config)


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters() if p.requires_grad)


def forward_padded(model: WaveletUNet, x: torch.Tensor) -> torch.Tensor:
    """Run the model on arbitrary spatial dims: pad up to the divisibility
    the wavelet pyramid needs, then crop the output back."""
    h, w = x.shape[-2:]
    m = 2 ** model.levels
    ph, pw = (-h) % m, (-w) % m
    if ph or pw:
        x = torch.nn.functional.pad(x, (0, pw, 0, ph), mode="replicate")
    y = model(x)
    return y[..., :h, :w]
