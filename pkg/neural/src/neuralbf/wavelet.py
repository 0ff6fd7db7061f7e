"""Orthogonal 2-D discrete wavelet transform used by the network's
down/upsampling layers.

Filters are the 8-tap Daubechies family member with 4 vanishing moments. The
transform is periodized (circular extension), which is what makes synthesis
an exact inverse of analysis at the borders; subbands are exactly half the
input size per axis, so a decimation level is invertible with no bookkeeping.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

from .errors import OddDims

# lowpass decomposition taps for 4 vanishing moments (sum = sqrt(2))
DB4_LOWPASS = (
    -0.010597401784997278,
    0.032883011666982945,
    0.030841381835986965,
    -0.18703481171888114,
    -0.02798376941698385,
    0.6308807679295904,
    0.7148465705525415,
    0.23037781330885523,
)


def _filter_bank(dtype, device):
    h = torch.tensor(DB4_LOWPASS, dtype=dtype, device=device)
    sign = torch.tensor([1.0, -1.0], dtype=dtype, device=device).repeat(4)
    g = sign * h.flip(0)  # quadrature mirror: g[n] = (-1)^n h[L-1-n]
    return torch.stack([h, g]).unsqueeze(1)  # (2, 1, L)


def _split_last(x: torch.Tensor, bank: torch.Tensor):
    """One analysis step along the last axis -> (lowpass, highpass)."""
    L = bank.shape[-1]
    *lead, n = x.shape
    if n % 2:
        raise OddDims(f"axis length {n} is odd; wavelet step needs even dims")
    xr = x.reshape(-1, 1, n)
    # circular extension; short axes may need to wrap more than once
    reps = -(-(L - 2) // n)
    xp = torch.cat([xr] + [xr] * reps, dim=-1)[..., : n + L - 2]
    out = F.conv1d(xp, bank, stride=2)
    return (out[:, 0].reshape(*lead, n // 2),
            out[:, 1].reshape(*lead, n // 2))


def _merge_last(lo: torch.Tensor, hi: torch.Tensor, bank: torch.Tensor):
    """Inverse of _split_last; exact for the orthogonal bank."""
    L = bank.shape[-1]
    *lead, m = lo.shape
    n = 2 * m
    pair = torch.stack([lo.reshape(-1, m), hi.reshape(-1, m)], dim=1)
    out = F.conv_transpose1d(pair, bank, stride=2).squeeze(1)  # (-1, n+L-2)
    res = out[..., :n].clone()
    # fold the circular overhang back, chunk by chunk for short axes
    for start in range(n, n + L - 2, n):
        seg = out[..., start:start + n]
        res[..., : seg.shape[-1]] += seg
    return res.reshape(*lead, n)


def dwt2(x: torch.Tensor):
    """Single-level 2-D analysis of a (..., H, W) stack.

    Returns (ll, lh, hl, hh), each (..., H/2, W/2). Requires even H and W.
    Internals run in float64 so an analysis/synthesis round trip stays well
    below 1e-6 even for float32 inputs.
    """
    in_dtype = x.dtype
    if in_dtype == torch.float32:
        x = x.double()
    bank = _filter_bank(x.dtype, x.device)
    lo_w, hi_w = _split_last(x, bank)
    ll, lh = (t.transpose(-1, -2) for t in
              _split_last(lo_w.transpose(-1, -2), bank))
    hl, hh = (t.transpose(-1, -2) for t in
              _split_last(hi_w.transpose(-1, -2), bank))
    return tuple(t.to(in_dtype) for t in (ll, lh, hl, hh))


def idwt2(ll, lh, hl, hh):
    """Single-level 2-D synthesis; exact inverse of dwt2."""
    in_dtype = ll.dtype
    if in_dtype == torch.float32:
        ll, lh, hl, hh = (t.double() for t in (ll, lh, hl, hh))
    bank = _filter_bank(ll.dtype, ll.device)
    lo_w = _merge_last(ll.transpose(-1, -2), lh.transpose(-1, -2),
                       bank).transpose(-1, -2)
    hi_w = _merge_last(hl.transpose(-1, -2), hh.transpose(-1, -2),
                       bank).transpose(-1, -2)
    return _merge_last(lo_w, hi_w, bank).to(in_dtype)
