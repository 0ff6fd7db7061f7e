"""Checkpoint loading and inference on UBF channel cubes."""

from __future__ import annotations

import numpy as np
import torch

from .errors import DimsIncompatible
from .network import NetworkConfig, build_network, forward_padded
from .ubf import ubf_read, ubf_write

# metadata copied through so downstream metrics keep their pixel geometry
_GRID_KEYS = ("grid_x0_m", "grid_dx_m", "grid_z0_m", "grid_dz_m")


def load_checkpoint(path):
    blob = torch.load(path, map_location="cpu", weights_only=True)
    config = NetworkConfig.from_dict(blob["config"])
    model = build_network(config)
    model.load_state_dict(blob["model"])
    model.eval()
    return model


def infer_array(model, channels: np.ndarray) -> np.ndarray:
    """Aligned channel stack (C, H, W) -> envelope image (H, W) in [0, 1]."""
    if channels.ndim != 3:
        raise DimsIncompatible(f"expected 3-D input, got {channels.ndim}-D")
    if channels.shape[0] != model.config.in_channels:
        raise DimsIncompatible(
            f"checkpoint expects {model.config.in_channels} channels, "
            f"input has {channels.shape[0]}"
        )
    x = torch.as_tensor(np.array(channels, dtype=np.float32, copy=True))
    with torch.no_grad():
        y = forward_padded(model, x)
    return np.clip(y.numpy(), 0.0, 1.0)


def infer_file(checkpoint_path, in_path, out_path):
    model = load_checkpoint(checkpoint_path)
    arr, meta = ubf_read(in_path)
    out = infer_array(model, np.asarray(arr))
    out_meta = {"kind": "envelope", "method": "neural"}
    for key in _GRID_KEYS:
        if key in meta:
            out_meta[key] = meta[key]
    ubf_write(out_path, out.astype(np.float32), out_meta)
    return out
