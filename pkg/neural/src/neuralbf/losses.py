"""Training objectives, from coarse to fine.

The fractional-power losses penalize small residuals much harder than MSE
does, which sharpens fine detail once the easy structure is learned. Their
raw form |r|^p has an unbounded gradient at zero, so (r^2 + eps)^(p/2) is
used instead with eps = 1e-8.
"""

from __future__ import annotations

import torch

from .errors import ShapeMismatch

EPS = 1e-8
LOSS_KINDS = ("mse", "mae", "l0.4", "l0.2")


def curriculum_loss(prediction: torch.Tensor, target: torch.Tensor,
                    kind: str) -> torch.Tensor:
    if prediction.shape != target.shape:
        raise ShapeMismatch(
            f"prediction {tuple(prediction.shape)} vs target "
            f"{tuple(target.shape)}"
        )
    r = prediction - target
    if kind == "mse":
        return (r * r).mean()
    if kind == "mae":
        return r.abs().mean()
    if kind in ("l0.4", "l0.2"):
        p = float(kind[1:])
        return ((r * r + EPS) ** (p / 2)).mean()
    raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")
