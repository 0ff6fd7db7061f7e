"""DAS, coherent plane-wave compounding, and minimum-variance beamforming.

All beamformers consume PixelAlignedRF (delay-aligned channel data) so the
geometry handling lives in one place. Summation over elements is always in
ascending element index, which makes outputs bit-identical regardless of the
storage layout of the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BeamformedRF, PixelAlignedRF, ProbeGeometry
from .errors import EmptyAngleList, GridMismatch, SingularCovariance
from .geometry import aperture_for_depth

WINDOW_KINDS = ("boxcar", "hann", "hamming")


@dataclass(frozen=True)
class ApodizationSpec:
    window_kind: str = "boxcar"
    fnum: float = 1.75

    def __post_init__(self):
        if self.window_kind not in WINDOW_KINDS:
            raise ValueError(f"unknown window kind {self.window_kind!r}")
        if self.fnum <= 0:
            raise ValueError("fnum must be > 0")


@dataclass(frozen=True)
class MvConfig:
    """Minimum-variance settings.

    subaperture_len None means per-pixel auto (see _subaperture_len).
    diagonal_loading is the fraction of trace(R)/L added to the diagonal;
    None means the 1/(100*L) default.
    """

    subaperture_len: int | None = None
    diagonal_loading: float | None = None
    use_forward_backward: bool = False

    def __post_init__(self):
        if self.subaperture_len is not None and self.subaperture_len < 1:
            raise ValueError("subaperture_len must be >= 1")
        if self.diagonal_loading is not None and self.diagonal_loading < 0:
            raise ValueError("diagonal_loading must be >= 0")


def _window_weights(kind, element_x, pixel_x, half_width):
    """Apodization weights for elements inside the aperture, zero outside.

    The window is evaluated on the normalized offset u = (x_i - x_px)/half in
    [-1, 1], so it adapts smoothly to the depth-dependent aperture.
    """
    u = (element_x - pixel_x) / half_width
    inside = np.abs(u) <= 1.0
    if kind == "boxcar":
        w = inside.astype(float)
    elif kind == "hann":
        w = np.where(inside, 0.5 * (1.0 + np.cos(np.pi * u)), 0.0)
    else:  # hamming
        w = np.where(inside, 0.54 + 0.46 * np.cos(np.pi * u), 0.0)
    return w


def das(aligned: PixelAlignedRF, apod: ApodizationSpec,
        geometry: ProbeGeometry) -> BeamformedRF:
    """Delay-and-sum: S(x,z) = sum_i w_i(x,z) R_i(x,z).

    Weights come from the chosen window over the f-number aperture and are
    normalized to unit sum per pixel, so brightness is depth-independent.
    """
    grid = aligned.grid
    pos = geometry.element_positions_m
    out = np.zeros((grid.nz, grid.nx))
    px = grid.x_coords_m
    for iz, z in enumerate(grid.z_coords_m):
        half = 0.5 * z / apod.fnum
        # (elements, nx) weights for this depth row
        w = _window_weights(apod.window_kind, pos[:, None], px[None, :], half)
        empty = w.sum(axis=0) == 0
        if np.any(empty):
            # aperture floor: fall back to the closest element
            closest = np.argmin(np.abs(pos[:, None] - px[None, :]), axis=0)
            for ix in np.flatnonzero(empty):
                w[closest[ix], ix] = 1.0
        w /= w.sum(axis=0, keepdims=True)
        row = np.zeros(grid.nx)
        for i in range(geometry.element_count):  # fixed ascending order
            row += w[i] * aligned.aligned[i, iz, :]
        out[iz] = row
    return BeamformedRF(out, grid)


def cpwc(beamformed_per_angle) -> BeamformedRF:
    """Coherent plane-wave compounding: pixel-wise mean of per-angle RF,
    summed before envelope detection."""
    frames = list(beamformed_per_angle)
    if not frames:
        raise EmptyAngleList("cpwc requires at least one beamformed frame")
    grid = frames[0].grid
    for f in frames[1:]:
        if not grid.same_shape(f.grid):
            raise GridMismatch("cpwc inputs must share one grid")
    if len(frames) == 1:
        return frames[0]
    acc = np.zeros_like(frames[0].values)
    for f in frames:
        acc += f.values
    return BeamformedRF(acc / len(frames), grid)


def mv_weights(snapshots: np.ndarray, config: MvConfig) -> np.ndarray:
    """Capon weights for pre-aligned data (steering vector = ones).

    snapshots: (L, K) matrix of K spatial-smoothing windows. Returns w with
    w = R^-1 a / (a^T R^-1 a), R the smoothed sample covariance plus diagonal
    loading delta * trace(R)/L.
    """
    snaps = np.atleast_2d(np.asarray(snapshots, dtype=float))
    L, K = snaps.shape
    if L == 1:
        return np.ones(1)
    R = snaps @ snaps.T / K
    if config.use_forward_backward:
        R = 0.5 * (R + R[::-1, ::-1])
    if np.trace(R) == 0.0:
        # all-zero snapshots: any distortionless weights give 0 output
        return np.ones(L) / L
    delta = (config.diagonal_loading if config.diagonal_loading is not None
             else 1.0 / (100.0 * L))
    if delta > 0:
        R = R + (delta * np.trace(R) / L) * np.eye(L)
    a = np.ones(L)
    try:
        Rinv_a = np.linalg.solve(R, a)
    except np.linalg.LinAlgError:
        raise SingularCovariance(
            "covariance is singular; enable diagonal loading"
        ) from None
    denom = a @ Rinv_a
    if not np.isfinite(denom) or abs(denom) < 1e-300:
        raise SingularCovariance("covariance is singular; enable diagonal loading")
    return Rinv_a / denom


def _subaperture_len(config: MvConfig, aperture_len: int) -> int:
    if config.subaperture_len is not None:
        return min(config.subaperture_len, aperture_len)
    return max(1, aperture_len // 4)


def mv_beamform(aligned: PixelAlignedRF, config: MvConfig,
                geometry: ProbeGeometry, fnum: float = 1.75) -> BeamformedRF:
    """Per-pixel minimum-variance beamforming with spatial smoothing.

    For each pixel the active f-number aperture of M aligned samples is split
    into K = M - L + 1 sliding windows of length L; the Capon weights from the
    smoothed covariance are applied to the mean window.
    """
    grid = aligned.grid
    out = np.empty((grid.nz, grid.nx))
    for iz, z in enumerate(grid.z_coords_m):
        for ix, x in enumerate(grid.x_coords_m):
            first, last = aperture_for_depth(z, x, fnum, geometry)
            samples = aligned.aligned[first:last + 1, iz, ix]
            M = samples.size
            L = _subaperture_len(config, M)
            K = M - L + 1
            snaps = np.lib.stride_tricks.sliding_window_view(samples, L).T
            w = mv_weights(snaps, config)
            out[iz, ix] = float(w @ snaps.mean(axis=1))
    return BeamformedRF(out, grid)
