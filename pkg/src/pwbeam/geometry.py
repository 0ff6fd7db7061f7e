"""Plane-wave propagation geometry: transmit/receive distances, two-way
delays, channel-to-pixel alignment, and the f-number driven dynamic aperture.

Time zero is the instant the plane wave crosses the origin (x=0, z=0); the
simulator uses the same convention, so no lens or offset corrections appear
anywhere.
"""

from __future__ import annotations

import os

import numpy as np

from .core import (
    AcquisitionParams,
    ChannelDataCube,
    ImageGrid,
    PixelAlignedRF,
    ProbeGeometry,
)
from .errors import GridOutsideRecording, NonPositiveDepth


def tx_distance(x, z, alpha):
    """Distance from the plane-wave origin to (x, z): z*cos(a) + x*sin(a)."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise NonPositiveDepth("tx_distance requires z > 0")
    return z * np.cos(alpha) + np.asarray(x, dtype=float) * np.sin(alpha)


def rx_distance(x, z, xi):
    """Distance from (x, z) back to the element at lateral position xi."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise NonPositiveDepth("rx_distance requires z > 0")
    return np.sqrt((np.asarray(x, dtype=float) - xi) ** 2 + z**2)


def propagation_delay(x, z, xi, alpha, c):
    """Two-way time of flight tau = (d_t + d_r) / c."""
    if np.any(np.asarray(c) <= 0):
        raise NonPositiveDepth("sound speed must be > 0")
    return (tx_distance(x, z, alpha) + rx_distance(x, z, xi)) / c


def delay_table(geometry: ProbeGeometry, params: AcquisitionParams,
                grid: ImageGrid) -> np.ndarray:
    """Materialized delays, shape (elements, nz, nx). Useful when many frames
    share one geometry; align_channels computes the same thing on the fly."""
    xx = grid.x_coords_m[np.newaxis, :]
    zz = grid.z_coords_m[:, np.newaxis]
    d_t = tx_distance(xx, zz, params.steer_angle_rad)
    out = np.empty((geometry.element_count, grid.nz, grid.nx))
    for i, xi in enumerate(geometry.element_positions_m):
        out[i] = (d_t + rx_distance(xx, zz, xi)) / params.sound_speed_mps
    return out


def _interp_trace(trace, idx):
    """Linear interpolation of one trace at fractional sample indices.

    Indices outside [0, n-1] yield exactly 0 (zero-fill, not clamp)."""
    n = trace.size
    inside = (idx >= 0.0) & (idx <= n - 1)
    k = np.clip(np.floor(idx), 0, n - 2).astype(np.intp)
    frac = idx - k
    vals = trace[k] * (1.0 - frac) + trace[k + 1] * frac
    return np.where(inside, vals, 0.0)


def align_channels(cube: ChannelDataCube, geometry: ProbeGeometry,
                   params: AcquisitionParams, grid: ImageGrid) -> PixelAlignedRF:
    """R_i(x,z) = h_i(tau(x,z)): delay-align every trace onto the image grid.

    Samples are read by linear interpolation; delays falling outside the
    recorded window [t0, t_end] produce exactly 0.
    """
    xx = grid.x_coords_m[np.newaxis, :]
    zz = grid.z_coords_m[:, np.newaxis]
    d_t = tx_distance(xx, zz, params.steer_angle_rad)
    fs = cube.sampling_freq_hz
    aligned = np.empty((geometry.element_count, grid.nz, grid.nx))
    any_inside = False
    for i, xi in enumerate(geometry.element_positions_m):
        tau = (d_t + rx_distance(xx, zz, xi)) / params.sound_speed_mps
        idx = (tau - cube.t0_s) * fs
        aligned[i] = _interp_trace(cube.traces[i], idx)
        if not any_inside:
            any_inside = bool(np.any((idx >= 0) & (idx <= cube.n_samples - 1)))
    if not any_inside:
        raise GridOutsideRecording(
            "every pixel maps outside the recorded time window"
        )
    return PixelAlignedRF(aligned, grid)


def aperture_for_depth(z, pixel_x, fnum, geometry: ProbeGeometry):
    """Contiguous element range within +-(z/fnum)/2 of pixel_x.

    Clipped to the physical array; never empty (the closest element is always
    included). Returns (first_idx, last_idx), both inclusive.
    """
    if z <= 0:
        raise NonPositiveDepth("aperture_for_depth requires z > 0")
    if fnum <= 0:
        raise ValueError("fnum must be > 0")
    half = 0.5 * z / fnum
    pos = geometry.element_positions_m
    first = int(np.searchsorted(pos, pixel_x - half, side="left"))
    last = int(np.searchsorted(pos, pixel_x + half, side="right")) - 1
    if first > last:
        closest = int(np.argmin(np.abs(pos - pixel_x)))
        first = last = closest
    return first, last


def thread_count() -> int:
    """Parallelism cap from PWBEAM_THREADS (default 1). Results are
    bit-identical at any value; the cap only bounds worker pools."""
    raw = os.environ.get("PWBEAM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
