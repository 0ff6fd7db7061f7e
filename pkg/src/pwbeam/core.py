"""Shared domain types and their validation.

All physical quantities are SI (meters, seconds, hertz). Types are frozen
dataclasses wrapping numpy arrays; operations never mutate them in place, so
instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllZeroData,
    EmptyProbe,
    NonUniformPitch,
    UnsortedElements,
)

_PITCH_TOL_M = 1e-12


@dataclass(frozen=True)
class ProbeGeometry:
    """Linear array: element centers on the x-axis, uniform pitch."""

    element_positions_m: np.ndarray
    element_count: int
    pitch_m: float

    def __post_init__(self):
        pos = np.asarray(self.element_positions_m, dtype=float)
        object.__setattr__(self, "element_positions_m", pos)
        validate_probe(self)

    @classmethod
    def linear(cls, element_count: int, pitch_m: float) -> "ProbeGeometry":
        """Array of `element_count` elements centered on x = 0."""
        if element_count < 1:
            raise EmptyProbe("element_count must be >= 1")
        x = (np.arange(element_count) - (element_count - 1) / 2.0) * pitch_m
        return cls(x, element_count, pitch_m)

    @property
    def aperture_m(self) -> float:
        return float(self.element_positions_m[-1] - self.element_positions_m[0])


def validate_probe(geometry: ProbeGeometry) -> None:
    """Raise the named error for the first violated probe invariant."""
    pos = geometry.element_positions_m
    if pos.size == 0:
        raise EmptyProbe("probe has no elements")
    if geometry.element_count != pos.size:
        raise EmptyProbe(
            f"element_count {geometry.element_count} != positions length {pos.size}"
        )
    if pos.size > 1:
        diffs = np.diff(pos)
        if np.any(diffs <= 0):
            raise UnsortedElements("element positions must be strictly increasing")
        if np.any(np.abs(diffs - geometry.pitch_m) > _PITCH_TOL_M):
            raise NonUniformPitch(
                "element spacing is not uniform at the declared pitch"
            )
    if geometry.pitch_m <= 0:
        raise NonUniformPitch("pitch_m must be > 0")


@dataclass(frozen=True)
class AcquisitionParams:
    """Transmit/receive settings for one plane-wave acquisition."""

    sound_speed_mps: float
    center_freq_hz: float
    frac_bandwidth: float
    sampling_freq_hz: float
    steer_angle_rad: float = 0.0

    def __post_init__(self):
        if self.sound_speed_mps <= 0:
            raise ValueError("sound_speed_mps must be > 0")
        if self.center_freq_hz <= 0:
            raise ValueError("center_freq_hz must be > 0")
        if not 0 < self.frac_bandwidth < 2:
            raise ValueError("frac_bandwidth must be in (0, 2)")
        nyquist_floor = 2.0 * self.center_freq_hz * (1.0 + self.frac_bandwidth / 2.0)
        if self.sampling_freq_hz <= nyquist_floor:
            raise ValueError(
                f"sampling_freq_hz {self.sampling_freq_hz:g} must exceed "
                f"2*f0*(1+b/2) = {nyquist_floor:g}"
            )
        if abs(self.steer_angle_rad) >= np.pi / 2:
            raise ValueError("steer_angle_rad must satisfy |angle| < pi/2")

    @property
    def wavelength_m(self) -> float:
        return self.sound_speed_mps / self.center_freq_hz


@dataclass(frozen=True)
class ImageGrid:
    """Uniform pixel grid; z increases into the tissue and is strictly > 0."""

    x_coords_m: np.ndarray
    z_coords_m: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_coords_m, dtype=float)
        z = np.asarray(self.z_coords_m, dtype=float)
        object.__setattr__(self, "x_coords_m", x)
        object.__setattr__(self, "z_coords_m", z)
        for name, c in (("x", x), ("z", z)):
            if c.size < 1:
                raise ValueError(f"{name}_coords_m is empty")
            if c.size > 1:
                d = np.diff(c)
                if np.any(d <= 0):
                    raise ValueError(f"{name}_coords_m must be strictly increasing")
                if np.any(np.abs(d - d[0]) > 1e-12):
                    raise ValueError(f"{name}_coords_m must be uniformly spaced")
        if np.any(z <= 0):
            raise ValueError("all z_coords_m must be > 0")

    @property
    def nx(self) -> int:
        return self.x_coords_m.size

    @property
    def nz(self) -> int:
        return self.z_coords_m.size

    @property
    def dx_m(self) -> float:
        return float(self.x_coords_m[1] - self.x_coords_m[0]) if self.nx > 1 else 0.0

    @property
    def dz_m(self) -> float:
        return float(self.z_coords_m[1] - self.z_coords_m[0]) if self.nz > 1 else 0.0

    @classmethod
    def regular(cls, x_min_m, x_max_m, z_min_m, z_max_m, pixel_m) -> "ImageGrid":
        x = np.arange(x_min_m, x_max_m + pixel_m / 2, pixel_m)
        z = np.arange(z_min_m, z_max_m + pixel_m / 2, pixel_m)
        return cls(x, z)

    def same_shape(self, other: "ImageGrid") -> bool:
        return (
            self.nx == other.nx
            and self.nz == other.nz
            and np.allclose(self.x_coords_m, other.x_coords_m)
            and np.allclose(self.z_coords_m, other.z_coords_m)
        )


@dataclass(frozen=True)
class ChannelDataCube:
    """Raw per-element echo traces h_i(t), shape (element_count, n_samples)."""

    traces: np.ndarray
    t0_s: float
    sampling_freq_hz: float

    def __post_init__(self):
        tr = np.asarray(self.traces, dtype=float)
        object.__setattr__(self, "traces", tr)
        if tr.ndim != 2 or tr.shape[1] < 1:
            raise ValueError("traces must be a 2-D (elements, samples) array")
        if not np.all(np.isfinite(tr)):
            raise ValueError("traces must be finite")
        if self.sampling_freq_hz <= 0:
            raise ValueError("sampling_freq_hz must be > 0")

    @property
    def element_count(self) -> int:
        return self.traces.shape[0]

    @property
    def n_samples(self) -> int:
        return self.traces.shape[1]

    @property
    def t_end_s(self) -> float:
        return self.t0_s + (self.n_samples - 1) / self.sampling_freq_hz


def normalize_channel_data(cube: ChannelDataCube) -> ChannelDataCube:
    """Scale the whole cube so the global max |sample| is 1.

    Normalization is global, not per channel, so inter-element amplitude
    relationships survive. Idempotent, sign- and ratio-preserving.
    """
    peak = np.max(np.abs(cube.traces))
    if peak == 0:
        raise AllZeroData("cannot normalize an all-zero cube")
    if peak == 1.0:
        return cube
    return ChannelDataCube(cube.traces / peak, cube.t0_s, cube.sampling_freq_hz)


@dataclass(frozen=True)
class PixelAlignedRF:
    """Delay-aligned per-element RF on the grid, shape (elements, nz, nx)."""

    aligned: np.ndarray
    grid: ImageGrid

    def __post_init__(self):
        a = np.asarray(self.aligned, dtype=float)
        object.__setattr__(self, "aligned", a)
        if a.ndim != 3:
            raise ValueError("aligned must be (elements, nz, nx)")
        if a.shape[1] != self.grid.nz or a.shape[2] != self.grid.nx:
            raise ValueError("aligned shape inconsistent with grid")

    @property
    def element_count(self) -> int:
        return self.aligned.shape[0]


@dataclass(frozen=True)
class BeamformedRF:
    """Beamformed RF matrix S on the grid, shape (nz, nx)."""

    values: np.ndarray
    grid: ImageGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.nz, self.grid.nx):
            raise ValueError("values shape inconsistent with grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("beamformed values must be finite")


@dataclass(frozen=True)
class EnvelopeImage:
    """Detected envelope, non-negative, shape (nz, nx)."""

    values: np.ndarray
    grid: ImageGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.nz, self.grid.nx):
            raise ValueError("values shape inconsistent with grid")
        if np.any(v < 0):
            raise ValueError("envelope values must be >= 0")


@dataclass(frozen=True)
class BModeImage:
    """Log-compressed display image in dB, clipped to [-dynamic_range_db, 0]."""

    values: np.ndarray
    grid: ImageGrid
    dynamic_range_db: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if self.dynamic_range_db <= 0:
            raise ValueError("dynamic_range_db must be > 0")
        if v.shape != (self.grid.nz, self.grid.nx):
            raise ValueError("values shape inconsistent with grid")
        if v.max() != 0.0:
            raise ValueError("b-mode max must be exactly 0 dB")
        if v.min() < -self.dynamic_range_db:
            raise ValueError("b-mode values below -dynamic_range_db")


@dataclass(frozen=True)
class Phantom:
    """Scatterer cloud: positions (m) and amplitudes; the simulated TRF."""

    x_m: np.ndarray
    z_m: np.ndarray
    amplitude: np.ndarray
    extent: tuple  # (x_min, x_max, z_min, z_max) in meters

    def __post_init__(self):
        for name in ("x_m", "z_m", "amplitude"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        x0, x1, z0, z1 = self.extent
        if self.x_m.shape != self.z_m.shape or self.x_m.shape != self.amplitude.shape:
            raise ValueError("scatterer arrays must share one shape")
        if self.x_m.size and (
            self.x_m.min() < x0
            or self.x_m.max() > x1
            or self.z_m.min() < z0
            or self.z_m.max() > z1
        ):
            raise ValueError("scatterer positions outside extent")

    @property
    def count(self) -> int:
        return self.x_m.size


@dataclass(frozen=True)
class RegionMask:
    """Boolean pixel mask with a role label ('roi' or 'background')."""

    mask: np.ndarray
    role: str = "roi"

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, "mask", m)
        if m.ndim != 2:
            raise ValueError("mask must be 2-D")
        if not m.any():
            raise ValueError("mask must contain at least one true pixel")

    @property
    def pixel_count(self) -> int:
        return int(self.mask.sum())
