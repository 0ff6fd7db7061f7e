"""Phantom generation, single-scattering plane-wave channel-data synthesis,
and the ideal-PSF ground-truth image.

The channel-data model is deliberately simple: each scatterer contributes one
Gaussian-modulated cosine echo at its two-way delay, with no attenuation,
directivity, or multiple scattering. Time zero is the plane wave crossing the
origin, matching the aligner's convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve

from .core import (
    AcquisitionParams,
    ChannelDataCube,
    ImageGrid,
    Phantom,
    ProbeGeometry,
)
from .errors import DurationTooShort, EmptyExtent, UndersampledPsf
from .geometry import rx_distance, tx_distance


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian-modulated cosine transmit pulse.

    sigma_t = sqrt(2 ln2) / (pi * b * f0) makes the -6 dB spectral full width
    equal b*f0, i.e. the stated fractional bandwidth.
    """

    center_freq_hz: float
    frac_bandwidth: float

    def __post_init__(self):
        if self.center_freq_hz <= 0 or not 0 < self.frac_bandwidth < 2:
            raise ValueError("invalid pulse parameters")

    @property
    def sigma_t_s(self) -> float:
        return np.sqrt(2.0 * np.log(2.0)) / (
            np.pi * self.frac_bandwidth * self.center_freq_hz
        )

    @classmethod
    def from_params(cls, params: AcquisitionParams) -> "PulseSpec":
        return cls(params.center_freq_hz, params.frac_bandwidth)


def pulse_waveform(t, spec: PulseSpec):
    """exp(-t^2 / 2 sigma_t^2) * cos(2 pi f0 t); peak 1 at t = 0."""
    t = np.asarray(t, dtype=float)
    return np.exp(-(t**2) / (2.0 * spec.sigma_t_s**2)) * np.cos(
        2.0 * np.pi * spec.center_freq_hz * t
    )


@dataclass(frozen=True)
class PsfSpec:
    """Ideal sharp Gaussian PSF; support truncated at 4 sigma."""

    sigma_lateral_m: float = 1e-4
    sigma_axial_m: float = 1e-4

    def __post_init__(self):
        if self.sigma_lateral_m <= 0 or self.sigma_axial_m <= 0:
            raise ValueError("PSF sigmas must be > 0")


@dataclass(frozen=True)
class GroundTruthImage:
    """Ideal envelope image in [0, 1]; max is 1 for non-empty phantoms."""

    values: np.ndarray
    grid: ImageGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.nz, self.grid.nx):
            raise ValueError("values shape inconsistent with grid")
        if v.min() < 0 or v.max() > 1:
            raise ValueError("ground-truth values must lie in [0, 1]")


def resolution_cell_area_m2(geometry: ProbeGeometry, params: AcquisitionParams,
                            z_mid_m: float) -> float:
    """Diffraction-limited cell: c/(2 b f0) axially, lambda*z/D laterally."""
    axial = params.sound_speed_mps / (2.0 * params.frac_bandwidth * params.center_freq_hz)
    aperture = max(geometry.aperture_m, geometry.pitch_m)
    lateral = params.wavelength_m * z_mid_m / aperture
    return axial * lateral


def _bilinear(image, u, v):
    """Sample image (rows, cols) at fractional (row=u, col=v) positions."""
    rows, cols = image.shape
    u = np.clip(u, 0.0, rows - 1.0)
    v = np.clip(v, 0.0, cols - 1.0)
    r0 = np.clip(np.floor(u).astype(np.intp), 0, rows - 2) if rows > 1 else np.zeros_like(u, dtype=np.intp)
    c0 = np.clip(np.floor(v).astype(np.intp), 0, cols - 2) if cols > 1 else np.zeros_like(v, dtype=np.intp)
    fu = u - r0
    fv = v - c0
    r1 = np.minimum(r0 + 1, rows - 1)
    c1 = np.minimum(c0 + 1, cols - 1)
    return (
        image[r0, c0] * (1 - fu) * (1 - fv)
        + image[r1, c0] * fu * (1 - fv)
        + image[r0, c1] * (1 - fu) * fv
        + image[r1, c1] * fu * fv
    )


def phantom_from_image(grayscale, extent, density, geometry: ProbeGeometry,
                       params: AcquisitionParams, seed=0) -> Phantom:
    """Speckle phantom weighted by a photographic echogenicity map.

    grayscale: (rows=axial, cols=lateral) intensities in [0, 1]. Scatterers
    are uniform over the extent; amplitude_k = g_k * I(x_k, z_k) with g_k
    standard normal and I the bilinearly interpolated intensity. The count is
    density scatterers per diffraction resolution cell at mid-depth.
    """
    img = np.asarray(grayscale, dtype=float)
    x0, x1, z0, z1 = extent
    if x1 <= x0 or z1 <= z0:
        raise EmptyExtent("phantom extent must have positive area")
    if density <= 0:
        raise ValueError("density must be > 0")
    area = (x1 - x0) * (z1 - z0)
    cell = resolution_cell_area_m2(geometry, params, 0.5 * (z0 + z1))
    n = max(1, int(round(density * area / cell)))
    rng = np.random.default_rng(seed)
    x = rng.uniform(x0, x1, n)
    z = rng.uniform(z0, z1, n)
    g = rng.standard_normal(n)
    # map physical position to fractional pixel coordinates of the map
    u = (z - z0) / (z1 - z0) * (img.shape[0] - 1)
    v = (x - x0) / (x1 - x0) * (img.shape[1] - 1)
    amp = g * _bilinear(img, u, v)
    return Phantom(x, z, amp, extent)


def phantom_point_targets(count_range, extent, seed=0) -> Phantom:
    """A few unit-amplitude point targets over an anechoic background."""
    lo, hi = count_range
    if hi < lo:
        raise ValueError("count_range must be non-empty")
    x0, x1, z0, z1 = extent
    if x1 <= x0 or z1 <= z0:
        raise EmptyExtent("phantom extent must have positive area")
    rng = np.random.default_rng(seed)
    n = int(rng.integers(lo, hi + 1))
    x = rng.uniform(x0, x1, n)
    z = rng.uniform(z0, z1, n)
    return Phantom(x, z, np.ones(n), extent)


def anechoic_disk_phantom(extent, center, radius_m, density,
                          geometry: ProbeGeometry, params: AcquisitionParams,
                          seed=0) -> Phantom:
    """Fully developed speckle with one anechoic (scatterer-free) disk."""
    base = phantom_from_image(np.ones((2, 2)), extent, density, geometry,
                              params, seed)
    cx, cz = center
    keep = (base.x_m - cx) ** 2 + (base.z_m - cz) ** 2 > radius_m**2
    return Phantom(base.x_m[keep], base.z_m[keep], base.amplitude[keep], extent)


def synth_channel_data(phantom: Phantom, geometry: ProbeGeometry,
                       params: AcquisitionParams, pulse: PulseSpec,
                       duration_s: float) -> ChannelDataCube:
    """Single-scattering echo traces: each scatterer adds one pulse copy at
    its two-way delay on every element. Echoes are deposited over +-8 sigma_t
    of the pulse; trace values outside that support are identically zero.
    """
    fs = params.sampling_freq_hz
    n = int(np.ceil(duration_s * fs))
    if n < 1:
        raise DurationTooShort("duration_s too short for one sample")
    traces = np.zeros((geometry.element_count, n))
    if phantom.count == 0:
        return ChannelDataCube(traces, 0.0, fs)

    d_t = tx_distance(phantom.x_m, phantom.z_m, params.steer_angle_rad)
    half = 8.0 * pulse.sigma_t_s
    w = int(np.ceil(half * fs))
    offsets = np.arange(-w, w + 1)
    t_axis_max = (n - 1) / fs
    for i, xi in enumerate(geometry.element_positions_m):
        tau = (d_t + rx_distance(phantom.x_m, phantom.z_m, xi)) / params.sound_speed_mps
        if np.max(tau) > t_axis_max:
            raise DurationTooShort(
                f"duration {duration_s:g}s does not cover the farthest "
                f"round trip {np.max(tau):g}s"
            )
        center = np.round(tau * fs).astype(np.intp)
        idx = center[:, None] + offsets[None, :]
        t = idx / fs - tau[:, None]
        vals = phantom.amplitude[:, None] * pulse_waveform(t, pulse)
        ok = (idx >= 0) & (idx < n)
        np.add.at(traces[i], idx[ok], vals[ok])
    return ChannelDataCube(traces, 0.0, fs)


def ideal_psf(spec: PsfSpec, dx_m: float, dz_m: float) -> np.ndarray:
    """Separable Gaussian kernel sampled on the grid, truncated at 4 sigma,
    peak exactly 1 at the center sample."""
    # tiny slack absorbs float noise in grid spacings built via arange
    if (dx_m > spec.sigma_lateral_m / 2 * (1 + 1e-9)
            or dz_m > spec.sigma_axial_m / 2 * (1 + 1e-9)):
        raise UndersampledPsf(
            "grid spacing must be <= sigma/2 in each axis to sample the PSF"
        )
    hx = int(np.floor(4.0 * spec.sigma_lateral_m / dx_m))
    hz = int(np.floor(4.0 * spec.sigma_axial_m / dz_m))
    x = np.arange(-hx, hx + 1) * dx_m
    z = np.arange(-hz, hz + 1) * dz_m
    gx = np.exp(-(x**2) / (2.0 * spec.sigma_lateral_m**2))
    gz = np.exp(-(z**2) / (2.0 * spec.sigma_axial_m**2))
    return gz[:, None] * gx[None, :]


def rasterize_phantom(phantom: Phantom, grid: ImageGrid) -> np.ndarray:
    """Deposit |amplitude| onto the nearest pixel (keeps delta sifting exact).
    Scatterers outside the grid are dropped."""
    img = np.zeros((grid.nz, grid.nx))
    if phantom.count == 0:
        return img
    ix = np.round((phantom.x_m - grid.x_coords_m[0]) / max(grid.dx_m, 1e-300)).astype(np.intp)
    iz = np.round((phantom.z_m - grid.z_coords_m[0]) / max(grid.dz_m, 1e-300)).astype(np.intp)
    ok = (ix >= 0) & (ix < grid.nx) & (iz >= 0) & (iz < grid.nz)
    np.add.at(img, (iz[ok], ix[ok]), np.abs(phantom.amplitude[ok]))
    return img


def ground_truth_image(phantom: Phantom, psf: PsfSpec,
                       grid: ImageGrid) -> GroundTruthImage:
    """Ideal envelope image: rasterized |TRF| convolved with the sharp
    Gaussian PSF (zero-padded borders), magnitude, max normalized to 1.

    The additive noise term of the convolution model is omitted: the
    simulation is noise-free by construction.
    """
    trf = rasterize_phantom(phantom, grid)
    kernel = ideal_psf(psf, grid.dx_m or grid.dz_m, grid.dz_m or grid.dx_m)
    # direct convolution keeps whole-pixel shift equivariance bit-exact
    img = np.abs(convolve(trf, kernel, mode="same", method="direct"))
    peak = img.max()
    if peak > 0:
        img = img / peak
    img = np.clip(img, 0.0, 1.0)
    return GroundTruthImage(img, grid)
