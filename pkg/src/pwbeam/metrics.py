"""Resolution and contrast metrics: FWHM, SSNR, CR, gCNR.

All contrast metrics operate on the envelope image before log compression.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EnvelopeImage, RegionMask
from .errors import (
    EmptyMask,
    NoCrossing,
    PeakAtBoundary,
    ZeroBackground,
    ZeroVariance,
)


@dataclass(frozen=True)
class Histogram:
    """Uniform-bin histogram with density normalization."""

    bin_edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)
        if edges.size != counts.size + 1:
            raise ValueError("need len(edges) == len(counts) + 1")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")

    @property
    def bin_width(self) -> float:
        return float(self.bin_edges[1] - self.bin_edges[0])

    @property
    def densities(self) -> np.ndarray:
        total = self.counts.sum()
        if total == 0:
            return np.zeros_like(self.counts)
        return self.counts / (total * self.bin_width)


def fwhm(profile, spacing_m: float) -> float:
    """Full width at half maximum of a 1-D profile.

    The two half-max crossings nearest the peak are located by linear
    interpolation between the bracketing samples.
    """
    p = np.asarray(profile, dtype=float)
    if p.size < 3:
        raise PeakAtBoundary("profile too short")
    k = int(np.argmax(p))
    if k == 0 or k == p.size - 1:
        raise PeakAtBoundary("peak sits on the profile boundary")
    half = p[k] / 2.0

    def cross(idx_range, step):
        prev = k
        for j in idx_range:
            if p[j] <= half:
                # interpolate between j and the sample nearer the peak
                frac = (p[prev] - half) / (p[prev] - p[j])
                return prev + step * frac
            prev = j
        raise NoCrossing("profile never falls below half max on one side")

    left = cross(range(k - 1, -1, -1), -1.0)
    right = cross(range(k + 1, p.size), +1.0)
    return float((right - left) * spacing_m)


def ssnr(env: EnvelopeImage, background: RegionMask) -> float:
    """Speckle SNR: mean / population std of the envelope over the mask."""
    vals = env.values[background.mask]
    if vals.size < 2:
        raise EmptyMask("background needs >= 2 pixels")
    sigma = vals.std()  # population (divide by N)
    if sigma == 0:
        raise ZeroVariance("background has zero variance")
    return float(vals.mean() / sigma)


def cr(env: EnvelopeImage, roi: RegionMask, background: RegionMask) -> float:
    """Contrast ratio 20 log10(mu_ROI / mu_B) in dB.

    A perfectly anechoic ROI (mu_ROI == 0) returns -inf; callers report it as
    a clamped '< -DR' sentinel rather than NaN.
    """
    mu_roi = env.values[roi.mask].mean()
    mu_b = env.values[background.mask].mean()
    if mu_b <= 0:
        raise ZeroBackground("background envelope mean must be > 0")
    if mu_roi == 0:
        return float("-inf")
    return float(20.0 * np.log10(mu_roi / mu_b))


def region_histograms(env: EnvelopeImage, roi: RegionMask,
                      background: RegionMask, bins: int = 100):
    """Histograms of both regions on the shared range of their union."""
    a = env.values[roi.mask]
    b = env.values[background.mask]
    if a.size == 0 or b.size == 0:
        raise EmptyMask("both regions must be non-empty")
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi <= lo:
        hi = lo + 1.0  # degenerate constant data: one shared bin span
    edges = np.linspace(lo, hi, bins + 1)
    ca, _ = np.histogram(a, bins=edges)
    cb, _ = np.histogram(b, bins=edges)
    return Histogram(edges, ca), Histogram(edges, cb)


def gcnr(env: EnvelopeImage, roi: RegionMask, background: RegionMask,
         bins: int = 100) -> float:
    """Generalized CNR: 1 minus the overlap of the two pixel-value densities.

    1 means fully separable regions; 0 means identical distributions.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    h_roi, h_b = region_histograms(env, roi, background, bins)
    overlap = np.minimum(h_roi.densities, h_b.densities).sum() * h_roi.bin_width
    return float(1.0 - overlap)


def disk_mask(grid, center, radius_m, role="roi") -> RegionMask:
    cx, cz = center
    xx = grid.x_coords_m[None, :]
    zz = grid.z_coords_m[:, None]
    return RegionMask((xx - cx) ** 2 + (zz - cz) ** 2 <= radius_m**2, role)


def annulus_mask(grid, center, r_inner_m, r_outer_m, role="background") -> RegionMask:
    cx, cz = center
    xx = grid.x_coords_m[None, :]
    zz = grid.z_coords_m[:, None]
    d2 = (xx - cx) ** 2 + (zz - cz) ** 2
    return RegionMask((d2 > r_inner_m**2) & (d2 <= r_outer_m**2), role)


def peak_profiles(env: EnvelopeImage):
    """Axial and lateral profiles through the global peak pixel."""
    iz, ix = np.unravel_index(np.argmax(env.values), env.values.shape)
    return env.values[:, ix], env.values[iz, :], (int(iz), int(ix))


def point_target_fwhm(env: EnvelopeImage):
    """(axial, lateral) FWHM in meters of the brightest point target."""
    axial, lateral, _ = peak_profiles(env)
    return fwhm(axial, env.grid.dz_m), fwhm(lateral, env.grid.dx_m)
