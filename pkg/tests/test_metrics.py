import numpy as np
import pytest

from pwbeam import EnvelopeImage, ImageGrid, RegionMask, cr, fwhm, gcnr, ssnr
from pwbeam.errors import (
    NoCrossing,
    PeakAtBoundary,
    ZeroBackground,
    ZeroVariance,
)
from pwbeam.metrics import Histogram, region_histograms


def _env(values):
    values = np.asarray(values, dtype=float)
    nz, nx = values.shape
    grid = ImageGrid(np.arange(nx) * 1e-4, np.arange(nz) * 1e-4 + 1e-3)
    return EnvelopeImage(values, grid)


class TestFwhm:
    def test_triangle(self):
        assert fwhm([0.0, 1.0, 0.0], 0.1e-3) == pytest.approx(0.1e-3, rel=1e-12)

    def test_gaussian_against_analytic(self):
        sigma = 0.2e-3
        spacing = 0.02e-3
        x = (np.arange(201) - 100) * spacing
        profile = np.exp(-(x**2) / (2 * sigma**2))
        expected = 2 * np.sqrt(2 * np.log(2)) * sigma  # 0.4710 mm
        assert expected == pytest.approx(0.4710e-3, abs=5e-7)
        assert fwhm(profile, spacing) == pytest.approx(expected, rel=5e-3)

    def test_monotone_ramp_rejected(self):
        with pytest.raises(PeakAtBoundary):
            fwhm(np.linspace(0, 1, 16), 1e-4)

    def test_no_crossing_rejected(self):
        with pytest.raises(NoCrossing):
            fwhm([0.9, 1.0, 0.9], 1e-4)

    def test_scale_invariant_exactly(self):
        rng = np.random.default_rng(0)
        profile = np.exp(-((np.arange(51) - 25.0) ** 2) / 40.0)
        for k in (0.5, 3.0, 1e6):
            assert fwhm(k * profile, 1e-4) == fwhm(profile, 1e-4)


class TestSsnr:
    def test_simple_values(self):
        env = _env([[1.0, 3.0]])
        mask = RegionMask(np.array([[True, True]]), "background")
        assert ssnr(env, mask) == pytest.approx(2.0, rel=1e-12)

    def test_zero_variance_raises(self):
        env = _env([[2.0, 2.0, 2.0]])
        with pytest.raises(ZeroVariance):
            ssnr(env, RegionMask(np.ones((1, 3), bool), "background"))

    def test_rayleigh_oracle(self):
        # fully developed speckle: mu/sigma = sqrt(pi / (4 - pi))
        rng = np.random.default_rng(1)
        vals = rng.rayleigh(1.0, (400, 400))
        env = _env(vals)
        got = ssnr(env, RegionMask(np.ones_like(vals, bool), "background"))
        assert got == pytest.approx(np.sqrt(np.pi / (4 - np.pi)), abs=0.02)
        assert np.sqrt(np.pi / (4 - np.pi)) == pytest.approx(1.913, abs=5e-4)

    def test_gain_invariant_offset_not(self):
        rng = np.random.default_rng(2)
        vals = rng.random((50, 50)) + 0.5
        mask = RegionMask(np.ones_like(vals, bool), "background")
        base = ssnr(_env(vals), mask)
        assert ssnr(_env(5.0 * vals), mask) == pytest.approx(base, rel=1e-12)
        assert ssnr(_env(vals + 10.0), mask) != base


class TestCr:
    def test_equal_means_zero_db(self):
        env = _env([[1.0, 2.0, 1.0, 2.0]])
        roi = RegionMask(np.array([[True, True, False, False]]))
        bg = RegionMask(np.array([[False, False, True, True]]), "background")
        assert cr(env, roi, bg) == pytest.approx(0.0, abs=1e-12)

    def test_tenth_gives_minus_20db(self):
        env = _env([[0.1, 1.0]])
        roi = RegionMask(np.array([[True, False]]))
        bg = RegionMask(np.array([[False, True]]), "background")
        assert cr(env, roi, bg) == pytest.approx(-20.0, abs=1e-12)

    def test_anechoic_roi_sentinel(self):
        env = _env([[0.0, 1.0]])
        roi = RegionMask(np.array([[True, False]]))
        bg = RegionMask(np.array([[False, True]]), "background")
        assert cr(env, roi, bg) == float("-inf")

    def test_gain_invariant(self):
        rng = np.random.default_rng(3)
        vals = rng.random((20, 20)) + 0.1
        roi = RegionMask(np.arange(400).reshape(20, 20) < 200)
        bg = RegionMask(np.arange(400).reshape(20, 20) >= 200, "background")
        assert cr(_env(7.0 * vals), roi, bg) == pytest.approx(cr(_env(vals), roi, bg), abs=1e-10)

    def test_zero_background_raises(self):
        env = _env([[1.0, 0.0]])
        roi = RegionMask(np.array([[True, False]]))
        bg = RegionMask(np.array([[False, True]]), "background")
        with pytest.raises(ZeroBackground):
            cr(env, roi, bg)


class TestGcnr:
    def _masks(self, n):
        sel = np.zeros(2 * n, bool)
        sel[:n] = True
        return (RegionMask(sel.reshape(1, -1)),
                RegionMask(~sel.reshape(1, -1), "background"))

    def test_identical_distributions_near_zero(self):
        rng = np.random.default_rng(4)
        n = 20000
        vals = rng.random(2 * n).reshape(1, -1)
        roi, bg = self._masks(n)
        assert gcnr(_env(vals), roi, bg) <= 0.05

    def test_disjoint_ranges_exactly_one(self):
        n = 5000
        vals = np.concatenate([np.linspace(0, 1, n),
                               np.linspace(5, 6, n)]).reshape(1, -1)
        roi, bg = self._masks(n)
        assert gcnr(_env(vals), roi, bg) == 1.0

    def test_half_overlap_uniform(self):
        # analytic overlap of U[0,1] and U[0.5,1.5] is 0.5
        rng = np.random.default_rng(5)
        n = 100000
        a = rng.uniform(0.0, 1.0, n)
        b = rng.uniform(0.5, 1.5, n)
        vals = np.concatenate([a, b]).reshape(1, -1)
        roi, bg = self._masks(n)
        assert gcnr(_env(vals), roi, bg, bins=100) == pytest.approx(0.5, abs=0.02)

    def test_bounded_in_unit_interval(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            n = 500
            vals = rng.random(2 * n).reshape(1, -1) ** rng.uniform(0.3, 3)
            roi, bg = self._masks(n)
            assert 0.0 <= gcnr(_env(vals), roi, bg) <= 1.0

    def test_monotone_remap_invariance(self):
        # robust to grayscale transforms: identity, gain, gamma
        rng = np.random.default_rng(7)
        n = 100000
        a = rng.rayleigh(1.0, n)
        b = rng.rayleigh(2.2, n)
        roi, bg = self._masks(n)
        base = gcnr(_env(np.concatenate([a, b]).reshape(1, -1)), roi, bg)
        for remap in (lambda x: x, lambda x: 3.0 * x, lambda x: x**0.5):
            vals = remap(np.concatenate([a, b])).reshape(1, -1)
            assert gcnr(_env(vals), roi, bg) == pytest.approx(base, abs=0.03)

    def test_empty_region_rejected(self):
        env = _env([[1.0, 2.0]])
        with pytest.raises(ValueError):
            RegionMask(np.zeros((1, 2), bool))


class TestHistogram:
    def test_density_normalization(self):
        rng = np.random.default_rng(8)
        vals = rng.random((1, 4000))
        roi = RegionMask(np.arange(4000).reshape(1, -1) < 2000)
        bg = RegionMask(np.arange(4000).reshape(1, -1) >= 2000, "background")
        h_roi, h_bg = region_histograms(_env(vals), roi, bg, bins=64)
        for h in (h_roi, h_bg):
            assert h.densities.sum() * h.bin_width == pytest.approx(1.0, abs=1e-9)

    def test_bad_edges_rejected(self):
        with pytest.raises(ValueError):
            Histogram(np.array([0.0, 1.0, 1.0]), np.array([1.0, 2.0]))
