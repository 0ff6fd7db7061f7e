import numpy as np
import pytest

from pwbeam import (
    ChannelDataCube,
    ProbeGeometry,
    normalize_channel_data,
    validate_probe,
)
from pwbeam.errors import AllZeroData, EmptyProbe, NonUniformPitch, UnsortedElements


class TestValidateProbe:
    def test_l11_4v_style_probe_is_valid(self):
        geo = ProbeGeometry.linear(128, 0.3e-3)
        validate_probe(geo)  # no raise
        assert geo.element_count == 128

    def test_non_uniform_pitch_rejected(self):
        with pytest.raises(NonUniformPitch):
            ProbeGeometry(np.array([0.0, 1e-4, 3e-4]), 3, 1e-4)

    def test_empty_probe_rejected(self):
        with pytest.raises(EmptyProbe):
            ProbeGeometry(np.array([]), 0, 1e-4)

    def test_unsorted_elements_rejected(self):
        with pytest.raises(UnsortedElements):
            ProbeGeometry(np.array([0.0, 2e-4, 1e-4]), 3, 1e-4)

    def test_count_mismatch_rejected(self):
        with pytest.raises(EmptyProbe):
            ProbeGeometry(np.array([0.0, 1e-4]), 3, 1e-4)


class TestNormalize:
    def test_divides_by_global_peak(self):
        traces = np.array([[1.0, -4.0], [2.0, 0.5]])
        cube = ChannelDataCube(traces, 0.0, 1e6)
        out = normalize_channel_data(cube)
        assert np.array_equal(out.traces, traces / 4.0)
        assert np.max(np.abs(out.traces)) == 1.0

    def test_idempotent_exactly(self):
        rng = np.random.default_rng(0)
        cube = ChannelDataCube(rng.standard_normal((8, 64)), 0.0, 1e6)
        once = normalize_channel_data(cube)
        twice = normalize_channel_data(once)
        assert np.array_equal(once.traces, twice.traces)

    def test_already_normalized_unchanged(self):
        traces = np.array([[0.5, -1.0, 0.25]])
        out = normalize_channel_data(ChannelDataCube(traces, 0.0, 1e6))
        assert np.array_equal(out.traces, traces)

    def test_all_zero_raises(self):
        with pytest.raises(AllZeroData):
            normalize_channel_data(ChannelDataCube(np.zeros((2, 4)), 0.0, 1e6))

    def test_preserves_sign_and_ratios(self):
        rng = np.random.default_rng(1)
        traces = rng.standard_normal((4, 32)) + 0.1
        out = normalize_channel_data(ChannelDataCube(traces, 0.0, 1e6))
        flat_in = traces.ravel()
        flat_out = out.traces.ravel()
        assert np.all(np.sign(flat_in) == np.sign(flat_out))
        ratio_in = flat_in[:-1] / flat_in[1:]
        ratio_out = flat_out[:-1] / flat_out[1:]
        assert np.allclose(ratio_in, ratio_out, rtol=1e-12)
