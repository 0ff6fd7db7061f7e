import pytest

from pwbeam import (
    AcquisitionParams,
    ImageGrid,
    Phantom,
    ProbeGeometry,
    PulseSpec,
)

F0 = 5.208e6
FS = 20 * F0  # fs = 20 * f0, comfortably above the pulse band


@pytest.fixture(scope="session")
def desk_probe():
    return ProbeGeometry.linear(32, 0.3e-3)


@pytest.fixture(scope="session")
def desk_params():
    return AcquisitionParams(1540.0, F0, 0.67, FS, 0.0)


@pytest.fixture(scope="session")
def desk_pulse():
    return PulseSpec(F0, 0.67)


@pytest.fixture(scope="session")
def desk_grid():
    return ImageGrid.regular(-3e-3, 3e-3, 15e-3, 25e-3, 0.1e-3)


@pytest.fixture(scope="session")
def point_phantom(desk_grid):
    g = desk_grid
    extent = (float(g.x_coords_m[0]), float(g.x_coords_m[-1]),
              float(g.z_coords_m[0]), float(g.z_coords_m[-1]))
    return Phantom([0.0], [0.020], [1.0], extent)


def steered(params, angle_rad):
    return AcquisitionParams(params.sound_speed_mps, params.center_freq_hz,
                             params.frac_bandwidth, params.sampling_freq_hz,
                             angle_rad)
