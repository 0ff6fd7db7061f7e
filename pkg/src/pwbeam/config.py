"""Flat key=value run configuration.

Files use convenient units (mm, MHz, degrees); parsing converts to SI once at
the boundary. Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .beamform import ApodizationSpec, MvConfig
from .core import AcquisitionParams, ImageGrid, ProbeGeometry
from .errors import ConfigError
from .simulate import PsfSpec, PulseSpec

# key -> (required, default as file-units value)
_SCHEMA = {
    "probe.element_count": (True, None),
    "probe.pitch_mm": (True, None),
    "acq.sound_speed_mps": (True, None),
    "acq.center_freq_mhz": (True, None),
    "acq.frac_bandwidth": (True, None),
    "acq.sampling_freq_mhz": (True, None),
    "acq.steer_angle_deg": (False, 0.0),
    "grid.x_min_mm": (True, None),
    "grid.x_max_mm": (True, None),
    "grid.z_min_mm": (True, None),
    "grid.z_max_mm": (True, None),
    "grid.pixel_mm": (True, None),
    "apod.window": (False, "boxcar"),
    "apod.fnum": (False, 1.75),
    "mv.subaperture_len": (False, 0),       # 0 = auto (aperture/4)
    "mv.diagonal_loading": (False, -1.0),   # < 0 = auto (1/(100 L))
    "mv.forward_backward": (False, 0),
    "psf.sigma_lateral_mm": (False, 0.1),
    "psf.sigma_axial_mm": (False, 0.1),
    "sim.density_per_cell": (False, 60.0),
    "sim.points_min": (False, 5),
    "sim.points_max": (False, 30),
    "sim.seed": (False, 0),
    "sim.duration_margin": (False, 1.15),
    "display.dynamic_range_db": (False, 60.0),
    "dataset.patches": (False, 2),
}

_INT_KEYS = {
    "probe.element_count", "mv.subaperture_len", "mv.forward_backward",
    "sim.points_min", "sim.points_max", "sim.seed", "dataset.patches",
}
_STR_KEYS = {"apod.window"}


def parse_kv_file(path) -> dict:
    """Parse 'key = value' lines; '#' starts a comment; blank lines ignored."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            if k in out:
                raise ConfigError(f"{path}:{lineno}: duplicate key {k!r}")
            out[k] = v
    return out


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration in SI units, assembled from a key=value file."""

    raw: dict
    probe: ProbeGeometry
    acquisition: AcquisitionParams
    grid: ImageGrid
    apodization: ApodizationSpec
    mv: MvConfig
    psf: PsfSpec
    density_per_cell: float
    points_min: int
    points_max: int
    seed: int
    duration_margin: float
    dynamic_range_db: float
    dataset_patches: int

    @property
    def pulse(self) -> PulseSpec:
        return PulseSpec.from_params(self.acquisition)

    def steered(self, angle_rad: float) -> AcquisitionParams:
        a = self.acquisition
        return AcquisitionParams(a.sound_speed_mps, a.center_freq_hz,
                                 a.frac_bandwidth, a.sampling_freq_hz, angle_rad)


def load_config(path) -> RunConfig:
    kv = parse_kv_file(path)
    unknown = sorted(set(kv) - set(_SCHEMA))
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(unknown)}")
    missing = sorted(k for k, (req, _) in _SCHEMA.items() if req and k not in kv)
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")

    vals = {}
    for key, (_, default) in _SCHEMA.items():
        if key in kv:
            text = kv[key]
            if key in _STR_KEYS:
                vals[key] = text
            else:
                try:
                    vals[key] = int(text) if key in _INT_KEYS else float(text)
                except ValueError:
                    raise ConfigError(f"{path}: bad value for {key}: {text!r}") from None
        else:
            vals[key] = default

    try:
        probe = ProbeGeometry.linear(vals["probe.element_count"],
                                     vals["probe.pitch_mm"] * 1e-3)
        acq = AcquisitionParams(
            sound_speed_mps=vals["acq.sound_speed_mps"],
            center_freq_hz=vals["acq.center_freq_mhz"] * 1e6,
            frac_bandwidth=vals["acq.frac_bandwidth"],
            sampling_freq_hz=vals["acq.sampling_freq_mhz"] * 1e6,
            steer_angle_rad=math.radians(vals["acq.steer_angle_deg"]),
        )
        grid = ImageGrid.regular(
            vals["grid.x_min_mm"] * 1e-3, vals["grid.x_max_mm"] * 1e-3,
            vals["grid.z_min_mm"] * 1e-3, vals["grid.z_max_mm"] * 1e-3,
            vals["grid.pixel_mm"] * 1e-3,
        )
        apod = ApodizationSpec(vals["apod.window"], vals["apod.fnum"])
        mv = MvConfig(
            subaperture_len=vals["mv.subaperture_len"] or None,
            diagonal_loading=(None if vals["mv.diagonal_loading"] < 0
                              else vals["mv.diagonal_loading"]),
            use_forward_backward=bool(vals["mv.forward_backward"]),
        )
        psf = PsfSpec(vals["psf.sigma_lateral_mm"] * 1e-3,
                      vals["psf.sigma_axial_mm"] * 1e-3)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{path}: {exc}") from None

    return RunConfig(
        raw=kv,
        probe=probe,
        acquisition=acq,
        grid=grid,
        apodization=apod,
        mv=mv,
        psf=psf,
        density_per_cell=vals["sim.density_per_cell"],
        points_min=vals["sim.points_min"],
        points_max=vals["sim.points_max"],
        seed=vals["sim.seed"],
        duration_margin=vals["sim.duration_margin"],
        dynamic_range_db=vals["display.dynamic_range_db"],
        dataset_patches=vals["dataset.patches"],
    )
