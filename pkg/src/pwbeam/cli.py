"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data/validation error. Every failure
prints a single diagnostic line naming the violated check.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import report
from .beamform import cpwc, das, mv_beamform
from .config import load_config
from .core import (
    AcquisitionParams,
    ChannelDataCube,
    ImageGrid,
    normalize_channel_data,
)
from .errors import PwbeamError
from .files import (
    export_bmode_png,
    load_grayscale,
    load_regions,
    phantom_from_csv,
    phantom_to_csv,
)
from .geometry import align_channels, propagation_delay
from .metrics import cr, gcnr, point_target_fwhm, ssnr
from .postprocess import envelope, log_compress
from .simulate import (
    ground_truth_image,
    phantom_from_image,
    phantom_point_targets,
    synth_channel_data,
)
from .ubf import ubf_read, ubf_write


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _grid_meta(grid: ImageGrid) -> dict:
    return {
        "grid_x0_m": repr(float(grid.x_coords_m[0])),
        "grid_dx_m": repr(grid.dx_m),
        "grid_z0_m": repr(float(grid.z_coords_m[0])),
        "grid_dz_m": repr(grid.dz_m),
    }


def _grid_from_meta(meta, nz, nx) -> ImageGrid:
    x0 = float(meta["grid_x0_m"])
    dx = float(meta["grid_dx_m"])
    z0 = float(meta["grid_z0_m"])
    dz = float(meta["grid_dz_m"])
    return ImageGrid(x0 + dx * np.arange(nx), z0 + dz * np.arange(nz))


def _acq_meta(acq: AcquisitionParams) -> dict:
    return {
        "c_mps": repr(acq.sound_speed_mps),
        "f0_hz": repr(acq.center_freq_hz),
        "frac_bw": repr(acq.frac_bandwidth),
        "fs_hz": repr(acq.sampling_freq_hz),
        "angle_rad": repr(acq.steer_angle_rad),
    }


def _acq_from_meta(meta, fallback: AcquisitionParams) -> AcquisitionParams:
    return AcquisitionParams(
        sound_speed_mps=float(meta.get("c_mps", fallback.sound_speed_mps)),
        center_freq_hz=float(meta.get("f0_hz", fallback.center_freq_hz)),
        frac_bandwidth=float(meta.get("frac_bw", fallback.frac_bandwidth)),
        sampling_freq_hz=float(meta.get("fs_hz", fallback.sampling_freq_hz)),
        steer_angle_rad=float(meta.get("angle_rad", fallback.steer_angle_rad)),
    )


def _sim_duration(cfg, acq) -> float:
    """Recording window covering the farthest pixel/scatterer round trip."""
    g = cfg.grid
    corners_x = (g.x_coords_m[0], g.x_coords_m[-1])
    z_max = g.z_coords_m[-1]
    tau_max = 0.0
    for x in corners_x:
        for xi in (cfg.probe.element_positions_m[0],
                   cfg.probe.element_positions_m[-1]):
            tau = propagation_delay(x, z_max, xi, acq.steer_angle_rad,
                                    acq.sound_speed_mps)
            tau_max = max(tau_max, float(tau))
    tail = 8.0 * cfg.pulse.sigma_t_s
    return (tau_max + tail) * cfg.duration_margin


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    angle = (math.radians(args.angle_deg) if args.angle_deg is not None
             else cfg.acquisition.steer_angle_rad)
    acq = cfg.steered(angle)
    seed = args.seed if args.seed is not None else cfg.seed
    g = cfg.grid
    extent = (float(g.x_coords_m[0]), float(g.x_coords_m[-1]),
              float(g.z_coords_m[0]), float(g.z_coords_m[-1]))

    if args.phantom_csv:
        phantom = phantom_from_csv(args.phantom_csv)
    elif args.phantom_image:
        img = load_grayscale(args.phantom_image)
        phantom = phantom_from_image(img, extent, cfg.density_per_cell,
                                     cfg.probe, acq, seed)
    else:
        phantom = phantom_point_targets((cfg.points_min, cfg.points_max),
                                        extent, seed)
    if args.phantom_out:
        phantom_to_csv(phantom, args.phantom_out)

    cube = synth_channel_data(phantom, cfg.probe, acq, cfg.pulse,
                              _sim_duration(cfg, acq))
    meta = {"kind": "channel_data", "t0_s": repr(cube.t0_s)}
    meta.update(_acq_meta(acq))
    meta.update(_grid_meta(g))
    ubf_write(args.out, cube.traces, meta)
    return 0


def _load_cube(path, cfg):
    arr, meta = ubf_read(path)
    if meta.get("kind") != "channel_data":
        raise PwbeamError(f"{path}: expected kind=channel_data UBF")
    acq = _acq_from_meta(meta, cfg.acquisition)
    cube = ChannelDataCube(np.asarray(arr, dtype=float),
                           float(meta.get("t0_s", 0.0)),
                           acq.sampling_freq_hz)
    return cube, acq


def _cmd_beamform(args) -> int:
    cfg = load_config(args.config)
    grid = cfg.grid

    def das_one(path):
        cube, acq = _load_cube(path, cfg)
        aligned = align_channels(cube, cfg.probe, acq, grid)
        return das(aligned, cfg.apodization, cfg.probe)

    if args.method == "cpwc":
        frame = cpwc([das_one(p) for p in args.inputs])
    elif args.method == "das":
        if len(args.inputs) != 1:
            raise _UsageError("das takes exactly one --in file")
        frame = das_one(args.inputs[0])
    else:  # mv
        if len(args.inputs) != 1:
            raise _UsageError("mv takes exactly one --in file")
        cube, acq = _load_cube(args.inputs[0], cfg)
        aligned = align_channels(cube, cfg.probe, acq, grid)
        frame = mv_beamform(aligned, cfg.mv, cfg.probe, cfg.apodization.fnum)

    meta = {"kind": "beamformed_rf", "method": args.method}
    meta.update(_grid_meta(grid))
    ubf_write(args.out, frame.values, meta)
    return 0


def _cmd_groundtruth(args) -> int:
    cfg = load_config(args.config)
    phantom = phantom_from_csv(args.phantom)
    gt = ground_truth_image(phantom, cfg.psf, cfg.grid)
    meta = {"kind": "envelope", "method": "groundtruth"}
    meta.update(_grid_meta(cfg.grid))
    ubf_write(args.out, gt.values, meta)
    return 0


def _cmd_dataset_gen(args) -> int:
    cfg = load_config(args.config)
    g = cfg.grid
    extent = (float(g.x_coords_m[0]), float(g.x_coords_m[-1]),
              float(g.z_coords_m[0]), float(g.z_coords_m[-1]))
    images = []
    if args.images:
        names = sorted(
            f for f in os.listdir(args.images)
            if f.lower().endswith((".png", ".pgm"))
        )
        images = [os.path.join(args.images, f) for f in names]
    os.makedirs(args.out, exist_ok=True)

    patches = cfg.dataset_patches
    rows = []
    for i in range(args.count):
        seed = cfg.seed + i
        if i < len(images):
            img = load_grayscale(images[i])
            phantom = phantom_from_image(img, extent, cfg.density_per_cell,
                                         cfg.probe, cfg.acquisition, seed)
        else:
            phantom = phantom_point_targets((cfg.points_min, cfg.points_max),
                                            extent, seed)
        acq = cfg.acquisition
        cube = synth_channel_data(phantom, cfg.probe, acq, cfg.pulse,
                                  _sim_duration(cfg, acq))
        cube = normalize_channel_data(cube)
        aligned = align_channels(cube, cfg.probe, acq, g)
        inp = aligned.aligned
        peak = np.max(np.abs(inp))
        if peak > 0:
            inp = inp / peak  # network input contract: [-1, 1]
        target = ground_truth_image(phantom, cfg.psf, g).values

        nz_patch = g.nz // patches
        for p in range(patches):
            sl = slice(p * nz_patch, (p + 1) * nz_patch)
            in_path = os.path.join(args.out, f"input_{i:04d}_p{p}.ubf")
            tg_path = os.path.join(args.out, f"target_{i:04d}_p{p}.ubf")
            meta = {"kind": "aligned_rf", "patch": str(p), "item": str(i)}
            meta.update(_grid_meta(g))
            ubf_write(in_path, inp[:, sl, :], meta)
            meta_t = {"kind": "envelope", "patch": str(p), "item": str(i)}
            meta_t.update(_grid_meta(g))
            ubf_write(tg_path, target[sl, :], meta_t)
            rows.append((in_path, tg_path))

    manifest = os.path.join(args.out, "manifest.csv")
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["input_path", "target_path"])
        w.writerows(rows)
    return 0


def _load_envelope(path):
    arr, meta = ubf_read(path)
    nz, nx = arr.shape
    grid = _grid_from_meta(meta, nz, nx)
    from .core import BeamformedRF, EnvelopeImage  # local to avoid cycle noise

    kind = meta.get("kind", "envelope")
    if kind == "beamformed_rf":
        return envelope(BeamformedRF(np.asarray(arr, dtype=float), grid)), meta
    if kind == "envelope":
        return EnvelopeImage(np.asarray(arr, dtype=float), grid), meta
    raise PwbeamError(f"{path}: expected an envelope or beamformed_rf UBF")


def _cmd_metrics(args) -> int:
    env, meta = _load_envelope(args.env)
    roi = background = None
    if args.regions:
        roi, background = load_regions(args.regions, env.grid)

    fields = {
        "dataset_id": args.dataset_id,
        "method": args.method or meta.get("method", ""),
        "fwhm_a_mm": "",
        "fwhm_l_mm": "",
        "ssnr": "",
        "cr_db": "",
        "gcnr": "",
    }
    try:
        fa, fl = point_target_fwhm(env)
        fields["fwhm_a_mm"] = f"{fa * 1e3:.6g}"
        fields["fwhm_l_mm"] = f"{fl * 1e3:.6g}"
    except PwbeamError:
        pass  # no usable point target; leave resolution fields empty
    if background is not None:
        fields["ssnr"] = f"{ssnr(env, background):.6g}"
    if roi is not None and background is not None:
        value = cr(env, roi, background)
        fields["cr_db"] = (f"< -{args.dr:g}" if value == float("-inf")
                           else f"{value:.6g}")
        fields["gcnr"] = f"{gcnr(env, roi, background, args.bins):.6g}"

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fields))
        w.writeheader()
        w.writerow(fields)

    if not args.no_figure:
        fig_path = os.path.splitext(args.out)[0] + "_report.png"
        report.save_metrics_figure(env, fig_path, roi, background, args.bins,
                                   title=fields["method"] or "image metrics")
    return 0


def _cmd_render(args) -> int:
    env, _meta = _load_envelope(args.input)
    bmode = log_compress(env, args.dr)
    export_bmode_png(bmode, args.out)
    if args.figure:
        report.save_bmode_figure(bmode, args.figure)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="pwbeam", description="plane-wave beamforming toolkit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("simulate", help="synthesize plane-wave channel data")
    p.add_argument("--config", required=True)
    p.add_argument("--phantom-image")
    p.add_argument("--phantom-csv")
    p.add_argument("--phantom-out")
    p.add_argument("--angle-deg", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("beamform", help="DAS / CPWC / MV beamforming")
    p.add_argument("--method", required=True, choices=("das", "cpwc", "mv"))
    p.add_argument("--in", dest="inputs", action="append", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_beamform)

    p = sub.add_parser("groundtruth", help="ideal-PSF ground-truth envelope")
    p.add_argument("--phantom", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_groundtruth)

    p = sub.add_parser("dataset-gen", help="paired training data + manifest")
    p.add_argument("--images")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_dataset_gen)

    p = sub.add_parser("metrics", help="FWHM / SSNR / CR / gCNR to CSV")
    p.add_argument("--env", required=True)
    p.add_argument("--regions")
    p.add_argument("--out", required=True)
    p.add_argument("--dataset-id", default="")
    p.add_argument("--method", default="")
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--dr", type=float, default=60.0)
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("render", help="B-mode PNG from RF or envelope UBF")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--dr", type=float, default=60.0)
    p.add_argument("--out", required=True)
    p.add_argument("--figure")
    p.set_defaults(func=_cmd_render)

    return parser


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except PwbeamError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: IoFailure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
