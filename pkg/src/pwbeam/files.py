"""File ingestion/export helpers: grayscale images, phantom CSV, exact B-mode
PNG, and region definition files."""

from __future__ import annotations

import csv

import numpy as np
from PIL import Image

from .core import BModeImage, Phantom
from .errors import ConfigError, IoFailure
from .config import parse_kv_file
from .metrics import annulus_mask, disk_mask


def load_grayscale(path) -> np.ndarray:
    """Load a PGM (P2/P5) or 8-bit grayscale PNG as floats in [0, 1].

    Color inputs are converted to luminance. Rows map to the axial direction,
    columns to lateral.
    """
    try:
        with Image.open(path) as im:
            im = im.convert("L")
            arr = np.asarray(im, dtype=float)
    except OSError as exc:
        raise IoFailure(f"cannot read image {path}: {exc}") from None
    return arr / 255.0


def phantom_to_csv(phantom: Phantom, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x_m", "z_m", "amplitude"])
        for x, z, a in zip(phantom.x_m, phantom.z_m, phantom.amplitude):
            w.writerow([repr(float(x)), repr(float(z)), repr(float(a))])


def phantom_from_csv(path, extent=None) -> Phantom:
    xs, zs, amps = [], [], []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) < {"x_m", "z_m", "amplitude"}:
            raise IoFailure(f"{path}: expected columns x_m, z_m, amplitude")
        for row in reader:
            xs.append(float(row["x_m"]))
            zs.append(float(row["z_m"]))
            amps.append(float(row["amplitude"]))
    x = np.asarray(xs)
    z = np.asarray(zs)
    if extent is None:
        pad = 1e-9
        extent = (x.min() - pad, x.max() + pad, z.min() - pad, z.max() + pad) \
            if x.size else (0.0, 1e-3, 1e-6, 1e-3)
    return Phantom(x, z, np.asarray(amps), extent)


def export_bmode_png(bmode: BModeImage, path) -> None:
    """8-bit grayscale PNG: gray = round(255 * (value + DR) / DR)."""
    dr = bmode.dynamic_range_db
    gray = np.round(255.0 * (bmode.values + dr) / dr)
    gray = np.clip(gray, 0, 255).astype(np.uint8)
    try:
        Image.fromarray(gray, mode="L").save(path, format="PNG")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def load_regions(path, grid):
    """Region definition file -> (roi mask or None, background mask or None).

    Keys (mm units):
      roi.kind = disk           roi.x_mm, roi.z_mm, roi.r_mm
      background.kind = annulus background.x_mm, .z_mm, .r_inner_mm, .r_outer_mm
      background.kind = disk    background.x_mm, .z_mm, .r_mm
    """
    kv = parse_kv_file(path)

    def build(prefix, role):
        kind = kv.get(f"{prefix}.kind")
        if kind is None:
            return None
        cx = float(kv[f"{prefix}.x_mm"]) * 1e-3
        cz = float(kv[f"{prefix}.z_mm"]) * 1e-3
        if kind == "disk":
            return disk_mask(grid, (cx, cz), float(kv[f"{prefix}.r_mm"]) * 1e-3, role)
        if kind == "annulus":
            return annulus_mask(
                grid, (cx, cz),
                float(kv[f"{prefix}.r_inner_mm"]) * 1e-3,
                float(kv[f"{prefix}.r_outer_mm"]) * 1e-3,
                role,
            )
        raise ConfigError(f"{path}: unknown region kind {kind!r}")

    try:
        return build("roi", "roi"), build("background", "background")
    except KeyError as exc:
        raise ConfigError(f"{path}: missing region key {exc}") from None


__all__ = [
    "load_grayscale", "phantom_to_csv", "phantom_from_csv",
    "export_bmode_png", "load_regions",
]
