"""Matplotlib report figures rendered next to the delimited outputs.

Figures are PNG via the Agg backend with empty metadata, so repeated runs
produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = dict(dpi=110, metadata={})


def save_bmode_figure(bmode, path, title="B-mode"):
    """Annotated B-mode figure with mm axes and a dB colorbar."""
    g = bmode.grid
    extent = [g.x_coords_m[0] * 1e3, g.x_coords_m[-1] * 1e3,
              g.z_coords_m[-1] * 1e3, g.z_coords_m[0] * 1e3]
    fig, ax = plt.subplots(figsize=(5, 5))
    im = ax.imshow(bmode.values, cmap="gray", extent=extent, aspect="equal",
                   vmin=-bmode.dynamic_range_db, vmax=0.0)
    ax.set_xlabel("lateral [mm]")
    ax.set_ylabel("depth [mm]")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="dB")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_metrics_figure(env, path, roi=None, background=None, bins=100,
                        title="image metrics"):
    """Peak profiles plus, when regions are given, their envelope histograms."""
    g = env.grid
    iz, ix = np.unravel_index(np.argmax(env.values), env.values.shape)
    n_panels = 3 if (roi is not None and background is not None) else 2
    fig, axes = plt.subplots(1, n_panels, figsize=(4 * n_panels, 3.4))

    axes[0].plot(g.z_coords_m * 1e3, env.values[:, ix])
    axes[0].set_xlabel("depth [mm]")
    axes[0].set_ylabel("envelope")
    axes[0].set_title("axial profile @ peak")

    axes[1].plot(g.x_coords_m * 1e3, env.values[iz, :])
    axes[1].set_xlabel("lateral [mm]")
    axes[1].set_title("lateral profile @ peak")

    if n_panels == 3:
        a = env.values[roi.mask]
        b = env.values[background.mask]
        lo, hi = min(a.min(), b.min()), max(a.max(), b.max())
        if hi <= lo:
            hi = lo + 1.0
        edges = np.linspace(lo, hi, bins + 1)
        axes[2].hist(a, bins=edges, alpha=0.6, density=True, label="ROI")
        axes[2].hist(b, bins=edges, alpha=0.6, density=True, label="background")
        axes[2].set_xlabel("envelope")
        axes[2].set_title("region histograms")
        axes[2].legend()

    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
