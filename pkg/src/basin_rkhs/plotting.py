"""Figures written next to the JSON reports."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "image.interpolation": "nearest",
}

# escaped, in basin, undecided (raster codes 0, 1, 2)
BASIN_CMAP = ListedColormap(["#000000", "#ffffff", "#808080"])
# no Software/date chunks so reruns give identical bytes
PNG_METADATA = {"Software": None}


def figsize(width: float = 4.5, ratio: float | None = None) -> tuple[float, float]:
    if ratio is None:
        ratio = (math.sqrt(5) - 1) / 2
    return width, width * ratio


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, metadata=PNG_METADATA if path.suffix == ".png" else None, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_basin(raster, path, title: str | None = None) -> Path:
    re_min, re_max, im_min, im_max = raster.bbox
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize(4.0, 1.0))
        ax.imshow(raster.codes, cmap=BASIN_CMAP, vmin=0, vmax=2, extent=(re_min, re_max, im_min, im_max), origin="upper")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_gram_defect(gram: np.ndarray, labels, path, title: str | None = None) -> Path:
    defect = np.abs(gram - np.eye(len(gram)))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize(4.5, 0.9))
        im = ax.imshow(np.log10(np.maximum(defect, 1e-17)), cmap="viridis", vmin=-17, vmax=0)
        ax.set_xticks(range(len(labels)), labels, rotation=60, ha="right")
        ax.set_yticks(range(len(labels)), labels)
        fig.colorbar(im, ax=ax, label="log10 |E - I|")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_scan(report, path, title: str | None = None) -> Path:
    """Deviation of each tested point from its condition, against |c|."""
    markers = {"dagger": "o", "ddagger": "s"}
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        for scan in report.scans:
            c = np.array([abs(w.point) for w in scan.per_point])
            dev = np.array([w.deviation for w in scan.per_point])
            ax.scatter(c, np.maximum(dev, 1e-17), s=10, marker=markers[scan.system], label=scan.system, alpha=0.7)
        if report.scans:
            ax.axhline(report.scans[0].per_point[0].tol, color="k", lw=0.8, ls="--", label="tolerance")
        ax.set_yscale("log")
        ax.set_xlabel("|c|")
        ax.set_ylabel("deviation")
        ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        return _save(fig, path)
