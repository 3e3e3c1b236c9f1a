"""Report figures.  Floating point enters here only for drawing."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import PolyCollection  # noqa: E402

from .geometry import PLUS  # noqa: E402


def _tri_array(tiles, scale: float = 1.0) -> np.ndarray:
    return np.array([[(float(v.x) / scale, float(v.y) / scale) for v in t.vertices()] for t in tiles])


def plot_patch(tiles, path, labels=None, scale: float = 1.0, title: str | None = None) -> Path:
    """Tiles as filled triangles, coloured by class label or by chirality."""
    tris = _tri_array(tiles, scale)
    fig, ax = plt.subplots(figsize=(7, 7))
    if labels is None:
        colors = ["#d9a441" if t.chirality == PLUS else "#3c6e9f" for t in tiles]
        coll = PolyCollection(tris, facecolors=colors, edgecolors="k", linewidths=0.2)
    else:
        vals = np.array([-1 if lab is None else lab for lab in labels], dtype=float)
        masked = np.ma.masked_less(vals, 0)
        coll = PolyCollection(tris, array=masked, cmap="viridis", edgecolors="k", linewidths=0.2)
        coll.cmap.set_bad("#dddddd")
        fig.colorbar(coll, ax=ax, shrink=0.7, label="collared class")
    ax.add_collection(coll)
    ax.autoscale_view()
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_corona_sheet(classes, path, columns: int = 12) -> Path:
    """Every collared class: centre tile dark, its corona light."""
    classes = list(classes)
    rows = -(-len(classes) // columns)
    fig, axes = plt.subplots(rows, columns, figsize=(columns * 1.3, rows * 1.3))
    for ax in np.ravel(axes):
        ax.axis("off")
    for c, ax in zip(classes, np.ravel(axes)):
        tiles = c.representative.tiles
        tris = _tri_array(tiles)
        light = ["#f0d9a8" if t.chirality == PLUS else "#b7cde3" for t in tiles]
        light[0] = "#8a5a00" if tiles[0].chirality == PLUS else "#1d3f66"
        ax.add_collection(PolyCollection(tris, facecolors=light, edgecolors="k", linewidths=0.3))
        ax.autoscale_view()
        ax.set_aspect("equal")
        ax.set_title(str(c.id), fontsize=7)
    return _save(fig, path)


def plot_alpha(alpha_prime, partners, path) -> Path:
    """Integer eigenvector entries by class, with mirror partners overlaid."""
    ap = np.array(alpha_prime)
    idx = np.arange(len(ap))
    fig, ax = plt.subplots(figsize=(10, 3.5))
    ax.bar(idx, ap, color="#3c6e9f", width=0.8, label="class")
    ax.plot(idx, ap[np.array(partners)], "o", ms=3, color="#d9a441", label="mirror partner")
    ax.set_xlabel("collared class id")
    ax.set_ylabel("D · α")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_frequencies(exact, empirical, path, tolerance: float | None = None) -> Path:
    """Empirical class frequencies against the exact eigenvector."""
    x = np.array([float(a) for a in exact])
    y = np.array([float(a) for a in empirical])
    fig, ax = plt.subplots(figsize=(5, 5))
    top = max(x.max(), y.max()) * 1.05
    ax.plot([0, top], [0, top], color="0.6", lw=0.8)
    if tolerance is not None:
        ax.fill_between([0, top], [-tolerance, top - tolerance], [tolerance, top + tolerance], color="0.9")
    ax.plot(x, y, ".", color="#3c6e9f")
    ax.set_xlim(0, top)
    ax.set_ylim(0, top)
    ax.set_xlabel("exact frequency α_i")
    ax.set_ylabel("observed frequency")
    ax.set_aspect("equal")
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
