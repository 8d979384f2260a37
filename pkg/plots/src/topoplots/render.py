"""Render figures from topoindex artifacts.

Rendering is read-only over the artifacts and deterministic: SVG
timestamps are disabled, ids are salted with the input checksum, and the
checksum itself is embedded in the image metadata of both output formats.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .recipes import FigureRecipe, read_csv_columns

# fixed mapping: index 0 blue, 1 red, gap <= tau black; other indices get
# a distinct hue cycle
INDEX_COLORS = {0: (0.05, 0.25, 0.95), 1: (0.95, 0.10, 0.10)}
HUE_CYCLE = [
    (0.10, 0.75, 0.20),  # green
    (0.95, 0.60, 0.05),  # orange
    (0.60, 0.20, 0.80),  # purple
    (0.05, 0.80, 0.80),  # cyan
    (0.90, 0.30, 0.70),  # magenta
    (0.55, 0.55, 0.10),  # olive
]


def color_for_index(index) -> tuple:
    if index in INDEX_COLORS:
        return INDEX_COLORS[index]
    return HUE_CYCLE[int(index) % len(HUE_CYCLE)]


def _inputs_checksum(paths) -> str:
    digest = hashlib.sha256()
    for path in paths:
        digest.update(Path(path).read_bytes())
    return digest.hexdigest()


def _floats(values):
    return np.array([float(v) for v in values])


def _draw_sweep_curves(ax, recipe):
    for i, path in enumerate(recipe.inputs):
        table = read_csv_columns(path, ["ef", "mean_index"])
        ef = _floats(table["ef"])
        mean = _floats(table["mean_index"])
        order = np.argsort(ef)
        label = recipe.labels[i] if i < len(recipe.labels) else Path(path).stem
        ax.plot(ef[order], mean[order], marker="o", markersize=3, label=label)
    ax.set_xlabel(r"$E_F$")
    ax.set_ylabel("mean index")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)


def _draw_reference(ax, Ls, coefficient, exponent):
    if coefficient > 0 and exponent > 0:
        grid = np.geomspace(min(Ls), max(Ls), 64)
        ax.plot(grid, coefficient * grid**exponent, ":k",
                label=f"$y = {coefficient:g}\\,L^{{{exponent:g}}}$")


def _draw_loglog_timing(ax, recipe):
    all_L = []
    for path in recipe.inputs:
        table = read_csv_columns(path, ["L", "phase", "mean_seconds"])
        L = _floats(table["L"])
        secs = _floats(table["mean_seconds"])
        phases = table["phase"]
        for phase in sorted(set(phases)):
            mask = np.array([p == phase for p in phases])
            order = np.argsort(L[mask])
            ax.plot(L[mask][order], secs[mask][order], marker="s",
                    markersize=4, label=phase)
        all_L.extend(L)
    _draw_reference(ax, all_L, recipe.reference_coefficient,
                    recipe.reference_exponent)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("L")
    ax.set_ylabel("seconds")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3, which="both")


def _draw_loglog_error(ax, recipe):
    all_L = []
    for path in recipe.inputs:
        table = read_csv_columns(path, ["L", "mean_error"])
        L = _floats(table["L"])
        err = _floats(table["mean_error"])
        order = np.argsort(L)
        ax.plot(L[order], err[order], marker="o", markersize=4,
                label=Path(path).stem)
        all_L.extend(L)
    _draw_reference(ax, all_L, recipe.reference_coefficient,
                    recipe.reference_exponent)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("L")
    ax.set_ylabel("distance to nearest integer")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3, which="both")


def _slice_arrays(path):
    """gap.csv -> (l1 axis, l2 axis, gap grid)."""
    table = read_csv_columns(path, ["l1", "l2", "l3", "gap"])
    l1 = _floats(table["l1"])
    l2 = _floats(table["l2"])
    gap = _floats(table["gap"])
    a1 = np.unique(l1)
    a2 = np.unique(l2)
    grid = np.full((len(a2), len(a1)), np.nan)
    i = np.searchsorted(a1, l1)
    j = np.searchsorted(a2, l2)
    grid[j, i] = gap
    return a1, a2, grid


def _regions_arrays(path):
    """regions.csv -> (l1 axis, l2 axis, index grid with nan = unlabeled)."""
    table = read_csv_columns(path, ["l1", "l2", "l3", "region", "index"])
    l1 = _floats(table["l1"])
    l2 = _floats(table["l2"])
    idx = np.array([float(v) if v != "" else np.nan for v in table["index"]])
    a1 = np.unique(l1)
    a2 = np.unique(l2)
    grid = np.full((len(a2), len(a1)), np.nan)
    i = np.searchsorted(a1, l1)
    j = np.searchsorted(a2, l2)
    grid[j, i] = idx
    return a1, a2, grid


def _nearest_resample(src_axis1, src_axis2, src, dst_axis1, dst_axis2):
    """Nearest-neighbor resample of src onto the destination grid axes."""
    i = np.clip(np.searchsorted(src_axis1, dst_axis1), 0, len(src_axis1) - 1)
    i_lo = np.clip(i - 1, 0, len(src_axis1) - 1)
    i = np.where(np.abs(src_axis1[i_lo] - dst_axis1)
                 <= np.abs(src_axis1[i] - dst_axis1), i_lo, i)
    j = np.clip(np.searchsorted(src_axis2, dst_axis2), 0, len(src_axis2) - 1)
    j_lo = np.clip(j - 1, 0, len(src_axis2) - 1)
    j = np.where(np.abs(src_axis2[j_lo] - dst_axis2)
                 <= np.abs(src_axis2[j] - dst_axis2), j_lo, j)
    return src[np.ix_(j, i)]


def _draw_slice_heatmap(ax, recipe):
    a1, a2, gap = _slice_arrays(recipe.inputs[0])
    mesh = ax.pcolormesh(a1, a2, gap, cmap="gray", shading="nearest")
    plt.colorbar(mesh, ax=ax, label="localizer gap")
    ax.set_xlabel(r"$\lambda_1$")
    ax.set_ylabel(r"$\lambda_2$")
    ax.set_aspect("equal")


def _draw_slice_overlay(ax, recipe):
    """Darken-only composite of the index colors over the gap brightness:
    blue for index 0, red for index 1, black where gap <= tau."""
    if len(recipe.inputs) < 2:
        raise ValueError("slice-overlay needs gap.csv and regions.csv inputs")
    a1, a2, gap = _slice_arrays(recipe.inputs[0])
    r1, r2, idx = _regions_arrays(recipe.inputs[1])
    if idx.shape != gap.shape or not (np.array_equal(r1, a1) and np.array_equal(r2, a2)):
        idx = _nearest_resample(r1, r2, idx, a1, a2)

    # brightness saturates at a robust mid-scale so interior plateaus stay
    # fully lit even when the exterior gap grows with distance
    trusted = gap[gap > recipe.tau]
    scale = np.percentile(trusted, 75) if trusted.size else 1.0
    brightness = np.clip(gap / scale, 0.0, 1.0) if scale > 0 else np.zeros_like(gap)
    rgb = np.repeat(brightness[:, :, None], 3, axis=2)
    labeled = ~np.isnan(idx)
    for value in np.unique(idx[labeled]):
        color = np.array(color_for_index(int(value)))
        mask = labeled & (idx == value)
        # darken-only: each channel can only get darker than the gap gray
        rgb[mask] = np.minimum(rgb[mask], color[None, :])
    rgb[gap <= recipe.tau] = 0.0
    extent = (a1[0], a1[-1], a2[0], a2[-1])
    ax.imshow(rgb, origin="lower", extent=extent, interpolation="nearest")
    ax.set_xlabel(r"$\lambda_1$")
    ax.set_ylabel(r"$\lambda_2$")
    ax.set_aspect("equal")


DRAWERS = {
    "sweep-curves": _draw_sweep_curves,
    "loglog-timing": _draw_loglog_timing,
    "loglog-error": _draw_loglog_error,
    "slice-heatmap": _draw_slice_heatmap,
    "slice-overlay": _draw_slice_overlay,
}


def render(recipe: FigureRecipe):
    """Render the recipe to <output>.png and <output>.svg.

    Returns the two written paths.  Identical inputs produce identical
    bytes: timestamps are suppressed and SVG ids are salted with the input
    checksum, which is also embedded in both files' metadata.
    """
    checksum = _inputs_checksum(recipe.inputs)
    plt.rcParams["svg.hashsalt"] = checksum

    fig, ax = plt.subplots(figsize=(5.2, 4.0), dpi=150)
    try:
        DRAWERS[recipe.kind](ax, recipe)
        fig.tight_layout()
        stem = Path(recipe.output)
        if stem.suffix:
            stem = stem.with_suffix("")
        png = stem.with_suffix(".png")
        svg = stem.with_suffix(".svg")
        fig.savefig(png, metadata={"Software": "topoplots",
                                   "InputsChecksum": checksum})
        fig.savefig(svg, metadata={"Date": None,
                                   "Description": f"inputs sha256 {checksum}"})
    finally:
        plt.close(fig)
    return png, svg
