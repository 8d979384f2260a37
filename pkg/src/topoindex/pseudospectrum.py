"""Gridded Clifford-pseudospectrum gap fields with Lipschitz pruning, and
constant-index region labeling.

The gap is 1-Lipschitz in the probe: the Clifford generators are
anticommuting involutions, so ||L_lam - L_mu|| = ||lam - mu||_2 and a
large gap at one grid point certifies lower bounds on a whole
neighborhood.  Pruned points store that certified bound instead of a
computed value; traversal order never changes a computed value because
each point's gap is a pure function of the operators and the probe.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import SignatureError
from .localizer import LocalizerProbe, localizer_gap, localizer_index

STATUS_COMPUTED = "computed"
STATUS_PRUNED = "pruned-lower-bound"

# certified bounds are shaved by this to absorb eigensolver rounding, so
# "true gap >= stored bound" holds without a tolerance
BOUND_SAFETY = 1e-9

DEFAULT_PRUNING_CUTOFF = 0.05
DEFAULT_TAU = 1e-8
INDETERMINATE = None


@dataclass(frozen=True)
class GridSpec:
    """Probe grid: (l1, l2) in scaled position units, l3 in energy units.

    For 2D slices l3 is pinned to slice_value; for volumes all three axes
    are active with range3/resolution3.
    """

    range1: tuple
    range2: tuple
    resolution: int
    slice_value: float = 0.0
    range3: tuple | None = None
    resolution3: int | None = None

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2 per active axis")
        if self.range3 is not None and (self.resolution3 or 0) < 2:
            raise ValueError("resolution3 must be >= 2 for a volume grid")
        for rng in (self.range1, self.range2) + ((self.range3,) if self.range3 else ()):
            if not all(np.isfinite(rng)):
                raise ValueError(f"grid range {rng} is not finite")

    @property
    def is_volume(self) -> bool:
        return self.range3 is not None

    def axes(self):
        a1 = np.linspace(self.range1[0], self.range1[1], self.resolution)
        a2 = np.linspace(self.range2[0], self.range2[1], self.resolution)
        if self.is_volume:
            a3 = np.linspace(self.range3[0], self.range3[1], self.resolution3)
        else:
            a3 = np.array([self.slice_value])
        return a1, a2, a3

    def to_dict(self) -> dict:
        return {
            "range1": list(self.range1),
            "range2": list(self.range2),
            "resolution": self.resolution,
            "slice_value": self.slice_value,
            "range3": list(self.range3) if self.range3 else None,
            "resolution3": self.resolution3,
        }


@dataclass
class GapField:
    grid: GridSpec
    kappa: float
    values: np.ndarray    # gap or certified lower bound, shape (n1, n2, n3)
    computed: np.ndarray  # bool mask, True where the value is the actual gap
    pruning_cutoff: float

    def points(self):
        """Iterate (i, j, k, l1, l2, l3) over the grid in raster order."""
        a1, a2, a3 = self.grid.axes()
        for k, l3 in enumerate(a3):
            for j, l2 in enumerate(a2):
                for i, l1 in enumerate(a1):
                    yield i, j, k, l1, l2, l3


def _probe_grid(grid: GridSpec):
    a1, a2, a3 = grid.axes()
    pts = np.array([(x, y, z) for z in a3 for y in a2 for x in a1])
    shape = (len(a1), len(a2), len(a3))
    return pts, shape


def _coarse_mask(shape, stride=4):
    """Phase-1 decimated sub-grid, endpoints included on each axis."""
    mask = np.zeros(shape, dtype=bool)
    sel = [sorted(set(range(0, n, stride)) | {n - 1}) for n in shape]
    for i in sel[0]:
        for j in sel[1]:
            for k in sel[2]:
                mask[i, j, k] = True
    return mask


def _gap_field(X, Y, H, kappa, grid: GridSpec, pruning_cutoff: float) -> GapField:
    pts, shape = _probe_grid(grid)
    flat_n = len(pts)
    values = np.zeros(flat_n)
    computed = np.zeros(flat_n, dtype=bool)
    bounds = np.full(flat_n, -np.inf)

    def evaluate(flat_indices):
        for idx in flat_indices:
            l1, l2, l3 = pts[idx]
            probe = LocalizerProbe(lam=(l1, l2, l3), kappa=kappa)
            g = localizer_gap(X, Y, H, probe)
            values[idx] = g
            computed[idx] = True
            # monotone bound-map update: only ever raise a lower bound
            dist = np.linalg.norm(pts - pts[idx], axis=1)
            np.maximum(bounds, g - dist - BOUND_SAFETY, out=bounds)

    if pruning_cutoff > 0:
        # coarse-to-fine: decimated pass seeds the bound map, survivors fill
        # pts raster order is x fastest, so flatten with x innermost
        coarse = _coarse_mask(shape).transpose(2, 1, 0).reshape(-1)
        evaluate(np.flatnonzero(coarse))
        survivors = np.flatnonzero(~computed & (bounds <= pruning_cutoff))
        evaluate(survivors)
        pruned = ~computed
        values[pruned] = bounds[pruned]
    else:
        evaluate(np.arange(flat_n))

    # pts raster order is x fastest, then y, then z
    values3 = values.reshape(shape[::-1]).transpose(2, 1, 0)
    computed3 = computed.reshape(shape[::-1]).transpose(2, 1, 0)
    return GapField(
        grid=grid,
        kappa=kappa,
        values=values3,
        computed=computed3,
        pruning_cutoff=pruning_cutoff,
    )


def gap_slice(X, Y, H, kappa, grid: GridSpec,
              pruning_cutoff: float = 0.0) -> GapField:
    """2D gap field over (l1, l2) at l3 = grid.slice_value."""
    if grid.is_volume:
        raise ValueError("gap_slice requires a 2D grid (no range3)")
    return _gap_field(X, Y, H, kappa, grid, pruning_cutoff)


def gap_volume(X, Y, H, kappa, grid: GridSpec,
               pruning_cutoff: float = 0.0) -> GapField:
    """Coarse 3D gap field over (l1, l2, l3)."""
    if not grid.is_volume:
        raise ValueError("gap_volume requires a 3D grid (range3 set)")
    return _gap_field(X, Y, H, kappa, grid, pruning_cutoff)


@dataclass
class IndexedRegions:
    labels: np.ndarray           # component id per grid point, 0 = below threshold
    indices: dict                # component id -> index (or None if indeterminate)
    tau: float
    field: GapField

    @property
    def n_regions(self) -> int:
        return len(self.indices)


def index_regions(field: GapField, X, Y, H, kappa, tau: float = DEFAULT_TAU) -> IndexedRegions:
    """Label face-connected components of {gap > tau} and compute one
    localizer index per component at its max-gap point.

    Pruned points participate through their certified lower bound (which
    exceeds the pruning cutoff >= tau).  A component whose index
    evaluation flags a singular factorization is marked indeterminate.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    mask = field.values > tau
    structure = ndimage.generate_binary_structure(3, 1)  # face adjacency
    labels, n_regions = ndimage.label(mask, structure=structure)
    a1, a2, a3 = field.grid.axes()
    indices = {}
    for region in range(1, n_regions + 1):
        sel = labels == region
        vals = np.where(sel, field.values, -np.inf)
        i, j, k = np.unravel_index(np.argmax(vals), vals.shape)
        probe = LocalizerProbe(lam=(a1[i], a2[j], a3[k]), kappa=kappa)
        try:
            rep = localizer_index(X, Y, H, probe)
            indices[region] = INDETERMINATE if rep.singular_flag else rep.index
        except SignatureError:
            indices[region] = INDETERMINATE
    return IndexedRegions(labels=labels, indices=indices, tau=tau, field=field)


def write_gap_csv(field: GapField, path) -> None:
    """CSV columns l1,l2,l3,gap,status."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["l1", "l2", "l3", "gap", "status"])
        for i, j, k, l1, l2, l3 in field.points():
            status = STATUS_COMPUTED if field.computed[i, j, k] else STATUS_PRUNED
            writer.writerow([repr(float(l1)), repr(float(l2)), repr(float(l3)),
                             repr(float(field.values[i, j, k])), status])


def write_regions_csv(regions: IndexedRegions, path) -> None:
    """CSV columns l1,l2,l3,region,index; region 0 = below threshold,
    index empty when indeterminate or below threshold."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["l1", "l2", "l3", "region", "index"])
        for i, j, k, l1, l2, l3 in regions.field.points():
            region = int(regions.labels[i, j, k])
            idx = regions.indices.get(region, INDETERMINATE)
            writer.writerow([repr(float(l1)), repr(float(l2)), repr(float(l3)),
                             region, "" if idx is None else idx])


def write_sidecar(path, grid: GridSpec, kappa: float, tau: float,
                  config_hash: str, pruning_cutoff: float) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(
            {
                "grid": grid.to_dict(),
                "kappa": kappa,
                "tau": tau,
                "pruning_cutoff": pruning_cutoff,
                "config_hash": config_hash,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
