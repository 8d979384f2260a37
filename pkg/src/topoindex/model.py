"""Square-lattice Chern-insulator model with disorder.

Two orbitals per site on an L x L square lattice, periodic or open
boundaries, optionally with a disk-shaped hole cut out of the center.
The on-site block is (M - 4B) sigma_z + W_j I_2 with W_j uniform on
[-width/2, width/2]; the hopping block to the right neighbor is
B sigma_z - i A sigma_x and to the upper neighbor B sigma_z - i A sigma_y,
so the clean Bloch Hamiltonian is

    h(k) = 2A sin(kx) sigma_x + 2A sin(ky) sigma_y
         + (M - 4B + 2B cos(kx) + 2B cos(ky)) sigma_z.

At the default constants A=1, B=-1, C=0, M=-2 the clean system is gapped
at E=0 (band edges at +-2) and the occupied band carries Chern number +1.
The constant C is carried but enters no Hamiltonian term.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import EmptyLatticeError

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

BOUNDARIES = ("periodic", "open")


@dataclass(frozen=True)
class ModelSpec:
    """Model parameters; the source of every operator in the package."""

    L: int
    boundary: str = "periodic"
    A: float = 1.0
    B: float = -1.0
    C: float = 0.0
    M: float = -2.0
    disorder_width: float = 8.0
    seed: int = 0
    hole_radius: float = 0.0

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.disorder_width < 0:
            raise ValueError("disorder_width must be nonnegative")
        if self.hole_radius < 0:
            raise ValueError("hole_radius must be nonnegative")
        if self.hole_radius > 0 and self.boundary != "open":
            raise ValueError("hole_radius > 0 requires open boundary")

    def to_json(self) -> str:
        return json.dumps(
            {
                "L": self.L,
                "boundary": self.boundary,
                "A": self.A,
                "B": self.B,
                "C": self.C,
                "M": self.M,
                "disorder_width": self.disorder_width,
                "seed": self.seed,
                "hole_radius": self.hole_radius,
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        data = json.loads(text)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "L" not in data:
            raise ValueError("config is missing required key 'L'")
        data["L"] = int(data["L"])
        if "seed" in data:
            data["seed"] = int(data["seed"])
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ModelSpec":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass(frozen=True)
class Lattice:
    """Site geometry derived from a ModelSpec.

    Positions are site index minus (L-1)/2 per axis, so even-L lattices
    have half-integer coordinates and no site at the origin.  The hole
    (if any) is centered by construction; positions are not re-centered
    after deletion.
    """

    L: int
    boundary: str
    sites: np.ndarray        # (n_sites, 2) integer (ix, iy)
    positions: np.ndarray    # (n_sites, 2) centered real (x, y)
    edges: np.ndarray        # (n_edges, 3) = (site j, site k, direction) with 0=right, 1=up
    orbitals_per_site: int = 2

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dim(self) -> int:
        return self.orbitals_per_site * self.n_sites


EDGE_RIGHT = 0
EDGE_UP = 1


def build_lattice(spec: ModelSpec) -> Lattice:
    """Enumerate sites in raster order and nearest-neighbor edges.

    Periodic boundaries wrap (an L x L torus has exactly 2L^2 edges);
    open boundaries drop the wrap edges.  Sites within hole_radius of
    the center are deleted along with their incident edges.
    """
    L = spec.L
    ix = np.tile(np.arange(L), L)
    iy = np.repeat(np.arange(L), L)
    center = (L - 1) / 2.0
    pos = np.stack([ix - center, iy - center], axis=1)

    keep = np.ones(L * L, dtype=bool)
    if spec.hole_radius > 0:
        keep = np.hypot(pos[:, 0], pos[:, 1]) > spec.hole_radius
        if not keep.any():
            raise EmptyLatticeError(
                f"hole_radius={spec.hole_radius} deletes all {L * L} sites"
            )

    # map raster index -> surviving site index
    new_index = -np.ones(L * L, dtype=np.int64)
    new_index[keep] = np.arange(int(keep.sum()))

    periodic = spec.boundary == "periodic"
    raster = np.arange(L * L)
    edges = []
    for direction, (dx, dy) in ((EDGE_RIGHT, (1, 0)), (EDGE_UP, (0, 1))):
        if periodic:
            mask = np.ones(L * L, dtype=bool)
        else:
            mask = (ix + dx < L) & (iy + dy < L)
        j = raster[mask]
        k = ((ix[mask] + dx) % L) + L * ((iy[mask] + dy) % L)
        ok = keep[j] & keep[k]
        for a, b in zip(new_index[j[ok]], new_index[k[ok]]):
            edges.append((a, b, direction))

    sites = np.stack([ix[keep], iy[keep]], axis=1)
    return Lattice(
        L=L,
        boundary=spec.boundary,
        sites=sites,
        positions=pos[keep],
        edges=np.array(edges, dtype=np.int64).reshape(-1, 3),
    )


@dataclass(frozen=True)
class DisorderField:
    """Per-site on-site disorder values W_j."""

    w: np.ndarray
    sample_index: int
    seed: int


def sample_disorder(spec: ModelSpec, sample_index: int) -> DisorderField:
    """Draw the i.i.d. uniform on-site disorder for one sample.

    Deterministic function of (spec.seed, sample_index): a Philox stream
    keyed by SeedSequence(seed, spawn_key=(sample_index,)) produces L^2
    values in raster order; sites deleted by a hole keep the value of
    their raster slot, so the field at a site does not depend on the
    hole geometry.
    """
    ss = np.random.SeedSequence(entropy=spec.seed, spawn_key=(sample_index,))
    rng = np.random.Generator(np.random.Philox(ss))
    half = spec.disorder_width / 2.0
    full = rng.uniform(-half, half, spec.L * spec.L)
    if spec.hole_radius > 0:
        lattice = build_lattice(spec)
        raster = lattice.sites[:, 0] + spec.L * lattice.sites[:, 1]
        full = full[raster]
    return DisorderField(w=full, sample_index=sample_index, seed=spec.seed)


def _hermitian_from_lower(n, entries):
    """Assemble a CSR matrix from lower-triangle entries {(r, c): v}, r >= c,
    mirroring conjugates so stored values are bitwise conjugate-symmetric."""
    rows, cols, vals = [], [], []
    for (r, c), v in entries.items():
        rows.append(r)
        cols.append(c)
        vals.append(v)
        if r != c:
            rows.append(c)
            cols.append(r)
            vals.append(np.conj(v))
    mat = sp.coo_matrix(
        (np.array(vals, dtype=complex), (np.array(rows), np.array(cols))),
        shape=(n, n),
    ).tocsr()
    # duplicates were already merged in the dict; explicit zeros are kept
    return mat


def build_hamiltonian(spec: ModelSpec, lattice: Lattice, w: DisorderField) -> sp.csr_matrix:
    """Sparse Hamiltonian with 2x2 blocks per site and per edge.

    Blocks are stored dense (explicit zeros kept), so the clean periodic
    matrix has exactly 4*sites + 8*edges stored entries.  Hermiticity is
    exact at the bit level: each block is accumulated on the lower
    triangle and mirrored by conjugation.
    """
    if len(w.w) != lattice.n_sites:
        raise ValueError(
            f"disorder field has {len(w.w)} values for {lattice.n_sites} sites"
        )
    A, B, M = spec.A, spec.B, spec.M
    onsite_clean = (M - 4 * B) * SIGMA_Z
    hop = {
        EDGE_RIGHT: B * SIGMA_Z - 1j * A * SIGMA_X,
        EDGE_UP: B * SIGMA_Z - 1j * A * SIGMA_Y,
    }

    entries = {}

    def add(r, c, v):
        # keep only the lower triangle; the mirror is emitted at the end
        if r < c:
            r, c, v = c, r, np.conj(v)
        key = (r, c)
        entries[key] = entries.get(key, 0.0 + 0.0j) + v

    for s in range(lattice.n_sites):
        blk = onsite_clean + w.w[s] * SIGMA_0
        base = 2 * s
        for a in range(2):
            for b in range(2):
                if a >= b:
                    add(base + a, base + b, blk[a, b])
                # upper on-site entries arrive via the mirror of (b, a)

    for j, k, direction in lattice.edges:
        blk = hop[direction]
        for a in range(2):
            for b in range(2):
                add(2 * j + a, 2 * k + b, blk[a, b])

    return _hermitian_from_lower(lattice.dim, entries)


def position_operators(lattice: Lattice, scaling: str = "raw", kappa: float | None = None):
    """Diagonal position operators (X, Y), each site's coordinate repeated
    for both orbitals.

    scaling: 'raw' (centered lattice units), 'two_over_L' (multiplies by
    2/L so open squares satisfy -1 <= X0 <= 1), or 'kappa' with kappa > 0.
    """
    if scaling == "raw":
        factor = 1.0
    elif scaling == "two_over_L":
        factor = 2.0 / lattice.L
    elif scaling == "kappa":
        if kappa is None or kappa <= 0:
            raise ValueError(f"kappa scaling requires kappa > 0, got {kappa}")
        factor = float(kappa)
    else:
        raise ValueError(f"unknown scaling {scaling!r}")
    x = np.repeat(lattice.positions[:, 0] * factor, lattice.orbitals_per_site)
    y = np.repeat(lattice.positions[:, 1] * factor, lattice.orbitals_per_site)
    return sp.diags(x).tocsr(), sp.diags(y).tocsr()


@dataclass(frozen=True)
class PeriodicObservables:
    """Exponentiated positions U, V and their Hermitian cos/sin parts."""

    U: np.ndarray   # diagonal entries
    V: np.ndarray
    M1: np.ndarray  # cos part of U
    M2: np.ndarray  # sin part of U
    M3: np.ndarray  # cos part of V
    M4: np.ndarray  # sin part of V


def periodic_observables(lattice: Lattice, L: int | None = None) -> PeriodicObservables:
    """U = exp(2 pi i X / L), V = exp(2 pi i Y / L) as diagonal phase vectors.

    Uses the raw integer site coordinates, so the phases are exactly L-th
    roots of unity (a site at x=0 maps to 1).  Only defined on the torus.
    """
    if lattice.boundary != "periodic":
        raise ValueError("periodic observables require periodic boundary")
    if L is None:
        L = lattice.L
    phase_x = np.repeat(
        np.exp(2j * np.pi * lattice.sites[:, 0] / L), lattice.orbitals_per_site
    )
    phase_y = np.repeat(
        np.exp(2j * np.pi * lattice.sites[:, 1] / L), lattice.orbitals_per_site
    )
    return PeriodicObservables(
        U=phase_x,
        V=phase_y,
        M1=phase_x.real,
        M2=phase_x.imag,
        M3=phase_y.real,
        M4=phase_y.imag,
    )


def write_triplets(op, path) -> None:
    """Export a Hermitian operator in the sparse-triplet text format:
    header `n nnz`, then `row col re im` lines, 0-based, lower triangle only."""
    mat = sp.coo_matrix(op)
    mask = mat.row >= mat.col
    rows, cols, vals = mat.row[mask], mat.col[mask], mat.data[mask]
    order = np.lexsort((cols, rows))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{mat.shape[0]} {mask.sum()}\n")
        for r, c, v in zip(rows[order], cols[order], np.asarray(vals, dtype=complex)[order]):
            fh.write(f"{r} {c} {float(v.real)!r} {float(v.imag)!r}\n")


def read_triplets(path) -> sp.csr_matrix:
    """Read the sparse-triplet format back into a Hermitian CSR matrix."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        n, nnz = int(header[0]), int(header[1])
        rows, cols, vals = [], [], []
        for _ in range(nnz):
            r, c, re, im = fh.readline().split()
            r, c = int(r), int(c)
            v = complex(float(re), float(im))
            rows.append(r)
            cols.append(c)
            vals.append(v)
            if r != c:
                rows.append(c)
                cols.append(r)
                vals.append(np.conj(v))
    return sp.coo_matrix(
        (np.array(vals), (np.array(rows), np.array(cols))), shape=(n, n)
    ).tocsr()
