"""Dense Hermitian eigendecomposition and Fermi-level bookkeeping.

The Bott route is a dense-matrix formula: every index evaluation starts
from a full diagonalization of H, and the occupied eigenvectors form the
partial isometry W that compresses observables to the occupied subspace.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # orthonormal columns, matching values


@dataclass(frozen=True)
class FermiData:
    """Occupied subspace at a Fermi level.

    W holds the eigenvectors with eigenvalue strictly below fermi_level
    (ties are unoccupied); it is a partial isometry, W^dagger W = I_m.
    """

    fermi_level: float
    m: int
    W: np.ndarray

    @property
    def empty(self) -> bool:
        return self.m == 0

    @property
    def full(self) -> bool:
        return self.m == self.W.shape[0]


def diagonalize(H) -> EigenDecomposition:
    """Full dense Hermitian eigendecomposition, eigenvalues ascending."""
    dense = H.toarray() if sp.issparse(H) else np.asarray(H)
    if not np.all(np.isfinite(dense)):
        raise ValueError("operator contains non-finite entries")
    values, vectors = np.linalg.eigh(dense)
    return EigenDecomposition(values=values, vectors=vectors)


def fermi_basis(eig: EigenDecomposition, fermi_level: float) -> FermiData:
    """Select eigenvectors strictly below the Fermi level.

    m may be 0 (empty band) or n (everything occupied); index routines
    short-circuit both to 0.
    """
    m = int(np.searchsorted(eig.values, fermi_level, side="left"))
    return FermiData(fermi_level=float(fermi_level), m=m, W=eig.vectors[:, :m])


def compress(fermi: FermiData, op) -> np.ndarray:
    """W^dagger Op W, the matrix of the band-compressed operator.

    No unitarization is applied.  Diagonal operators may be passed as a
    1-D array of diagonal entries.
    """
    W = fermi.W
    op = np.asarray(op.toarray()) if sp.issparse(op) else np.asarray(op)
    if op.ndim == 1:
        if op.shape[0] != W.shape[0]:
            raise ValueError(f"diagonal of length {op.shape[0]} vs dimension {W.shape[0]}")
        return W.conj().T @ (op[:, None] * W)
    if op.shape != (W.shape[0], W.shape[0]):
        raise ValueError(f"operator shape {op.shape} vs dimension {W.shape[0]}")
    return W.conj().T @ op @ W


def projector(fermi: FermiData) -> np.ndarray:
    """Fermi projector P = W W^dagger onto the occupied subspace."""
    return fermi.W @ fermi.W.conj().T


def write_eigenvalues_csv(eig: EigenDecomposition, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "eigenvalue"])
        for i, v in enumerate(eig.values):
            writer.writerow([i, repr(float(v))])
