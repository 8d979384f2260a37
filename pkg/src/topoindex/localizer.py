"""Spectral localizer: assembly, signature index, gap, and the
perturbation certificate.

The localizer for observables (kappa X, kappa Y, H) at probe lambda is

    L = [[H - l3, (kX - l1) - i(kY - l2)], [(kX - l1) + i(kY - l2), -H + l3]]

i.e. (kX - l1) (x) sigma_x + (kY - l2) (x) sigma_y + (H - l3) (x) sigma_z
up to the Kronecker-order basis permutation.  The probe's position
components are interpreted in the scaled coordinates (lambda subtracts
AFTER multiplying by kappa), so pseudospectrum grids are kappa-independent
in display units; the two conventions coincide at lambda = 0, the only
probe the source studies use away from holes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import GapSolverError
from .inertia import signature

# dense smallest-|eigenvalue| below this dimension; shift-invert above
GAP_DENSE_CUTOFF = 2000


@dataclass(frozen=True)
class LocalizerProbe:
    """Probe point (l1, l2) in scaled position units, l3 in energy units,
    plus the position scaling kappa."""

    lam: tuple = (0.0, 0.0, 0.0)
    kappa: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if len(self.lam) != 3 or not all(np.isfinite(self.lam)):
            raise ValueError(f"lambda must be 3 finite reals, got {self.lam}")

    def to_dict(self) -> dict:
        return {"lambda": list(self.lam), "kappa": self.kappa}


@dataclass(frozen=True)
class LocalizerReport:
    index: int
    gap: float
    probe: LocalizerProbe
    signature: int
    min_block_magnitude: float
    singular_flag: bool

    def to_dict(self) -> dict:
        return {
            "probe": list(self.probe.lam),
            "kappa": self.probe.kappa,
            "index": self.index,
            "gap": self.gap,
            "singular_flag": self.singular_flag,
        }


def _as_sparse(op, n=None):
    mat = op if sp.issparse(op) else sp.csr_matrix(np.asarray(op, dtype=complex))
    if n is not None and mat.shape != (n, n):
        raise ValueError(f"operator shape {mat.shape}, expected {(n, n)}")
    return mat


def _is_diagonal(op) -> bool:
    coo = sp.coo_matrix(op)
    return bool(np.all(coo.row == coo.col))


def assemble_localizer(X, Y, H, probe: LocalizerProbe,
                       require_diagonal: bool = True) -> sp.csr_matrix:
    """Sparse 2n x 2n localizer.  X and Y must be diagonal (commuting
    positions) unless require_diagonal is False, which only the gap
    routine uses."""
    H = _as_sparse(H)
    n = H.shape[0]
    X = _as_sparse(X, n)
    Y = _as_sparse(Y, n)
    if require_diagonal and not (_is_diagonal(X) and _is_diagonal(Y)):
        raise ValueError("X and Y must be diagonal position operators")
    l1, l2, l3 = probe.lam
    k = probe.kappa
    eye = sp.identity(n, dtype=complex, format="csr")
    Hs = H - l3 * eye
    Z = (k * X - l1 * eye) - 1j * (k * Y - l2 * eye)
    return sp.bmat([[Hs, Z], [Z.conj().T, -Hs]], format="csr")


def localizer_gap(X, Y, H, probe: LocalizerProbe,
                  dense_cutoff: int = GAP_DENSE_CUTOFF) -> float:
    """Smallest absolute eigenvalue of the localizer, ||L^-1||^-1.

    Dense below dense_cutoff; otherwise shift-invert Lanczos targeting 0
    on the sparse factorization.  A singular localizer reports gap 0.
    """
    L = assemble_localizer(X, Y, H, probe, require_diagonal=False)
    return _gap_of(L, dense_cutoff)


def _gap_of(L: sp.csr_matrix, dense_cutoff: int = GAP_DENSE_CUTOFF) -> float:
    if L.shape[0] <= dense_cutoff:
        ev = np.linalg.eigvalsh(L.toarray())
        return float(np.min(np.abs(ev)))
    try:
        ev = spla.eigsh(L.tocsc(), k=1, sigma=0.0, which="LM",
                        return_eigenvectors=False)
        return float(abs(ev[0]))
    except RuntimeError as exc:           # singular factorization: exact spectrum hit
        if "singular" in str(exc).lower():
            return 0.0
        raise GapSolverError(str(exc)) from exc
    except spla.ArpackNoConvergence as exc:
        raise GapSolverError(f"shift-invert did not converge: {exc}",
                             residual=getattr(exc, "eigenvalues", None)) from exc


def localizer_index(X, Y, H, probe: LocalizerProbe,
                    with_gap: bool = True) -> LocalizerReport:
    """Half the signature of the localizer, with the gap attached.

    The localizer has even dimension; a nonsingular signature must be
    even, and an odd one is rejected as a factorization failure.
    """
    L = assemble_localizer(X, Y, H, probe)
    sig = signature(L)
    if sig.signature % 2 and not sig.singular_flag:
        raise GapSolverError(
            f"odd signature {sig.signature} on an even-dimensional localizer"
        )
    gap = _gap_of(L) if with_gap else float("nan")
    return LocalizerReport(
        index=sig.signature // 2,
        gap=gap,
        probe=probe,
        signature=sig.signature,
        min_block_magnitude=sig.min_block_magnitude,
        singular_flag=sig.singular_flag,
    )


@dataclass(frozen=True)
class PerturbationReport:
    """Numerical certificate for the localizer-stability bound.

    gamma and gamma0 are the SQUARED inverse norms ||L^-1||^-2 for H and
    H + H0; C, D, E are the operator norms
      C = || |Z|^-1 (H H0 + H0 H + H0^2) |Z|^-1 ||,
      D = || [Z, H] ||,
      E = || |Z|^-1 [Z, H0] |Z|^-1 ||,  Z = X + iY.
    The certified inequality is |gamma - gamma0| <= (C+E) gamma + (C+E) D;
    when C+E < 1 and gamma > (C+E) D / (1 - (C+E)) the index at zero is
    unchanged by the perturbation, which is verified directly.
    """

    gamma: float
    gamma0: float
    C: float
    D: float
    E: float
    inequality_holds: bool
    hypothesis_applicable: bool   # C + E < 1
    hypothesis_holds: bool
    index_base: int
    index_perturbed: int
    indices_agree: bool

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "gamma0": self.gamma0,
            "C": self.C,
            "D": self.D,
            "E": self.E,
            "inequality_holds": self.inequality_holds,
            "hypothesis_applicable": self.hypothesis_applicable,
            "hypothesis_holds": self.hypothesis_holds,
            "index_base": self.index_base,
            "index_perturbed": self.index_perturbed,
            "indices_agree": self.indices_agree,
        }


def perturbation_bound_check(X, Y, H, H0) -> PerturbationReport:
    """Evaluate the stability certificate for the probe lambda = 0, kappa = 1.

    X, Y must be commuting (diagonal) with Z = X + iY invertible (no site
    at the origin).
    """
    X = _as_sparse(X)
    n = X.shape[0]
    Y = _as_sparse(Y, n)
    H = np.asarray(H.toarray() if sp.issparse(H) else H, dtype=complex)
    H0 = np.asarray(H0.toarray() if sp.issparse(H0) else H0, dtype=complex)
    if not (_is_diagonal(X) and _is_diagonal(Y)):
        raise ValueError("X and Y must be diagonal position operators")
    x = X.diagonal()
    y = Y.diagonal()
    z = x + 1j * y
    if np.min(np.abs(z)) == 0.0:
        raise ValueError("Z = X + iY is singular (a site sits at the origin)")
    Z = np.diag(z)
    inv_abs_z = np.diag(1.0 / np.abs(z))

    probe = LocalizerProbe(lam=(0.0, 0.0, 0.0), kappa=1.0)
    gap = localizer_gap(X, Y, H, probe)
    gap0 = localizer_gap(X, Y, H + H0, probe)
    gamma, gamma0 = gap**2, gap0**2

    C = float(np.linalg.norm(inv_abs_z @ (H @ H0 + H0 @ H + H0 @ H0) @ inv_abs_z, 2))
    D = float(np.linalg.norm(Z @ H - H @ Z, 2))
    E = float(np.linalg.norm(inv_abs_z @ (Z @ H0 - H0 @ Z) @ inv_abs_z, 2))

    inequality = abs(gamma - gamma0) <= (C + E) * gamma + (C + E) * D
    applicable = (C + E) < 1.0
    hypothesis = bool(applicable and gamma > (C + E) * D / (1.0 - (C + E)))

    rep = localizer_index(X, Y, H, probe, with_gap=False)
    rep0 = localizer_index(X, Y, H + H0, probe, with_gap=False)

    return PerturbationReport(
        gamma=gamma,
        gamma0=gamma0,
        C=C,
        D=D,
        E=E,
        inequality_holds=bool(inequality),
        hypothesis_applicable=applicable,
        hypothesis_holds=hypothesis,
        index_base=rep.index,
        index_perturbed=rep0.index,
        indices_agree=rep.index == rep0.index,
    )
