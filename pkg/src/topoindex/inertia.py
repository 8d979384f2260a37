"""Matrix signature via LDLT factorization and Sylvester's law of inertia.

The point of the LDLT route is to avoid computing any eigenvalues: the
signature of the block-diagonal D equals the signature of M.  Dense
matrices go through LAPACK's Bunch-Kaufman factorization (1x1 and 2x2
pivot blocks).  Sparse matrices go through CHOLMOD's simplicial LDLT,
which only handles real symmetric input, so a complex Hermitian M is
first embedded as the doubled real matrix

    [[Re M, Im M], [-Im M, Re M]]

whose signature is exactly twice that of M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from cvxopt import cholmod, spmatrix

from .errors import SignatureError

# below this dimension a sparse input is densified; LAPACK wins there
DENSE_CUTOFF = 600

# pivots below NEAR_ZERO_REL * max|entry| set the singular flag and are
# counted as positive (treating 0 as positive is the cheap tie rule)
NEAR_ZERO_REL = 1e-12


@dataclass(frozen=True)
class SignatureResult:
    signature: int
    min_block_magnitude: float
    singular_flag: bool


def _count_pivots(d: np.ndarray, scale: float) -> SignatureResult:
    """Signature from 1x1 pivot values; near-zero pivots count as positive."""
    tol = NEAR_ZERO_REL * scale
    singular = bool(np.any(np.abs(d) < tol))
    sig = int(np.sum(d >= -tol) - np.sum(d < -tol))
    min_mag = float(np.min(np.abs(d))) if len(d) else 0.0
    return SignatureResult(signature=sig, min_block_magnitude=min_mag, singular_flag=singular)


def _dense_signature(M: np.ndarray) -> SignatureResult:
    hermitian = np.iscomplexobj(M)
    _, D, _ = sla.ldl(M, hermitian=hermitian)
    n = D.shape[0]
    scale = max(float(np.max(np.abs(M))), 1e-300)
    tol = NEAR_ZERO_REL * scale
    pivots = []
    i = 0
    while i < n:
        if i + 1 < n and D[i + 1, i] != 0:
            # 2x2 block: closed-form eigenvalues, branch-free
            a = D[i, i].real
            c = D[i + 1, i + 1].real
            b = D[i + 1, i]
            mid = (a + c) / 2
            rad = np.hypot((a - c) / 2, abs(b))
            pivots.extend((mid + rad, mid - rad))
            i += 2
        else:
            pivots.append(D[i, i].real)
            i += 1
    return _count_pivots(np.array(pivots), scale)


def _to_cvxopt_lower(A: sp.coo_matrix) -> spmatrix:
    mask = A.row >= A.col
    return spmatrix(
        A.data[mask].astype(float),
        A.row[mask].astype(int).tolist(),
        A.col[mask].astype(int).tolist(),
        (A.shape[0], A.shape[1]),
    )


def _cholmod_pivots(R: sp.coo_matrix) -> np.ndarray:
    """Diagonal of D from CHOLMOD's simplicial LDLT of a real symmetric
    matrix.  Raises SignatureError on factorization breakdown."""
    As = _to_cvxopt_lower(R)
    cholmod.options["supernodal"] = 0
    try:
        F = cholmod.symbolic(As)
        cholmod.numeric(As, F)
    except ArithmeticError as exc:
        raise SignatureError(
            f"sparse LDLT broke down at pivot {exc}"
        ) from exc
    L = cholmod.getfactor(F)
    colptr = np.asarray(L.CCS[0]).ravel()
    vals = np.asarray(L.CCS[2]).ravel()
    # unit lower-triangular factor stores D on its diagonal, the first
    # stored entry of each column
    return vals[colptr[:-1]]


def real_doubled(M: sp.spmatrix) -> sp.coo_matrix:
    """Real symmetric embedding [[Re M, Im M], [-Im M, Re M]] of a complex
    Hermitian M; its spectrum is that of M with every eigenvalue doubled."""
    Mr = M.real
    Mi = M.imag
    return sp.bmat([[Mr, Mi], [-Mi, Mr]], format="coo")


def _sparse_signature(M: sp.spmatrix) -> SignatureResult:
    scale = max(float(np.max(np.abs(M.data))) if M.nnz else 0.0, 1e-300)
    if np.iscomplexobj(M):
        d = _cholmod_pivots(real_doubled(M))
        res = _count_pivots(d, scale)
        if res.signature % 2:
            raise SignatureError(
                "doubled real embedding returned an odd signature"
            )
        return SignatureResult(
            signature=res.signature // 2,
            min_block_magnitude=res.min_block_magnitude,
            singular_flag=res.singular_flag,
        )
    d = _cholmod_pivots(M.tocoo())
    return _count_pivots(d, scale)


def signature(M, dense_cutoff: int = DENSE_CUTOFF) -> SignatureResult:
    """Signature (inertia) of a Hermitian matrix.

    Dense input, or sparse input of dimension <= dense_cutoff, uses the
    LAPACK Bunch-Kaufman path; larger sparse input uses CHOLMOD on the
    real doubled embedding.  No eigenvalues of M are ever computed.
    """
    if sp.issparse(M):
        if M.shape[0] <= dense_cutoff:
            return _dense_signature(M.toarray())
        return _sparse_signature(M.tocsc())
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return _dense_signature(M)


def signature_real_doubled_dense(M: np.ndarray) -> SignatureResult:
    """Dense signature via the real doubled embedding ("and divides by
    two").  Exists so the doubling path can be exercised and cross-checked
    independently of the sparse backend."""
    M = np.asarray(M, dtype=complex)
    R = np.block([[M.real, M.imag], [-M.imag, M.real]])
    res = _dense_signature(R)
    if res.signature % 2:
        raise SignatureError("doubled real embedding returned an odd signature")
    return SignatureResult(
        signature=res.signature // 2,
        min_block_magnitude=res.min_block_magnitude,
        singular_flag=res.singular_flag,
    )
