"""Closed-form solution of the sup-norm-relaxed minimum-energy problem.

The problem: minimize ``x^T A x`` subject to ``||B x||_inf >= 1`` with ``A``
symmetric positive definite.  Writing ``D = B A^-1 B^T``, the minimum equals
``1 / max(diag(D))`` and is attained at ``x* = A^-1 B^T e_i / D_ii`` for the
maximizing row ``i``.

Two independent routes are provided: :func:`solve_relaxed` factors ``A`` once
(sparse LU) and computes ``diag(D)`` as ``b_i^T A^-1 b_i`` row by row, while
:func:`solve_relaxed_cholesky` goes through the Cholesky factor ``A = R^T R``
and the squared row norms of ``B R^-1``.  They must agree to roundoff and are
kept separate so each can serve as a check on the other.  Neither ``A^-1``
nor ``D`` is ever formed densely; only the diagonal is accumulated, in
blocks of right-hand sides to keep the triangular solves in vendor code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import lapack
from scipy.sparse.csgraph import reverse_cuthill_mckee

from .errors import InterpConstError, NotSPDError

#: Relative slack under the maximum within which rows count as tied.
TIE_RTOL = 1e-12

#: Number of right-hand sides handled per triangular-solve sweep.
_BLOCK = 2048


class LUFactor:
    """Sparse LU factorization of an SPD matrix, reusable across solves.

    Immutable after construction; concurrent reads (solves) are independent.
    """

    method = "lu"

    def __init__(self, A: sp.spmatrix):
        try:
            self._lu = spla.splu(A.tocsc())
        except RuntimeError as exc:
            raise NotSPDError(f"sparse factorization of A failed: {exc}") from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self._lu.solve(rhs)

    def diag_inverse_form(self, B: sp.spmatrix) -> np.ndarray:
        """All quadratic forms ``b_i^T A^-1 b_i`` for the rows of ``B``."""
        B = B.tocsr()
        n_rows = B.shape[0]
        out = np.empty(n_rows)
        for s in range(0, n_rows, _BLOCK):
            e = min(s + _BLOCK, n_rows)
            blk = B[s:e]
            X = self._lu.solve(blk.toarray().T)
            out[s:e] = np.asarray(blk.multiply(X.T).sum(axis=1)).ravel()
        return out


class BandedCholeskyFactor:
    """Bandwidth-reduced Cholesky factorization ``A = R^T R``.

    The matrix is permuted with reverse Cuthill-McKee, stored banded, and
    factored once; row sweeps run one banded triangular solve per
    right-hand side, giving ``||R^-T b||^2 = b^T A^-1 b``.
    """

    method = "cholesky"

    def __init__(self, A: sp.spmatrix):
        A = A.tocsr()
        self._n = A.shape[0]
        self._perm = np.asarray(reverse_cuthill_mckee(A, symmetric_mode=True))
        Ap = A[self._perm][:, self._perm].tocsr()
        coo = Ap.tocoo()
        self._bw = int(np.abs(coo.row - coo.col).max()) if coo.nnz else 0
        ab = np.zeros((self._bw + 1, self._n))
        upper = sp.triu(Ap).tocoo()
        ab[self._bw + upper.row - upper.col, upper.col] = upper.data
        try:
            self._cb = sla.cholesky_banded(ab, lower=False)
        except np.linalg.LinAlgError as exc:
            raise NotSPDError(f"banded Cholesky of A failed: {exc}") from exc

    def _half_solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``R^T z = rhs`` (rhs already permuted)."""
        z, info = lapack.dtbtrs(self._cb, rhs, uplo="U", trans="T", diag="N")
        if info != 0:  # pragma: no cover - guarded by cholesky_banded
            raise NotSPDError(f"banded triangular solve failed (info={info})")
        return z

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        z = self._half_solve(rhs[self._perm])
        y, info = lapack.dtbtrs(self._cb, z, uplo="U", trans="N", diag="N")
        if info != 0:  # pragma: no cover
            raise NotSPDError(f"banded triangular solve failed (info={info})")
        out = np.empty_like(y)
        out[self._perm] = y
        return out

    def diag_inverse_form(self, B: sp.spmatrix) -> np.ndarray:
        Bp = B.tocsr()[:, self._perm].tocsr()
        n_rows = Bp.shape[0]
        out = np.empty(n_rows)
        for s in range(0, n_rows, _BLOCK):
            e = min(s + _BLOCK, n_rows)
            Z = self._half_solve(Bp[s:e].toarray().T)
            out[s:e] = np.einsum("ij,ij->j", Z, Z)
        return out


def factorize(A: sp.spmatrix, method: str = "lu"):
    """Factor ``A`` once for repeated inverse quadratic forms.

    ``method`` is ``"lu"``, ``"cholesky"``, or ``"auto"`` (banded Cholesky
    for large systems, where the bandwidth-reduced sweep is faster).
    """
    if method == "auto":
        method = "cholesky" if A.shape[0] > 3000 else "lu"
    if method == "lu":
        return LUFactor(A)
    if method == "cholesky":
        return BandedCholeskyFactor(A)
    raise ValueError(f"unknown factorization method {method!r}")


@dataclass(frozen=True)
class RelaxedSolution:
    """Solution of the relaxed problem.

    Attributes
    ----------
    lambda_hB : float
        Optimal value ``1 / max(diag(D))``.
    argmax_row : int
        Lowest row index attaining the maximum of ``diag(D)`` within
        ``TIE_RTOL``.
    minimizer : ndarray
        Optimal coefficient vector; satisfies ``x^T A x == lambda_hB`` and
        activates constraint row ``argmax_row`` at exactly 1.
    diag_D : ndarray
        All quadratic forms ``b_i^T A^-1 b_i`` (one per row of ``B``).
    near_max_rows : ndarray
        Every row index within ``TIE_RTOL`` of the maximum.
    method : str
        ``"lu"`` or ``"cholesky"``.
    """

    lambda_hB: float
    argmax_row: int
    minimizer: np.ndarray
    diag_D: np.ndarray
    near_max_rows: np.ndarray = field(repr=False)
    method: str = "lu"


def relaxed_from_diag(diag_D: np.ndarray, factor, B: sp.spmatrix) -> RelaxedSolution:
    """Assemble the solution record once ``diag(D)`` is known."""
    dmax = float(diag_D.max())
    if not np.isfinite(dmax) or dmax <= 0.0:
        raise InterpConstError("max diag(B A^-1 B^T) is not positive; "
                               "inconsistent assembly")
    if float(diag_D.min()) < -1e-10 * dmax:
        raise NotSPDError("negative quadratic form b^T A^-1 b; A is not SPD")
    near = np.flatnonzero(diag_D >= dmax * (1.0 - TIE_RTOL))
    i_star = int(near.min())
    b = np.asarray(B.getrow(i_star).todense()).ravel()
    x_star = factor.solve(b) / diag_D[i_star]
    return RelaxedSolution(
        lambda_hB=1.0 / dmax,
        argmax_row=i_star,
        minimizer=x_star,
        diag_D=diag_D,
        near_max_rows=near,
        method=factor.method,
    )


def solve_relaxed(A: sp.spmatrix, B: sp.spmatrix) -> RelaxedSolution:
    """LU route: factor ``A`` once, then one solve per row of ``B``."""
    factor = LUFactor(A)
    return relaxed_from_diag(factor.diag_inverse_form(B), factor, B.tocsr())


def solve_relaxed_cholesky(A: sp.spmatrix, B: sp.spmatrix) -> RelaxedSolution:
    """Cholesky route: ``A = R^T R`` and squared row norms of ``B R^-1``."""
    factor = BandedCholeskyFactor(A)
    return relaxed_from_diag(factor.diag_inverse_form(B), factor, B.tocsr())
