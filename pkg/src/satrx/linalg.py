"""Dense Hermitian linear-algebra kernel.

Thin, contract-checked wrappers around LAPACK (via :mod:`numpy.linalg`):
eigendecomposition with a deterministic eigenvalue order, pseudo-inverse
square roots for rank-deficient Gram matrices, Cholesky factors for noise
colouring, and a condition-guarded linear solve.  Everything downstream
(whitening, beamforming, detection metrics) is built on these four calls,
so their tolerances are pinned here in one place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import NotHermitianError, check_complex_matrix, check_hermitian

__all__ = [
    "RANK_TOL",
    "COND_LIMIT",
    "HermEig",
    "NotHermitianError",
    "NotPositiveSemidefiniteError",
    "NotPositiveDefiniteError",
    "SingularMatrixError",
    "herm_eig",
    "pinv_sqrt",
    "chol",
    "solve",
]

# Eigenvalues below RANK_TOL times the largest are treated as exact zeros.
RANK_TOL = 1e-12
# 2-norm condition number above which `solve` refuses to proceed.
COND_LIMIT = 1e12
# Relative tolerance for "is this eigenvalue negative" PSD checks.
_PSD_TOL = 1e-10


class NotPositiveSemidefiniteError(ValueError):
    """Raised when a matrix required to be PSD has a negative eigenvalue."""


class NotPositiveDefiniteError(ValueError):
    """Raised when a Cholesky factorization is requested for a non-PD matrix."""


class SingularMatrixError(ValueError):
    """Raised when a linear solve meets a (numerically) singular matrix."""


@dataclass(frozen=True)
class HermEig:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and sorted in descending order (stable among
    ties); ``eigenvectors[:, k]`` is the unit-norm eigenvector belonging to
    ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]


def herm_eig(m, *, name: str = "matrix") -> HermEig:
    """Eigendecomposition of a Hermitian matrix with descending eigenvalues.

    Parameters
    ----------
    m : array_like
        Square Hermitian matrix (validated to 1e-10 relative asymmetry).

    Returns
    -------
    HermEig
        Real eigenvalues (descending, stable among ties) and matching
        orthonormal eigenvectors.
    """
    a = check_hermitian(m, name=name)
    vals, vecs = np.linalg.eigh(a)
    # eigh returns ascending order; flip with a stable sort so exactly-tied
    # eigenvalues keep LAPACK's relative order (identity stays identity).
    order = np.argsort(-vals, kind="stable")
    return HermEig(np.ascontiguousarray(vals[order]), np.ascontiguousarray(vecs[:, order]))


def pinv_sqrt(m, *, name: str = "matrix") -> np.ndarray:
    """Hermitian square root of the Moore-Penrose pseudo-inverse.

    Returns ``S`` with ``S @ S == pinv(m)``.  Eigenvalues at or below
    ``RANK_TOL`` times the largest are treated as exact zeros, so
    rank-deficient Gram matrices never blow up.

    Raises
    ------
    NotPositiveSemidefiniteError
        If ``m`` has an eigenvalue below ``-1e-10 * max(λ_max, 1)``.
    """
    e = herm_eig(m, name=name)
    top = float(e.eigenvalues[0]) if e.size else 0.0
    if e.eigenvalues[-1] < -_PSD_TOL * max(top, 1.0):
        raise NotPositiveSemidefiniteError(
            f"{name} has negative eigenvalue {e.eigenvalues[-1]:.3e}"
        )
    inv_sqrt = np.zeros_like(e.eigenvalues)
    keep = e.eigenvalues > RANK_TOL * max(top, 0.0)
    inv_sqrt[keep] = 1.0 / np.sqrt(e.eigenvalues[keep])
    u = e.eigenvectors
    return (u * inv_sqrt) @ u.conj().T


def chol(m, *, name: str = "matrix") -> np.ndarray:
    """Lower-triangular Cholesky factor ``C`` with ``C @ Cᴴ == m``."""
    a = check_hermitian(m, name=name)
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"{name} is not positive definite") from exc


def solve(m, b, *, name: str = "matrix") -> np.ndarray:
    """Solve ``m @ x = b`` for a square, well-conditioned ``m``.

    ``b`` may be a vector or a matrix of stacked right-hand sides.

    Raises
    ------
    SingularMatrixError
        If the 2-norm condition number exceeds ``COND_LIMIT`` (or the
        matrix is exactly singular).
    """
    a = check_complex_matrix(m, name=name, square=True)
    rhs = np.asarray(b, dtype=np.complex128)
    if rhs.shape[0] != a.shape[0]:
        raise ValueError(
            f"right-hand side has {rhs.shape[0]} rows, expected {a.shape[0]}"
        )
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrixError(
            f"{name} is singular to working precision (cond={cond:.3e})"
        )
    return np.linalg.solve(a, rhs)
