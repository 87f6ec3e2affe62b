"""Input-validation helpers shared across the package.

These play the role ``sklearn.utils.validation`` plays for real-valued
estimators: coerce to a canonical dtype, fail loudly on shape problems and
keep error messages uniform.  sklearn's own ``check_array`` refuses complex
input, so the estimators here use these helpers instead.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "NotHermitianError",
    "check_complex_matrix",
    "check_complex_vector",
    "check_hermitian",
]


class NotHermitianError(ValueError):
    """Raised when a matrix that must be Hermitian is not."""


def check_complex_matrix(x, *, name: str = "matrix", square: bool = False) -> np.ndarray:
    """Coerce ``x`` to a finite, 2-D ``complex128`` array.

    Parameters
    ----------
    x : array_like
        Candidate matrix.
    name : str
        Identifier used in error messages.
    square : bool
        If true, additionally require a square shape.

    Returns
    -------
    numpy.ndarray
        ``complex128`` array with positive dimensions.
    """
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={a.ndim}")
    if min(a.shape) < 1:
        raise ValueError(f"{name} must have positive dimensions, got {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")
    return a


def check_complex_vector(x, *, name: str = "vector", length: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D ``complex128`` array, optionally of fixed length."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got ndim={v.ndim}")
    if length is not None and v.shape[0] != length:
        raise ValueError(f"{name} must have length {length}, got {v.shape[0]}")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite entries")
    return v


def check_hermitian(x, *, tol: float = 1e-10, name: str = "matrix") -> np.ndarray:
    """Validate Hermitian symmetry relative to the matrix scale.

    The asymmetry ``‖x - xᴴ‖_F`` is compared against ``tol * max(‖x‖_F, 1)``
    so the check is meaningful for both tiny and large matrices.
    """
    a = check_complex_matrix(x, name=name, square=True)
    asym = np.linalg.norm(a - a.conj().T)
    if asym > tol * max(np.linalg.norm(a), 1.0):
        raise NotHermitianError(
            f"{name} is not Hermitian: asymmetry {asym:.3e} exceeds tolerance"
        )
    return a
