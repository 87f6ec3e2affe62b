"""Front-end combining and noise whitening.

Turns ``M`` received chain samples into an ``N``-stream detection problem
``y = H s + z`` through a linear map ``y = Fᴴ Wᴴ r``:

* ``W`` (M, N) combines the chains once per stream — either matched
  combining (``W = A``, white-noise assumption) or max-SINR (Wiener-Hopf)
  weights ``w_m = R⁻¹ a_m`` built from the analytic stream covariances;
* ``F`` (N, N) whitens the combined noise.  Both kinds build
  ``F = U diag(l†)^(1/2)`` from the eigensystem ``G = U L Uᴴ`` of the
  combiner Gram matrix, so ``Fᴴ G F`` is an exact 0/1 diagonal even when the
  overloaded geometry makes ``G`` rank deficient; the zero modes always land
  in the trailing coordinates of ``y``.

Estimators follow the sklearn transformer protocol: hyper-parameters in the
constructor, ``fit`` on a channel matrix, ``transform`` on received vectors,
fitted state in trailing-underscore attributes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .linalg import RANK_TOL, herm_eig, solve
from .validation import check_complex_matrix, check_complex_vector, check_hermitian

__all__ = [
    "CovarianceSet",
    "build_covariances",
    "sinr",
    "MrcPreprocessor",
    "WienerHopfPreprocessor",
    "build_mrc",
    "build_wiener_hopf",
    "apply",
]


@dataclass(eq=False)
class CovarianceSet:
    """Analytic receive covariances for one channel/noise configuration.

    ``r`` is the total covariance ``Σ_m a_m a_mᴴ + σ² K``; ``r_m[m]`` the
    rank-one covariance of stream ``m``; ``r_nn`` the noise part ``σ² K``.
    """

    r: np.ndarray
    r_m: list
    r_nn: np.ndarray


def build_covariances(a, noise_power: float, noise_correlation=None) -> CovarianceSet:
    """Build the covariance set for channel ``a`` and noise ``σ² K``."""
    a = check_complex_matrix(a, name="channel matrix")
    m_chains = a.shape[0]
    if not (noise_power >= 0 and np.isfinite(noise_power)):
        raise ValueError("noise_power must be finite and non-negative")
    if noise_correlation is None:
        k = np.eye(m_chains, dtype=np.complex128)
    else:
        k = check_hermitian(noise_correlation, name="noise_correlation")
        if k.shape[0] != m_chains:
            raise ValueError(
                f"noise_correlation must be {m_chains}x{m_chains}, got {k.shape}"
            )
    r_m = [np.outer(a[:, j], a[:, j].conj()) for j in range(a.shape[1])]
    r_nn = noise_power * k
    r = sum(r_m) + r_nn
    return CovarianceSet(r=r, r_m=r_m, r_nn=r_nn)


def sinr(w, cov: CovarianceSet, m: int) -> float:
    """Output SINR of beamformer ``w`` for stream ``m``.

    The generalized Rayleigh quotient ``wᴴ R_m w / wᴴ (R - R_m) w``.
    """
    w = check_complex_vector(w, name="beamformer", length=cov.r.shape[0])
    if not 0 <= m < len(cov.r_m):
        raise ValueError(f"stream index {m} out of range")
    num = np.real(w.conj() @ cov.r_m[m] @ w)
    den = np.real(w.conj() @ (cov.r - cov.r_m[m]) @ w)
    if den <= 0:
        raise ValueError("interference-plus-noise power is not positive")
    return float(num / den)


def _eigen_whitener(g: np.ndarray):
    """Whitener ``F = U diag(l†)^(1/2)`` from the eigensystem of ``G``."""
    e = herm_eig(g, name="combiner Gram matrix")
    top = float(e.eigenvalues[0]) if e.size else 0.0
    keep = e.eigenvalues > RANK_TOL * max(top, 0.0)
    inv_sqrt = np.zeros_like(e.eigenvalues)
    inv_sqrt[keep] = 1.0 / np.sqrt(e.eigenvalues[keep])
    f = e.eigenvectors * inv_sqrt  # scale columns; trailing ones are zero
    return f, int(keep.sum())


class _LinearPreprocessor(BaseEstimator, TransformerMixin):
    """Shared fit/transform plumbing for the two combiner kinds.

    Fitted attributes
    -----------------
    w_ : (M, N) combiner weights, one column per stream.
    g_ : (N, N) combiner Gram matrix the whitener is built from.
    f_ : (N, N) whitener; ``f_ᴴ g_ f_`` is 0/1 diagonal with ``rank_g_`` ones.
    h_ : (N, N) equivalent channel ``f_ᴴ w_ᴴ a``.
    rank_g_ : numerical rank of ``g_``.
    forward_ : (N, M) combined map ``f_ᴴ w_ᴴ`` applied to received vectors.
    """

    kind = None

    def _combiner(self, a: np.ndarray):
        raise NotImplementedError

    def fit(self, a, y=None):
        a = check_complex_matrix(a, name="channel matrix")
        w, g = self._combiner(a)
        f, rank_g = _eigen_whitener(g)
        self.channel_ = a
        self.w_ = w
        self.g_ = g
        self.f_ = f
        self.rank_g_ = rank_g
        self.forward_ = f.conj().T @ w.conj().T
        self.h_ = self.forward_ @ a
        return self

    def transform(self, r):
        """Map received chain vectors (..., M) to stream vectors (..., N)."""
        check_is_fitted(self, "forward_")
        x = np.asarray(r, dtype=np.complex128)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[-1] != self.forward_.shape[1]:
            raise ValueError(
                f"received vectors have {x.shape[-1]} chains, expected "
                f"{self.forward_.shape[1]}"
            )
        y = x @ self.forward_.T
        return y[0] if single else y

    def whitened_noise_covariance(self, noise_correlation=None) -> np.ndarray:
        """Analytic post-whitening noise shape ``Fᴴ Wᴴ K W F`` (unit σ²)."""
        check_is_fitted(self, "forward_")
        m_chains = self.forward_.shape[1]
        if noise_correlation is None:
            k = np.eye(m_chains, dtype=np.complex128)
        else:
            k = check_hermitian(noise_correlation, name="noise_correlation")
        return self.forward_ @ k @ self.forward_.conj().T


class MrcPreprocessor(_LinearPreprocessor):
    """Matched combining per stream, then whitening of ``G = AᴴA``.

    Ignores both the other streams and any chain-noise correlation — the
    cheap front end a conventional single-satellite receiver would use.
    """

    kind = "mrc"

    def _combiner(self, a):
        w = a.copy()
        return w, a.conj().T @ a


class WienerHopfPreprocessor(_LinearPreprocessor):
    """Max-SINR combining from the analytic covariances, then whitening.

    Each stream's weight solves ``R w_m = a_m``; such a weight is (up to
    scale) the dominant generalized eigenvector of ``(R - R_m)⁻¹ R_m``, i.e.
    the SINR-optimal beamformer.  The whitener accounts for the chain-noise
    correlation ``K`` through ``G = Wᴴ K W``.

    Parameters
    ----------
    noise_power : float
        Per-chain noise power σ².
    noise_correlation : array_like or None
        Unit-diagonal chain correlation ``K``; identity when None.
    """

    kind = "wiener-hopf"

    def __init__(self, noise_power: float = 1.0, noise_correlation=None):
        self.noise_power = noise_power
        self.noise_correlation = noise_correlation

    def _combiner(self, a):
        cov = build_covariances(a, self.noise_power, self.noise_correlation)
        self.covariances_ = cov
        w = solve(cov.r, a, name="receive covariance")
        if self.noise_correlation is None:
            k = np.eye(a.shape[0], dtype=np.complex128)
        else:
            k = check_hermitian(self.noise_correlation, name="noise_correlation")
        return w, w.conj().T @ k @ w


def build_mrc(a) -> MrcPreprocessor:
    """Fitted matched-combining preprocessor for channel ``a``."""
    return MrcPreprocessor().fit(a)


def build_wiener_hopf(a, noise_power: float, noise_correlation=None) -> WienerHopfPreprocessor:
    """Fitted max-SINR preprocessor for channel ``a`` and noise ``σ² K``."""
    return WienerHopfPreprocessor(
        noise_power=noise_power, noise_correlation=noise_correlation
    ).fit(a)


def apply(preprocessor: _LinearPreprocessor, r) -> np.ndarray:
    """Apply a fitted preprocessor to received vectors (alias of transform)."""
    return preprocessor.transform(r)
