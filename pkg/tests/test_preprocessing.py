"""Combining and whitening front ends.

The load-bearing property is that for either combiner kind the whitener
makes ``Fᴴ G F`` an exact 0/1 diagonal projector with the zero modes in
the trailing coordinates, even when the overloaded geometry leaves ``G``
rank deficient.
"""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from satrx.preprocessing import (MrcPreprocessor, WienerHopfPreprocessor,
                                 apply, build_covariances, build_mrc,
                                 build_wiener_hopf, sinr)
from satrx.scenario import (build_channel, default_noise_correlation,
                            default_scenario, sigma2_for_snr)


def _random_channel(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def _assert_projector(pre, atol=1e-10):
    n = pre.g_.shape[0]
    p = np.zeros((n, n))
    p[np.diag_indices(pre.rank_g_)] = 1.0
    np.testing.assert_allclose(pre.f_.conj().T @ pre.g_ @ pre.f_, p, atol=atol)


# ---------------------------------------------------------------- covariances


def test_build_covariances_structure():
    a = build_channel(default_scenario())
    k = default_noise_correlation(3)
    cov = build_covariances(a, 0.5, k)
    assert cov.r.shape == (3, 3)
    assert len(cov.r_m) == 5
    np.testing.assert_allclose(cov.r_nn, 0.5 * k)
    total = sum(cov.r_m) + cov.r_nn
    np.testing.assert_allclose(cov.r, total)
    # each stream covariance is rank one and PSD
    for m, rm in enumerate(cov.r_m):
        np.testing.assert_allclose(rm, np.outer(a[:, m], a[:, m].conj()))
        assert np.linalg.matrix_rank(rm) == 1


def test_build_covariances_identity_default():
    a = _random_channel(np.random.default_rng(0), 3, 5)
    cov = build_covariances(a, 2.0)
    np.testing.assert_allclose(cov.r_nn, 2.0 * np.eye(3))


def test_build_covariances_validates():
    a = _random_channel(np.random.default_rng(0), 3, 5)
    with pytest.raises(ValueError, match="noise_power"):
        build_covariances(a, -1.0)
    with pytest.raises(ValueError, match="3x3"):
        build_covariances(a, 1.0, np.eye(2))


def test_sinr_is_rayleigh_quotient():
    a = _random_channel(np.random.default_rng(1), 3, 5)
    cov = build_covariances(a, 0.3)
    w = np.array([1.0, 1j, -0.5])
    num = np.real(w.conj() @ cov.r_m[2] @ w)
    den = np.real(w.conj() @ (cov.r - cov.r_m[2]) @ w)
    assert sinr(w, cov, 2) == pytest.approx(num / den)
    with pytest.raises(ValueError, match="out of range"):
        sinr(w, cov, 5)


def test_wiener_hopf_weight_maximizes_sinr():
    """R⁻¹ a_m beats a cloud of random beamformers for every stream."""
    a = build_channel(default_scenario())
    k = default_noise_correlation(3)
    s2 = sigma2_for_snr(a, 10.0)
    cov = build_covariances(a, s2, k)
    pre = build_wiener_hopf(a, s2, k)
    rng = np.random.default_rng(2)
    for m in range(5):
        best = sinr(pre.w_[:, m], cov, m)
        for _ in range(50):
            w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            assert sinr(w, cov, m) <= best * (1 + 1e-12)


# ---------------------------------------------------------------- whitening


@pytest.mark.parametrize("kind", ["mrc", "wh"])
def test_whitener_projector_default_scene(kind):
    a = build_channel(default_scenario())
    k = default_noise_correlation(3)
    s2 = sigma2_for_snr(a, 10.0)
    pre = build_mrc(a) if kind == "mrc" else build_wiener_hopf(a, s2, k)
    # overloaded: at most M of the N combined streams are independent
    assert pre.rank_g_ == 3
    _assert_projector(pre)
    # zero modes land in the trailing coordinates
    np.testing.assert_array_equal(pre.f_[:, pre.rank_g_:], 0.0)


@pytest.mark.parametrize("kind", ["mrc", "wh"])
def test_whitener_projector_random_channels(kind):
    rng = np.random.default_rng(7)
    for trial in range(40):
        m = int(rng.integers(1, 5))
        n = int(rng.integers(m + 1, m + 4))
        a = _random_channel(rng, m, n)
        if trial % 3 == 0:
            # force extra rank deficiency with a repeated column
            a[:, -1] = a[:, 0]
        if kind == "mrc":
            pre = build_mrc(a)
        else:
            pre = build_wiener_hopf(a, 0.2)
        assert pre.rank_g_ <= min(m, n)
        _assert_projector(pre)
        np.testing.assert_array_equal(pre.f_[:, pre.rank_g_:], 0.0)


@pytest.mark.parametrize("kind", ["mrc", "wh"])
def test_whitened_noise_is_white(kind):
    """Sample covariance of transformed noise matches the 0/1 projector."""
    a = build_channel(default_scenario())
    k = default_noise_correlation(3)
    s2 = sigma2_for_snr(a, 10.0)
    pre = build_mrc(a) if kind == "mrc" else build_wiener_hopf(a, s2, k)
    if kind == "mrc":
        # matched combining whitens under the white-noise assumption only
        analytic = pre.whitened_noise_covariance()
    else:
        analytic = pre.whitened_noise_covariance(k)
    p = np.zeros((5, 5))
    p[np.diag_indices(pre.rank_g_)] = 1.0
    np.testing.assert_allclose(analytic, p, atol=1e-10)


def test_equivalent_channel_definition():
    a = build_channel(default_scenario())
    pre = build_mrc(a)
    np.testing.assert_allclose(pre.h_, pre.f_.conj().T @ a.conj().T @ a)
    np.testing.assert_allclose(pre.forward_, pre.f_.conj().T @ pre.w_.conj().T)


# ---------------------------------------------------------------- transform


def test_transform_shapes_and_linearity():
    a = build_channel(default_scenario())
    pre = build_wiener_hopf(a, 0.1, default_noise_correlation(3))
    rng = np.random.default_rng(3)
    r1 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    batch = np.stack([r1, 2 * r1])
    y1 = pre.transform(r1)
    yb = pre.transform(batch)
    assert y1.shape == (5,)
    assert yb.shape == (2, 5)
    np.testing.assert_allclose(yb[0], y1)
    np.testing.assert_allclose(yb[1], 2 * y1)
    np.testing.assert_allclose(apply(pre, r1), y1)


def test_transform_consistent_with_model():
    """y = transform(A s + 0) must equal h_ @ s exactly."""
    a = build_channel(default_scenario())
    pre = build_mrc(a)
    rng = np.random.default_rng(4)
    s = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    np.testing.assert_allclose(pre.transform(a @ s), pre.h_ @ s, atol=1e-12)


def test_transform_wrong_width():
    pre = build_mrc(build_channel(default_scenario()))
    with pytest.raises(ValueError, match="chains"):
        pre.transform(np.zeros(4, dtype=np.complex128))


def test_transform_before_fit():
    with pytest.raises(NotFittedError):
        MrcPreprocessor().transform(np.zeros(3))


# ---------------------------------------------------------------- estimator


def test_estimator_protocol():
    pre = WienerHopfPreprocessor(noise_power=0.25)
    params = pre.get_params()
    assert params == {"noise_power": 0.25, "noise_correlation": None}
    twin = clone(pre)
    assert twin.get_params() == params
    pre.set_params(noise_power=0.5)
    assert pre.noise_power == 0.5


def test_fit_returns_self_and_refits():
    rng = np.random.default_rng(8)
    a1 = _random_channel(rng, 2, 4)
    a2 = _random_channel(rng, 2, 4)
    pre = MrcPreprocessor()
    assert pre.fit(a1) is pre
    h1 = pre.h_.copy()
    pre.fit(a2)
    assert not np.allclose(pre.h_, h1)
