import numpy as np
import pytest

from splitkern.estimator import (KernelExpansion, fit_iterative, fit_spectral,
                                 predict, spectral_model)
from splitkern.filters import (filter_values, landweber, nu_method,
                               spectral_cutoff, tikhonov)
from splitkern.kernels import gram, sobolev_min


@pytest.fixture
def kernel():
    return sobolev_min()


def _data(n, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.random(n)
    y = rng.standard_normal(n)
    return x, y


def test_zero_outputs_give_zero_fit(kernel):
    x, _ = _data(16)
    est = fit_spectral(kernel, tikhonov(), 0.3, x, np.zeros(16))
    assert np.array_equal(est.coefficients, np.zeros(16))


def test_single_point_hand_computation(kernel):
    # x = 0.5: M = [[1.0]], Tikhonov lam=1 gives g = 1/2, alpha = 2 y
    est = fit_spectral(kernel, tikhonov(), 1.0, [0.5], [3.0])
    assert est.coefficients[0] == pytest.approx(6.0, rel=1e-14)


@pytest.mark.parametrize("n", [8, 64, 256])
def test_tikhonov_equals_ridge_solve(kernel, n):
    x, y = _data(n, seed=n)
    lam = 0.05
    est = fit_spectral(kernel, tikhonov(), lam, x, y)
    M = gram(kernel, x) / (kernel.kappa ** 2 * n)
    expected = np.linalg.solve(M + lam * np.eye(n), y) / (kernel.kappa ** 2 * n)
    assert np.max(np.abs(est.coefficients - expected)) < 1e-8


def test_landweber_single_step(kernel):
    x, y = _data(16, seed=3)
    est = fit_iterative(kernel, landweber(), 1.0, x, y)
    assert np.allclose(est.coefficients, y / (kernel.kappa ** 2 * 16),
                       atol=0, rtol=1e-15)


@pytest.mark.parametrize("k", [1, 3, 10, 42, 100])
def test_landweber_paths_agree(kernel, k):
    x, y = _data(64, seed=k)
    lam = 1.0 / k
    it = fit_iterative(kernel, landweber(), lam, x, y)
    sp = fit_spectral(kernel, landweber(), lam, x, y)
    assert np.max(np.abs(it.coefficients - sp.coefficients)) < 1e-8


@pytest.mark.parametrize("k", [1, 2, 5, 20, 100])
def test_nu_method_paths_agree(kernel, k):
    x, y = _data(16, seed=k + 100)
    lam = float(k) ** -2
    it = fit_iterative(kernel, nu_method(), lam, x, y)
    sp = fit_spectral(kernel, nu_method(), lam, x, y)
    assert np.max(np.abs(it.coefficients - sp.coefficients)) < 1e-6


def test_fit_iterative_rejects_non_iterative(kernel):
    x, y = _data(8)
    with pytest.raises(ValueError):
        fit_iterative(kernel, tikhonov(), 0.5, x, y)


def test_size_mismatch_rejected(kernel):
    with pytest.raises(ValueError):
        fit_spectral(kernel, tikhonov(), 0.5, [0.1, 0.2], [1.0])
    with pytest.raises(ValueError):
        fit_spectral(kernel, tikhonov(), 0.5, [], [])


def test_predict_values(kernel):
    zero = KernelExpansion(coefficients=np.zeros(2),
                           points=np.array([0.2, 0.8]), kernel=kernel)
    assert predict(zero, 0.5) == 0.0
    single = KernelExpansion(coefficients=np.array([2.0]),
                             points=np.array([0.5]), kernel=kernel)
    assert predict(single, 0.5) == pytest.approx(0.5, abs=0)


def test_predict_additivity(kernel):
    rng = np.random.default_rng(9)
    pts = rng.random(10)
    a1, a2 = rng.standard_normal(10), rng.standard_normal(10)
    xs = rng.random(20)
    e1 = KernelExpansion(coefficients=a1, points=pts, kernel=kernel)
    e2 = KernelExpansion(coefficients=a2, points=pts, kernel=kernel)
    e12 = KernelExpansion(coefficients=a1 + a2, points=pts, kernel=kernel)
    assert np.allclose(predict(e12, xs), predict(e1, xs) + predict(e2, xs),
                       rtol=1e-12, atol=1e-15)


def test_scale_covariance(kernel):
    # a power-of-two factor scales every intermediate exactly, so the
    # linearity in y holds bitwise
    x, y = _data(32, seed=11)
    for filt, lam in [(tikhonov(), 0.05), (landweber(), 0.02),
                      (nu_method(), 0.04), (spectral_cutoff(), 0.1)]:
        base = fit_spectral(kernel, filt, lam, x, y)
        scaled = fit_spectral(kernel, filt, lam, x, 2.0 * y)
        assert np.array_equal(scaled.coefficients, 2.0 * base.coefficients)
        general = fit_spectral(kernel, filt, lam, x, 3.0 * y)
        assert np.allclose(general.coefficients, 3.0 * base.coefficients,
                           rtol=1e-11, atol=1e-14)


def test_spectral_model_invariants(kernel):
    x, _ = _data(48, seed=13)
    model = spectral_model(kernel, x)
    ev = model.eigenvalues
    assert np.all(np.diff(ev) <= 0)
    assert ev.min() >= 0.0 and ev.max() <= 1.0
    V = model.eigenvectors
    assert np.max(np.abs(V.T @ V - np.eye(48))) < 1e-8


def test_filtered_spectrum_respects_axioms(kernel):
    x, _ = _data(40, seed=17)
    model = spectral_model(kernel, x)
    pos = model.eigenvalues[model.eigenvalues > 0]
    for filt, lam in [(tikhonov(), 0.03), (landweber(), 0.01),
                      (nu_method(), 0.04), (spectral_cutoff(), 0.02)]:
        gv = filter_values(filt, lam, pos)
        lam_eff = filt.effective_lambda(lam)
        assert np.max(np.abs(gv * pos)) <= filt.Dprime + 1e-12
        assert np.max(np.abs(gv)) <= filt.E / lam_eff + 1e-9
        assert np.max(np.abs(1 - gv * pos)) <= filt.gamma0 + 1e-12
