import numpy as np
import pytest

from splitkern.estimator import KernelExpansion
from splitkern.kernels import (evaluate, gram, kappa_of, rkhs_norm_sq,
                               sobolev_min, user_kernel)


@pytest.fixture
def kernel():
    return sobolev_min()


def test_eval_hand_values(kernel):
    assert evaluate(kernel, 0.5, 0.5) == 0.25
    assert evaluate(kernel, 0.25, 0.75) == 0.0625


def test_eval_vanishes_at_left_endpoint(kernel):
    for t in [0.0, 0.3, 0.5, 0.99, 1.0]:
        assert evaluate(kernel, 0.0, t) == 0.0


def test_eval_rejects_out_of_domain(kernel):
    with pytest.raises(ValueError):
        evaluate(kernel, -0.1, 0.5)
    with pytest.raises(ValueError):
        evaluate(kernel, 0.5, 1.5)


def test_kappa_values(kernel):
    assert kappa_of(kernel) == 0.5
    zero = user_kernel(lambda x, t: np.zeros_like(x * t), kappa=0.0)
    assert kappa_of(zero) == 0.0
    other = user_kernel(lambda x, t: np.minimum(x, t), kappa=1.0)
    assert kappa_of(other) == 1.0


def test_gram_hand_values(kernel):
    assert np.array_equal(gram(kernel, [0.5]), [[0.25]])
    assert np.array_equal(gram(kernel, [0.0, 1.0]), np.zeros((2, 2)))
    G = gram(kernel, [0.25, 0.75])
    assert np.allclose(G, [[0.1875, 0.0625], [0.0625, 0.1875]], atol=0)


def test_gram_rejects_empty(kernel):
    with pytest.raises(ValueError):
        gram(kernel, [])


def test_symmetry_exact(kernel):
    rng = np.random.default_rng(1)
    x = rng.random(1000)
    t = rng.random(1000)
    assert np.array_equal(evaluate(kernel, x, t), evaluate(kernel, t, x))


def test_gram_positive_semidefinite(kernel):
    rng = np.random.default_rng(2)
    for size in [1, 2, 7, 33, 64]:
        G = gram(kernel, rng.random(size))
        ev = np.linalg.eigvalsh(G)
        assert ev.min() >= -1e-10 * max(ev.max(), 1e-30)


def test_kappa_bounds_diagonal(kernel):
    rng = np.random.default_rng(3)
    x = rng.random(1000)
    assert np.all(evaluate(kernel, x, x) <= kernel.kappa ** 2 + 1e-15)


def test_reproducing_property(kernel):
    # <f_hat, K_x> via the coefficient formula equals pointwise evaluation
    rng = np.random.default_rng(4)
    pts = rng.random(32)
    alpha = rng.standard_normal(32)
    fhat = KernelExpansion(coefficients=alpha, points=pts, kernel=kernel)
    for x in rng.random(50):
        inner = float(alpha @ evaluate(kernel, pts, np.full_like(pts, x)))
        assert abs(inner - fhat(x)) < 1e-12


def test_rkhs_norm_sq_values(kernel):
    zero = KernelExpansion(coefficients=np.zeros(3),
                           points=np.array([0.1, 0.5, 0.9]), kernel=kernel)
    assert rkhs_norm_sq(zero) == 0.0
    single = KernelExpansion(coefficients=np.array([2.0]),
                             points=np.array([0.5]), kernel=kernel)
    assert rkhs_norm_sq(single) == pytest.approx(1.0, abs=0)
    cancel = KernelExpansion(coefficients=np.array([1.0, -1.0]),
                             points=np.array([0.3, 0.3]), kernel=kernel)
    assert rkhs_norm_sq(cancel) == pytest.approx(0.0, abs=1e-15)


def test_rkhs_norm_matches_derivative_integral(kernel):
    # independent check: ||f||^2 = int f'^2 for f in the expansion span,
    # with f' piecewise constant between anchors
    rng = np.random.default_rng(5)
    pts = rng.random(12)
    alpha = rng.standard_normal(12)
    exp = KernelExpansion(coefficients=alpha, points=pts, kernel=kernel)

    edges = np.unique(np.concatenate([[0.0], np.sort(pts), [1.0]]))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        deriv = float(np.sum(alpha * (mid < pts)) - alpha @ pts)
        total += deriv ** 2 * (b - a)
    assert rkhs_norm_sq(exp) == pytest.approx(total, rel=1e-10)
