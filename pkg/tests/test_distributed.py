import numpy as np
import pytest

from splitkern.distributed import (AveragedEstimator, diagnostic_split,
                                   fit_distributed, partition)
from splitkern.estimator import fit_spectral
from splitkern.filters import spectral_cutoff, tikhonov
from splitkern.kernels import sobolev_min
from splitkern.smoothness import quadratic_bump, zero_target


@pytest.fixture
def kernel():
    return sobolev_min()


def test_partition_contiguous():
    part = partition(6, 3)
    assert [list(b) for b in part.blocks()] == [[0, 1], [2, 3], [4, 5]]
    assert partition(6, 1).blocks()[0].tolist() == list(range(6))


def test_partition_balanced_remainder():
    part = partition(7, 3)
    assert part.sizes.tolist() == [3, 2, 2]
    all_idx = np.sort(np.concatenate(part.blocks()))
    assert np.array_equal(all_idx, np.arange(7))


def test_partition_validation():
    with pytest.raises(ValueError):
        partition(3, 4)
    with pytest.raises(ValueError):
        partition(0, 1)
    with pytest.raises(ValueError):
        partition(5, 0)


def test_partition_shuffle_deterministic():
    a = partition(40, 4, shuffle_seed=7)
    b = partition(40, 4, shuffle_seed=7)
    c = partition(40, 4, shuffle_seed=8)
    assert np.array_equal(a.assignment, b.assignment)
    assert not np.array_equal(a.assignment, c.assignment)
    for part in (a, c):
        assert np.array_equal(
            np.sort(np.concatenate(part.blocks())), np.arange(40))


def _data(n, seed=0, sigma=0.1):
    rng = np.random.default_rng(seed)
    x = rng.random(n)
    y = 0.5 * x * (1 - x) + sigma * rng.standard_normal(n)
    return x, y


def test_m1_identity(kernel):
    x, y = _data(64)
    single = fit_spectral(kernel, tikhonov(), 0.1, x, y)
    avg = fit_distributed(kernel, tikhonov(), 0.1, x, y, partition(64, 1))
    assert avg.m == 1
    assert np.array_equal(avg.block_fits[0].coefficients, single.coefficients)


def test_prediction_is_mean_of_local_predictions(kernel):
    x, y = _data(64, seed=1)
    part = partition(64, 2)
    avg = fit_distributed(kernel, tikhonov(), 0.1, x, y, part)
    rng = np.random.default_rng(2)
    xs = rng.random(100)
    locals_ = np.stack([f(xs) for f in avg.block_fits])
    assert np.max(np.abs(avg(xs) - locals_.mean(axis=0))) < 1e-12
    assert abs(avg(0.3) - 0.5 * (avg.block_fits[0](0.3)
                                 + avg.block_fits[1](0.3))) < 1e-12


def test_identical_blocks_average_to_local(kernel):
    x_half, y_half = _data(16, seed=3)
    x = np.concatenate([x_half, x_half])
    y = np.concatenate([y_half, y_half])
    avg = fit_distributed(kernel, tikhonov(), 0.2, x, y, partition(32, 2))
    local = avg.block_fits[0]
    for xs in np.linspace(0, 1, 17):
        assert abs(avg(xs) - local(xs)) < 1e-13


def test_block_order_permutation_invariance(kernel):
    x, y = _data(60, seed=4)
    avg = fit_distributed(kernel, tikhonov(), 0.05, x, y, partition(60, 5))
    reordered = AveragedEstimator(block_fits=avg.block_fits[::-1])
    xs = np.random.default_rng(5).random(100)
    assert np.max(np.abs(avg(xs) - reordered(xs))) < 1e-12


def test_as_expansion_matches_mean(kernel):
    x, y = _data(48, seed=6)
    avg = fit_distributed(kernel, tikhonov(), 0.05, x, y, partition(48, 3))
    exp = avg.as_expansion()
    xs = np.random.default_rng(7).random(25)
    assert np.allclose(exp(xs), avg(xs), atol=1e-14)


def test_gram_reuse_matches(kernel):
    from splitkern.kernels import gram
    x, y = _data(40, seed=8)
    part = partition(40, 4)
    direct = fit_distributed(kernel, tikhonov(), 0.1, x, y, part)
    reused = fit_distributed(kernel, tikhonov(), 0.1, x, y, part,
                             G=gram(kernel, x))
    for a, b in zip(direct.block_fits, reused.block_fits):
        assert np.array_equal(a.coefficients, b.coefficients)


def test_variance_reduction_through_averaging(kernel):
    # pure-noise target, underregularized fits: averaging m = 8 nearly
    # interpolating blocks shrinks the prediction variance vs m = 1
    lam = 1e-4
    preds1, preds8 = [], []
    for seed in range(30):
        rng = np.random.default_rng(seed)
        x = rng.random(256)
        y = rng.standard_normal(256)
        one = fit_distributed(kernel, tikhonov(), lam, x, y, partition(256, 1))
        eight = fit_distributed(kernel, tikhonov(), lam, x, y,
                                partition(256, 8))
        preds1.append(one(0.5))
        preds8.append(eight(0.5))
    assert np.var(preds8) < np.var(preds1)


def test_diagnostic_split_zero_target(kernel):
    x = np.random.default_rng(9).random(32)
    target = zero_target()
    split = diagnostic_split(kernel, tikhonov(), 0.1, x, target(x),
                             partition(32, 2), target)
    assert split.approximation_norm == pytest.approx(0.0, abs=1e-12)
    assert split.sample_norm == pytest.approx(0.0, abs=1e-12)


def test_diagnostic_split_noise_free_sample_part_vanishes(kernel):
    target = quadratic_bump()
    x = np.random.default_rng(10).random(64)
    split = diagnostic_split(kernel, tikhonov(), 0.05, x, target(x),
                             partition(64, 4), target)
    assert split.sample_norm < 1e-10
    assert split.approximation_norm > 0


def test_diagnostic_split_approximation_decreases_with_lambda(kernel):
    # cut-off surrogate at m = 1 is an orthogonal spectral projection of
    # the target, so its bias shrinks monotonically as lambda decreases
    target = quadratic_bump()
    rng = np.random.default_rng(11)
    x = rng.random(64)
    y = target(x) + 0.01 * rng.standard_normal(64)
    lams = np.logspace(0, -6, 13)
    norms = [diagnostic_split(kernel, spectral_cutoff(), lam, x, y,
                              partition(64, 1), target).approximation_norm
             for lam in lams]
    assert np.all(np.diff(norms) <= 1e-12)
    # with several blocks the trend still points down across the grid
    norms2 = [diagnostic_split(kernel, spectral_cutoff(), lam, x, y,
                               partition(64, 2), target).approximation_norm
              for lam in lams]
    assert norms2[-1] < norms2[0]


def test_diagnostic_split_requires_norm(kernel):
    x = np.random.default_rng(12).random(16)
    with pytest.raises(ValueError):
        diagnostic_split(kernel, tikhonov(), 0.1, x, np.zeros(16),
                         partition(16, 2), lambda z: np.zeros_like(z))
