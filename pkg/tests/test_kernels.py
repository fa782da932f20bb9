import math

import mpmath
import numpy as np
import pytest

from rfspectrum import ConfigurationError
from rfspectrum.bounds import gershgorin_bound
from rfspectrum.kernels import (
    ExpectationKind,
    expectation_matrix,
    expected_gram_over_data,
    full_expectation_entry,
    full_expectation_matrix,
    gaussian_kernel_over_weights,
)
from rfspectrum.sampling import DistributionSpec, from_points, sample_cloud
from rfspectrum.spectra import deviation_from_identity, hermitian_eigh


def test_coincident_weights_give_one():
    K = expected_gram_over_data(from_points([[1.0, 2.0], [1.0, 2.0]]), 3.0)
    np.testing.assert_array_equal(K.entries, np.ones((2, 2)))


def test_over_data_entry_value():
    # |w_j - w_k|^2 = 2 with d = 2
    K = expected_gram_over_data(from_points([[0.0, 0.0], [1.0, 1.0]]), 1.0)
    assert K.entries[0, 1].real == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert K.entries[0, 1].real == pytest.approx(0.60653066, abs=1e-8)


def test_over_weights_entry_value():
    K = gaussian_kernel_over_weights(from_points([[0.0, 0.0], [1.0, 1.0]]), 1.0)
    assert K.entries[0, 1].real == pytest.approx(0.36787944, abs=1e-8)
    np.testing.assert_array_equal(np.diag(K.entries), [1.0, 1.0])


def test_full_entry_values():
    assert full_expectation_entry(1.0, 1.0, 2) == pytest.approx(0.5, rel=1e-15)
    assert abs(full_expectation_entry(1.0, 1.0, 10**6) - math.exp(-1.0)) < 1e-5
    # log1p form stays accurate where (1 + 2/d)^(-d/2) loses digits
    d = 10**12
    exact = mpmath.exp(-mpmath.mpf(d) / 2 * mpmath.log1p(mpmath.mpf(2) / d))
    assert full_expectation_entry(1.0, 1.0, d) == pytest.approx(float(exact), rel=1e-13)


def test_full_matrix_structure():
    np.testing.assert_array_equal(full_expectation_matrix(1, 1.0, 1.0, 3).entries, [[1.0]])
    v = full_expectation_entry(0.7, 1.3, 4)
    vals, _ = hermitian_eigh(full_expectation_matrix(3, 0.7, 1.3, 4))
    np.testing.assert_allclose(vals, sorted([1 + 2 * v, 1 - v, 1 - v]), atol=1e-14)
    vals, _ = hermitian_eigh(full_expectation_matrix(2, 1.0, 1.0, 2))
    np.testing.assert_allclose(vals, [0.5, 1.5], atol=1e-14)


def test_invalid_parameters():
    with pytest.raises(ConfigurationError):
        full_expectation_entry(0.0, 1.0, 2)
    with pytest.raises(ConfigurationError):
        gaussian_kernel_over_weights(from_points([[0.0]]), -1.0)
    with pytest.raises(ConfigurationError):
        full_expectation_matrix(0, 1.0, 1.0, 2)


def test_dispatch():
    cloud = sample_cloud(DistributionSpec("gaussian", 1.0, 3), 4, 1)
    np.testing.assert_array_equal(
        expectation_matrix("over_data", cloud=cloud, gamma=2.0).entries,
        expected_gram_over_data(cloud, 2.0).entries,
    )
    np.testing.assert_array_equal(
        expectation_matrix(ExpectationKind.OVER_WEIGHTS, cloud=cloud, sigma=2.0).entries,
        gaussian_kernel_over_weights(cloud, 2.0).entries,
    )
    assert expectation_matrix("full_gaussian", n=2, gamma=1, sigma=1, d=2).entries[0, 1] == 0.5


def _within_3se(samples, target):
    se = samples.std(ddof=1) / math.sqrt(samples.size)
    return abs(samples.mean() - target) <= 3 * se + 1e-15


def test_over_data_monte_carlo():
    gen = np.random.default_rng(101)
    d, gamma = 3, 1.5
    w = sample_cloud(DistributionSpec.for_weights(1.0, d), 3, 4)
    K = expected_gram_over_data(w, gamma).entries
    x = gen.normal(0.0, gamma / math.sqrt(d), size=(200_000, d))
    for j, k in [(0, 1), (0, 2), (1, 2)]:
        phase = x @ (w.points[k] - w.points[j])
        assert _within_3se(np.cos(phase), K[j, k].real)
        assert _within_3se(np.sin(phase), 0.0)


def test_over_weights_monte_carlo():
    gen = np.random.default_rng(202)
    d, sigma = 4, 0.8
    x = sample_cloud(DistributionSpec.for_data(1.0, d), 3, 6)
    K = gaussian_kernel_over_weights(x, sigma).entries
    w = gen.normal(0.0, sigma, size=(200_000, d))
    for j, k in [(0, 1), (1, 2)]:
        phase = w @ (x.points[j] - x.points[k])
        assert _within_3se(np.cos(phase), K[j, k].real)


def test_full_entry_monte_carlo():
    gen = np.random.default_rng(303)
    d, gamma, sigma = 5, 1.0, 0.9
    diff = gen.normal(0.0, sigma, size=(200_000, d)) - gen.normal(0.0, sigma, size=(200_000, d))
    vals = np.exp(-(gamma**2) * np.sum(diff**2, axis=1) / (2 * d))
    assert _within_3se(vals, full_expectation_entry(gamma, sigma, d))


@pytest.mark.parametrize("seed", range(5))
def test_psd_and_unit_diagonal(seed):
    cloud = sample_cloud(DistributionSpec("gaussian", 0.3, 4), 25, seed)
    for M in (
        expected_gram_over_data(cloud, 1.0),
        gaussian_kernel_over_weights(cloud, 2.0),
        full_expectation_matrix(25, 1.0, 0.5, 4),
    ):
        assert np.all(M.entries.imag == 0)
        np.testing.assert_array_equal(np.diag(M.entries).real, 1.0)
        vals, _ = hermitian_eigh(M)
        assert vals[0] >= -1e-10


def test_monotone_in_scale():
    cloud = sample_cloud(DistributionSpec("uniform", 1.0, 3), 6, 2)
    off = ~np.eye(6, dtype=bool)
    prev_d = prev_w = None
    for s in (0.5, 1.0, 2.0):
        cur_d = expected_gram_over_data(cloud, s).entries.real[off]
        cur_w = gaussian_kernel_over_weights(cloud, s).entries.real[off]
        if prev_d is not None:
            assert np.all(cur_d < prev_d) and np.all(cur_w < prev_w)
        prev_d, prev_w = cur_d, cur_w
    assert full_expectation_entry(2.0, 1.0, 3) < full_expectation_entry(1.0, 1.0, 3)


@pytest.mark.parametrize("seed", range(5))
def test_gershgorin_dominates_deviation(seed):
    w = sample_cloud(DistributionSpec.for_weights(1.0, 3), 40, seed)
    E = expected_gram_over_data(w, 1.0)
    assert deviation_from_identity(E) <= gershgorin_bound(E, diagonal_reference=1.0) + 1e-10
