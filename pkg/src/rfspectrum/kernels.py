"""Closed-form expectations of the normalized Gram matrices.

* over data:    E_x[(1/m) A^* A], data x ~ N(0, (gamma^2/d) I)
* over weights: E_w[(1/N) A A^*], weights w ~ N(0, sigma^2 I) (Gaussian kernel)
* full:         E_{x,w}[...], both Gaussian; constant off-diagonal
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import ConfigurationError
from .features import HermitianMatrix
from .sampling import PointCloud


class ExpectationKind(str, Enum):
    OVER_DATA = "over_data"
    OVER_WEIGHTS = "over_weights"
    FULL_GAUSSIAN = "full_gaussian"


def _points(cloud):
    return cloud.points if isinstance(cloud, PointCloud) else np.atleast_2d(cloud)


def pairwise_sq_distances(points):
    pts = np.asarray(points, dtype=np.float64)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sum(diff * diff, axis=-1)


def _positive(name, value):
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")


def _unit_diagonal(k):
    k[np.diag_indices_from(k)] = 1.0
    return HermitianMatrix(k.astype(np.complex128))


def expected_gram_over_data(weights, gamma) -> HermitianMatrix:
    """E_x[(1/m) A^* A]: entry (j, k) is exp(-gamma^2 |w_j - w_k|^2 / (2d))."""
    _positive("gamma", gamma)
    w = _points(weights)
    d = w.shape[1]
    return _unit_diagonal(np.exp(-(gamma**2) * pairwise_sq_distances(w) / (2.0 * d)))


def gaussian_kernel_over_weights(data, sigma) -> HermitianMatrix:
    """E_w[(1/N) A A^*]: the Gaussian kernel exp(-sigma^2 |x_j - x_k|^2 / 2)."""
    _positive("sigma", sigma)
    x = _points(data)
    return _unit_diagonal(np.exp(-(sigma**2) * pairwise_sq_distances(x) / 2.0))


def full_expectation_entry(gamma, sigma, d) -> float:
    """Off-diagonal of the full expectation, (2 gamma^2 sigma^2 / d + 1)^(-d/2).

    Tends to exp(-gamma^2 sigma^2) as d grows.
    """
    _positive("gamma", gamma)
    _positive("sigma", sigma)
    _positive("d", d)
    return math.exp(-0.5 * d * math.log1p(2.0 * gamma**2 * sigma**2 / d))


def full_expectation_matrix(n, gamma, sigma, d) -> HermitianMatrix:
    """n x n matrix with unit diagonal and constant off-diagonal entry."""
    if int(n) != n or n < 1:
        raise ConfigurationError(f"n must be a positive integer, got {n}")
    v = full_expectation_entry(gamma, sigma, d)
    k = np.full((int(n), int(n)), v)
    return _unit_diagonal(k)


def expectation_matrix(kind, cloud=None, gamma=None, sigma=None, n=None, d=None):
    """Dispatch on :class:`ExpectationKind`."""
    kind = ExpectationKind(kind)
    if kind is ExpectationKind.OVER_DATA:
        return expected_gram_over_data(cloud, gamma)
    if kind is ExpectationKind.OVER_WEIGHTS:
        return gaussian_kernel_over_weights(cloud, sigma)
    return full_expectation_matrix(n, gamma, sigma, d)
