"""Seeded point clouds (data and weights) and separation diagnostics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import ConfigurationError

FAMILIES = ("gaussian", "rademacher", "uniform")


@dataclass(frozen=True)
class DistributionSpec:
    """i.i.d. mean-zero components drawn from ``family`` with the given variance.

    Use :meth:`for_data` / :meth:`for_weights` rather than computing the
    per-component variance by hand: data components have variance
    ``gamma**2 / d`` so that ``E||x||^2 = gamma**2`` in every dimension, weight
    components have variance ``sigma**2``.
    """

    family: str
    variance: float
    d: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ConfigurationError(f"variance must be positive, got {self.variance}")
        if int(self.d) != self.d or self.d < 1:
            raise ConfigurationError(f"dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "variance", float(self.variance))

    @classmethod
    def for_data(cls, gamma, d, family="gaussian"):
        if gamma <= 0:
            raise ConfigurationError("gamma must be positive")
        return cls(family, gamma**2 / d, d)

    @classmethod
    def for_weights(cls, sigma, d, family="gaussian"):
        if sigma <= 0:
            raise ConfigurationError("sigma must be positive")
        return cls(family, sigma**2, d)

    @property
    def scale(self):
        """Standard deviation of one component."""
        return math.sqrt(self.variance)

    def to_dict(self):
        return {"family": self.family, "variance": self.variance, "d": self.d}

    @classmethod
    def from_dict(cls, obj):
        try:
            return cls(obj["family"], obj["variance"], obj["d"])
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"bad distribution object {obj!r}") from exc

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray = field(repr=False)
    spec: DistributionSpec
    seed: int

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.spec.d:
            raise ConfigurationError(
                f"points must have shape (n, {self.spec.d}), got {pts.shape}"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.spec.d

    def __len__(self):
        return self.n


def _draw(spec, count, seed):
    if spec.family == "gaussian":
        return spec.scale * rng.standard_normal(seed, count)
    if spec.family == "rademacher":
        return spec.scale * rng.random_signs(seed, count)
    # uniform on [-a, a] with a = sqrt(3 * variance)
    half_width = math.sqrt(3.0 * spec.variance)
    return half_width * (2.0 * rng.uniform(seed, count) - 1.0)


def sample_cloud(spec: DistributionSpec, n: int, seed: int) -> PointCloud:
    """Draw ``n`` i.i.d. vectors from ``spec``; bit-identical for equal arguments."""
    if int(n) != n or n < 1:
        raise ConfigurationError(f"n must be a positive integer, got {n}")
    n = int(n)
    values = _draw(spec, n * spec.d, seed).reshape(n, spec.d)
    return PointCloud(values, spec, int(seed) & rng.MASK64)


def from_points(points, family="gaussian", variance=1.0, seed=0) -> PointCloud:
    """Wrap explicit coordinates (grids, hand-built examples) as a PointCloud."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return PointCloud(pts, DistributionSpec(family, variance, pts.shape[1]), seed)


@dataclass(frozen=True)
class SeparationReport:
    min_pairwise_sq_distance: float
    max_offdiag_inner: float
    delta2: float
    min_sq_norm: float

    @property
    def min_distance(self):
        return math.sqrt(self.min_pairwise_sq_distance)


def _pairwise_blocks(points, block=256):
    n = points.shape[0]
    for start in range(0, n, block):
        stop = min(start + block, n)
        yield start, stop, points[start:stop]


def separation_report(cloud: PointCloud) -> SeparationReport:
    """Exact pairwise statistics of a cloud.

    Distances are summed from explicit coordinate differences (no
    ``|a|^2 + |b|^2 - 2<a, b>`` shortcut), so coincident points give exactly 0
    and the result does not depend on point order.
    """
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, float)
    n, d = pts.shape
    if n < 2:
        raise ConfigurationError("separation needs at least two points")
    min_sq = math.inf
    max_inner = 0.0
    for start, stop, rows in _pairwise_blocks(pts):
        diff = rows[:, None, :] - pts[None, :, :]
        sq = np.sum(diff * diff, axis=-1)
        inner = np.abs(np.sum(rows[:, None, :] * pts[None, :, :], axis=-1))
        local = np.arange(stop - start)
        sq[local, start + local] = np.inf
        inner[local, start + local] = 0.0
        min_sq = min(min_sq, float(sq.min()))
        max_inner = max(max_inner, float(inner.max()))
    norms = np.sum(pts * pts, axis=1)
    return SeparationReport(
        min_pairwise_sq_distance=min_sq,
        max_offdiag_inner=max_inner,
        delta2=max_inner / d,
        min_sq_norm=float(norms.min()),
    )


def empirical_norm_tail(spec: DistributionSpec, trials: int, t: float, seed: int) -> float:
    """Fraction of draws X ~ spec with | ||X||_2 - sqrt(d) | >= t.

    Requires unit component variance (the normalisation under which the norm
    concentrates around sqrt(d)).
    """
    if not math.isclose(spec.variance, 1.0, rel_tol=0, abs_tol=1e-15):
        raise ConfigurationError("norm tail is defined for unit component variance")
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    cloud = sample_cloud(spec, trials, seed)
    dev = np.abs(np.linalg.norm(cloud.points, axis=1) - math.sqrt(spec.d))
    return float(np.mean(dev >= t))


def fit_norm_tail_constant(fraction: float, t: float) -> float:
    """Largest C with ``fraction <= 2 exp(-C t^2)``; ``inf`` when nothing exceeded."""
    if t <= 0:
        raise ConfigurationError("t must be positive to fit a tail constant")
    if fraction <= 0:
        return math.inf
    return max(0.0, -math.log(fraction / 2.0) / t**2)
