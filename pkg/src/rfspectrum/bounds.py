"""Numeric evaluation of the concentration bounds and their hypotheses.

Every ``check_*`` function returns a :class:`BoundReport` listing each
hypothesis as ``lhs <direction> rhs`` with its verdict, the bound the
conclusion guarantees, the failure probability, and the constants used.
Unspecified constants default to 1, except the sample-count constant of the
separated-weights check, which defaults to 6 so that the simplified Bernstein
tail stays at or below delta on the boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .features import HermitianMatrix

THEOREM_IDS = (
    "thm1", "thm2", "thm3", "thm4", "thm5", "thm6",
    "bernstein", "chi2", "gershgorin", "simplified_tail",
)
# equality passes; the slack only absorbs rounding in lhs/rhs arithmetic
_REL_SLACK = 1e-12


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: float
    rhs: float
    direction: str  # ">=" or "<="

    @property
    def holds(self):
        slack = _REL_SLACK * max(abs(self.lhs), abs(self.rhs))
        if self.direction == ">=":
            return self.lhs >= self.rhs - slack
        if self.direction == "<=":
            return self.lhs <= self.rhs + slack
        raise ValueError(f"unknown direction {self.direction!r}")

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "direction": self.direction,
            "holds": self.holds,
        }


@dataclass
class BoundReport:
    theorem_id: str
    conditions: list = field(default_factory=list)
    conclusion_bound: float = 0.0
    failure_probability: float | None = None
    constants_used: dict = field(default_factory=dict)

    @property
    def all_hold(self):
        return all(c.holds for c in self.conditions)

    def verdicts(self):
        return [c.holds for c in self.conditions]

    def condition(self, name):
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "theorem_id": self.theorem_id,
            "conditions": [c.to_dict() for c in self.conditions],
            "all_hold": self.all_hold,
            "conclusion_bound": self.conclusion_bound,
            "failure_probability": self.failure_probability,
            "constants_used": dict(self.constants_used),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def table(self):
        rows = [f"{self.theorem_id}: conclusion bound {self.conclusion_bound:.6g}"]
        if self.failure_probability is not None:
            rows[0] += f", failure probability {self.failure_probability:.6g}"
        width = max([len(c.name) for c in self.conditions] + [9])
        rows.append(f"  {'condition':<{width}}  {'lhs':>14}     {'rhs':>14}  verdict")
        for c in self.conditions:
            verdict = "pass" if c.holds else "FAIL"
            rows.append(
                f"  {c.name:<{width}}  {c.lhs:>14.6g}  {c.direction}  {c.rhs:>14.6g}  {verdict}"
            )
        if self.constants_used:
            consts = ", ".join(f"{k}={v:g}" for k, v in self.constants_used.items())
            rows.append(f"  constants: {consts}")
        return "\n".join(rows)


def _check_unit_interval(**values):
    for name, v in values.items():
        if not 0 < v < 1:
            raise ConfigurationError(f"{name} must lie in (0, 1), got {v}")


def _check_positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise ConfigurationError(f"{name} must be positive, got {v}")


# --- tail bounds ---------------------------------------------------------


def bernstein_tail(m, N, K, variance_param, t):
    """Matrix Bernstein: min(1, 2N exp(-(t^2/2) / (variance_param + K t / 3))).

    ``m`` is accepted for symmetry with the other tails; the sum over ``m``
    summands is already folded into ``variance_param``.
    """
    _check_positive(m=m, N=N, K=K, variance_param=variance_param, t=t)
    exponent = -(t * t / 2.0) / (variance_param + K * t / 3.0)
    return min(1.0, 2.0 * N * math.exp(exponent))


def separated_weights_variance(m, N, eta):
    """Bernstein variance parameter m [N (1 + eta) + (1 + eta)^2]."""
    return m * (N * (1.0 + eta) + (1.0 + eta) ** 2)


def separated_weights_tail(m, N, eta):
    """Unsimplified Bernstein tail for ||(1/m) A^*A - E_x[...]||_2 >= eta.

    Uses K = N + eta and the variance parameter above, with t = m eta.
    """
    return bernstein_tail(m, N, N + eta, separated_weights_variance(m, N, eta), m * eta)


def simplified_gram_tail(m, N, eta):
    """min(1, 2N exp(-m eta^2 / (5N + 9))), valid for N >= 9 and eta < 1."""
    if N < 9:
        raise ConfigurationError("the simplified tail assumes N >= 9")
    _check_unit_interval(eta=eta)
    _check_positive(m=m)
    return min(1.0, 2.0 * N * math.exp(-m * eta * eta / (5.0 * N + 9.0)))


def chi_square_chernoff(z, d):
    """Chernoff bound (z e^(1-z))^(d/2) on P(||w||^2 <= z sigma^2 d)."""
    if not 0 < z <= 1:
        raise ConfigurationError(f"z must lie in (0, 1], got {z}")
    _check_positive(d=d)
    return min(1.0, math.exp(0.5 * d * (math.log(z) + 1.0 - z)))


def gershgorin_bound(M, diagonal_reference=0.0):
    """max_j [ sum_{k != j} |M_jk| + |M_jj - diagonal_reference| ].

    Bounds ||M - diagonal_reference * I||_2 for Hermitian M.
    """
    a = M.entries if isinstance(M, HermitianMatrix) else np.asarray(M)
    mag = np.abs(a)
    diag = np.abs(np.diag(a) - diagonal_reference)
    off = mag.sum(axis=1) - np.diag(mag)
    return float(np.max(off + diag))


# --- theorem hypotheses --------------------------------------------------


def check_theorem1(d, m, N, gamma, sigma, delta, eta, C1=1.0, C2=1.0):
    """Underparameterized regime: ||(1/m) A^*A - I_N||_2 <= 2 eta w.p. >= 1 - 5 delta."""
    _check_unit_interval(delta=delta, eta=eta)
    _check_positive(d=d, m=m, N=N, gamma=gamma, sigma=sigma, C1=C1, C2=C2)
    conditions = [
        Condition("dimension", d, C1 * math.log(N / delta), ">="),
        Condition("variance_product", gamma**2 * sigma**2, 4.0 * math.log(2.0 * N / eta), ">="),
        Condition("sample_count", m, C2 * N * math.log(2.0 * N / delta) / eta**2, ">="),
        Condition("eta_ge_2delta", eta, 2.0 * delta, ">="),
    ]
    return BoundReport("thm1", conditions, 2.0 * eta, min(1.0, 5.0 * delta), {"C1": C1, "C2": C2})


def check_theorem2(d, m, N, gamma, sigma, delta, eta, C1=1.0, C2=1.0):
    """Overparameterized regime: the mirror of :func:`check_theorem1` with m <-> N."""
    report = check_theorem1(d, N, m, sigma, gamma, delta, eta, C1, C2)
    report.theorem_id = "thm2"
    return report


def check_theorem3(N, m, sigma, R, delta, eta, C=1.0):
    """Kernel concentration for data with minimum pairwise distance R."""
    _check_unit_interval(delta=delta, eta=eta)
    _check_positive(N=N, m=m, sigma=sigma, R=R, C=C)
    conditions = [
        Condition("feature_count", N, C * m * math.log(2.0 * m / delta) / eta**2, ">="),
        Condition("weight_variance", sigma**2, (2.0 / R) * math.log(m / eta), ">="),
    ]
    return BoundReport("thm3", conditions, eta, delta, {"C": C})


def check_theorem4(m, N, gamma, R, delta, eta, C=6.0):
    """Separated weights with |w_j - w_k|^2 >= R d: ||(1/m)A^*A - E_x[...]||_2 <= eta.

    The failure probability reported is the simplified Bernstein tail when
    N >= 9, else delta.
    """
    _check_unit_interval(delta=delta, eta=eta)
    _check_positive(m=m, N=N, gamma=gamma, R=R, C=C)
    conditions = [
        Condition("sample_count", m, C * N * math.log(2.0 * N / delta) / eta**2, ">="),
        Condition("data_variance", gamma**2, (2.0 / R) * math.log(N / eta), ">="),
    ]
    fail = simplified_gram_tail(m, N, eta) if N >= 9 else delta
    return BoundReport("thm4", conditions, eta, fail, {"C": C})


def check_separation(d, N, delta, t, C=1.0):
    """Subgaussian weights separate: |w_j - w_k|^2 >= (1 - 2t) d w.p. >= 1 - 2 delta.

    The conclusion bound is the squared-distance threshold (1 - 2t) d for unit
    component variance; multiply by sigma^2 otherwise.
    """
    _check_unit_interval(delta=delta)
    if not 0 < t < 0.5:
        raise ConfigurationError(f"t must lie in (0, 1/2), got {t}")
    _check_positive(d=d, N=N, C=C)
    conditions = [Condition("dimension", d, C * math.log(N / delta) / t**2, ">=")]
    return BoundReport("thm5", conditions, (1.0 - 2.0 * t) * d, min(1.0, 2.0 * delta), {"C": C})


def check_theorem6(d, N, gamma, sigma, delta, eta, C=1.0):
    """Expectation over data is close to I (and to the full expectation if eta >= 2 delta)."""
    _check_unit_interval(delta=delta, eta=eta)
    _check_positive(d=d, N=N, gamma=gamma, sigma=sigma, C=C)
    conditions = [
        Condition("dimension", d, C * math.log(N / delta), ">="),
        Condition("variance_product", gamma**2 * sigma**2, 4.0 * math.log(2.0 * N / eta), ">="),
        Condition("eta_ge_2delta", eta, 2.0 * delta, ">="),
    ]
    return BoundReport("thm6", conditions, eta, min(1.0, 2.0 * delta), {"C": C})


def _value_report(theorem_id, value, **constants):
    return BoundReport(theorem_id, [], value, None, constants)


_CHECKS = {
    "thm1": check_theorem1,
    "thm2": check_theorem2,
    "thm3": check_theorem3,
    "thm4": check_theorem4,
    "thm5": check_separation,
    "thm6": check_theorem6,
}


def evaluate(theorem_id, **params):
    """Build the report for ``theorem_id`` from keyword parameters.

    Tail bounds (``bernstein``, ``chi2``, ``simplified_tail``) yield reports
    without conditions whose conclusion is the bound value.
    """
    try:
        if theorem_id in _CHECKS:
            return _CHECKS[theorem_id](**params)
        if theorem_id == "bernstein":
            return _value_report("bernstein", bernstein_tail(**params))
        if theorem_id == "chi2":
            return _value_report("chi2", chi_square_chernoff(**params))
        if theorem_id == "simplified_tail":
            return _value_report("simplified_tail", simplified_gram_tail(**params))
        if theorem_id == "gershgorin":
            matrix = np.asarray(params.pop("matrix"), dtype=np.complex128)
            return _value_report("gershgorin", gershgorin_bound(matrix, **params))
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {theorem_id}: {exc}") from exc
    raise ConfigurationError(f"unknown theorem id {theorem_id!r}; expected one of {THEOREM_IDS}")
