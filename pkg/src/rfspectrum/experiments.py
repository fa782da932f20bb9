"""Seeded Monte Carlo campaigns: singular-value figures and concentration checks.

A campaign is a grid of parameter points times ``trials`` independent
trials.  Trial ``i`` of grid point ``g`` draws from the stream seeded with
``seed ^ ((g * trials + i) * TRIAL_STRIDE)``, so results are independent of
execution order and worker count.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds, kernels, rng
from .errors import ConfigurationError
from .features import HermitianMatrix, build_feature_matrix, gram_over_data, gram_over_weights
from .features import smaller_gram
from .sampling import FAMILIES, DistributionSpec, sample_cloud, separation_report
from .spectra import gram_to_singular, hermitian_eigh

EXPERIMENTS = (
    "fig1_extreme_sv_vs_d",
    "fig2_sv_distribution_vs_N",
    "fig3_sv_distribution_vs_sigma",
    "verify_thm1",
    "verify_thm2",
    "verify_thm3",
    "verify_thm4",
    "verify_thm5",
    "verify_thm6",
    "lemma2_tail",
)
DEFAULT_D_GRID = (1, 2, 3, 4, 6, 8, 10, 12, 16, 20)

_PER_EXPERIMENT = {
    "fig1_extreme_sv_vs_d": dict(sigma_grid=[2.0, 3.0]),
    "fig2_sv_distribution_vs_N": dict(N_grid=[500, 5000], sigma=3.0),
    "fig3_sv_distribution_vs_sigma": dict(sigma_grid=[2.0, 4.0], N=5000),
    "verify_thm1": dict(m_grid=[400, 1600], N=20, d_grid=[10], sigma=5.0, trials=10),
    "verify_thm2": dict(m=20, N_grid=[400, 1600], d_grid=[10], sigma=5.0),
    "verify_thm3": dict(m=20, N_grid=[500, 2000], d_grid=[10], sigma=3.0),
    "verify_thm4": dict(m_grid=[200, 800], N=20, d_grid=[10], sigma=3.0),
    "verify_thm5": dict(N=100, d_grid=[50], sigma=1.0, trials=100),
    "verify_thm6": dict(N=50, d_grid=[5, 10, 20, 40], sigma=3.0),
    "lemma2_tail": dict(d_grid=[100], t_grid=[1.0, 2.0, 3.0], samples=10000),
}


@dataclass
class ExperimentConfig:
    """Everything a campaign needs; unknown keys are rejected on load."""

    experiment: str
    m: int = 100
    N: int = 5000
    d_grid: list = field(default_factory=lambda: list(DEFAULT_D_GRID))
    gamma: float = 1.0
    sigma: float = 3.0
    sigma_grid: list = field(default_factory=lambda: [3.0])
    N_grid: list = field(default_factory=list)
    m_grid: list = field(default_factory=list)
    trials: int = 10
    seed: int = 20220101
    normalize: bool = True
    eta: float = 0.5
    delta: float = 0.05
    t: float = 0.25
    t_grid: list = field(default_factory=lambda: [1.0])
    samples: int = 10000
    families: list = field(default_factory=lambda: list(FAMILIES))
    data_family: str = "gaussian"
    weight_family: str = "gaussian"
    frozen_data: bool = True
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(
                f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}"
            )
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigurationError("trials must be a positive integer")
        if self.gamma <= 0 or self.sigma <= 0:
            raise ConfigurationError("gamma and sigma must be positive")
        if not self.d_grid or any(int(d) != d or d < 1 for d in self.d_grid):
            raise ConfigurationError("d_grid must be a nonempty list of positive integers")
        if not self.sigma_grid or any(s <= 0 for s in self.sigma_grid):
            raise ConfigurationError("sigma_grid must be a nonempty list of positive values")
        for name in ("m", "N", "samples"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        for name in ("N_grid", "m_grid"):
            if any(int(v) < 1 for v in getattr(self, name)):
                raise ConfigurationError(f"{name} entries must be >= 1")
        for fam in [self.data_family, self.weight_family, *self.families]:
            if fam not in FAMILIES:
                raise ConfigurationError(f"unknown family {fam!r}")

    @classmethod
    def for_experiment(cls, experiment, **overrides):
        params = dict(_PER_EXPERIMENT.get(experiment, {}))
        params.update(overrides)
        return cls(experiment=experiment, **params)

    @classmethod
    def from_dict(cls, obj):
        obj = dict(obj)
        if "experiment" not in obj:
            raise ConfigurationError("config needs an 'experiment' key")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {unknown}")
        return cls.for_experiment(obj.pop("experiment"), **obj)

    def to_dict(self):
        return dataclasses.asdict(self)

    def sample_grid(self, kind):
        grid = self.m_grid if kind == "m" else self.N_grid
        return [int(v) for v in grid] or [int(getattr(self, kind))]


@dataclass
class GridPoint:
    params: dict
    values: np.ndarray  # trials x statistics
    extras: dict = field(default_factory=dict)
    bound_report: bounds.BoundReport | None = None

    @property
    def mean(self):
        return self.values.mean(axis=0)

    @property
    def std(self):
        if self.values.shape[0] < 2:
            return np.zeros(self.values.shape[1])
        # infinite condition numbers make the spread undefined (nan)
        with np.errstate(invalid="ignore"):
            return self.values.std(axis=0, ddof=1)


@dataclass
class AggregateResult:
    experiment: str
    param_names: tuple
    stat_names: tuple
    points: list
    config: ExperimentConfig | None = None

    def column(self, stat):
        k = self.stat_names.index(stat)
        return np.array([p.mean[k] for p in self.points])

    def find(self, **params):
        for p in self.points:
            if all(p.params.get(k) == v for k, v in params.items()):
                return p
        raise KeyError(params)


# --- per-trial work ------------------------------------------------------


def _clouds(cfg, seed, m, N, d, sigma, gamma=None):
    data_seed, weight_seed = rng.child_seeds(seed, 2)
    gamma = cfg.gamma if gamma is None else gamma
    data = sample_cloud(DistributionSpec.for_data(gamma, d, cfg.data_family), m, data_seed)
    weights = sample_cloud(DistributionSpec.for_weights(sigma, d, cfg.weight_family), N, weight_seed)
    return data, weights


def feature_singular_values(A, normalize=True):
    """Ascending singular values of A, scaled by 1/sqrt(max(m, N)) if ``normalize``.

    Computed from the Gram over the shorter side.  With the scaling the
    squared singular values are the eigenvalues of the normalized Gram
    (1/N) A A^* (m <= N) or (1/m) A^* A (m > N), which concentrate near 1.
    """
    scale = 1.0 / max(A.m, A.N) if normalize else 1.0
    values, _ = hermitian_eigh(smaller_gram(A, scale=scale))
    return gram_to_singular(values)


def _fig1_trial(cfg, seed, params):
    data, weights = _clouds(cfg, seed, cfg.m, cfg.N, params["d"], params["sigma"])
    sv = feature_singular_values(build_feature_matrix(data, weights), cfg.normalize)
    lo, hi = sv[0], sv[-1]
    cond = hi / lo if lo > 1e-14 * hi else math.inf
    return np.array([lo, hi, cond])


def _svdist_trial(cfg, seed, params):
    N = params.get("N", cfg.N)
    sigma = params.get("sigma", cfg.sigma)
    data, weights = _clouds(cfg, seed, cfg.m, N, params["d"], sigma)
    return feature_singular_values(build_feature_matrix(data, weights), cfg.normalize)


def _spectral_norm(M):
    values, _ = hermitian_eigh(M)
    return float(np.max(np.abs(values)))


def _gram_identity_deviation(A, over):
    """||G - I|| for G = (1/m)A^*A (over='weights') or (1/N)AA^* (over='data').

    Uses the eigenvalues of the smaller Gram; the larger one shares its
    nonzero spectrum and has extra zero eigenvalues.
    """
    if over == "weights":
        size, scale = A.N, 1.0 / A.m
    else:
        size, scale = A.m, 1.0 / A.N
    values, _ = hermitian_eigh(smaller_gram(A, scale=scale))
    dev = float(np.max(np.abs(values - 1.0)))
    if size > min(A.m, A.N):
        dev = max(dev, 1.0)
    return dev


def _full_expectation(n, cfg, d, sigma):
    return kernels.full_expectation_matrix(n, cfg.gamma, sigma, d)


def _concentration_trial(cfg, seed, params):
    exp = cfg.experiment
    d, sigma = params["d"], params.get("sigma", cfg.sigma)
    m = params.get("m", cfg.m)
    N = params.get("N", cfg.N)
    if exp == "verify_thm6":
        # only the weights matter; E_x is closed form
        _, weight_seed = rng.child_seeds(seed, 2)
        spec = DistributionSpec.for_weights(sigma, d, cfg.weight_family)
        weights = sample_cloud(spec, N, weight_seed)
        ex = kernels.expected_gram_over_data(weights, cfg.gamma)
        full = _full_expectation(N, cfg, d, sigma)
        return np.array([_spectral_norm(ex - HermitianMatrix.identity(N)), _spectral_norm(ex - full)])
    data, weights = _clouds(cfg, seed, m, N, d, sigma)
    A = build_feature_matrix(data, weights)
    if exp == "verify_thm1":
        full = _full_expectation(N, cfg, d, sigma)
        return np.array([
            _gram_identity_deviation(A, "weights"),
            _spectral_norm(gram_over_weights(A) - full),
        ])
    if exp == "verify_thm2":
        full = _full_expectation(m, cfg, d, sigma)
        return np.array([
            _gram_identity_deviation(A, "data"),
            _spectral_norm(gram_over_data(A) - full),
        ])
    if exp == "verify_thm4":
        ex = kernels.expected_gram_over_data(weights, cfg.gamma)
        return np.array([_spectral_norm(gram_over_weights(A) - ex)])
    raise ConfigurationError(f"{exp} is not a concentration experiment")


def _kernel_trial(cfg, seed, params, frozen):
    d, N, sigma = params["d"], params["N"], params.get("sigma", cfg.sigma)
    if frozen is None:
        data, weights = _clouds(cfg, seed, cfg.m, N, d, sigma)
    else:
        data = frozen[d]
        _, weight_seed = rng.child_seeds(seed, 2)
        spec = DistributionSpec.for_weights(sigma, d, cfg.weight_family)
        weights = sample_cloud(spec, N, weight_seed)
    A = build_feature_matrix(data, weights)
    K = kernels.gaussian_kernel_over_weights(data, sigma)
    dev = _spectral_norm(gram_over_data(A) - K) if cfg.m > 1 else 0.0
    R = separation_report(data).min_distance if cfg.m > 1 else math.inf
    return np.array([dev, R])


def _separation_trial(cfg, seed, params):
    d, fam = params["d"], params["family"]
    spec = DistributionSpec.for_weights(cfg.sigma, d, fam)
    rep = separation_report(sample_cloud(spec, cfg.N, seed))
    threshold = (1.0 - 2.0 * cfg.t) * cfg.sigma**2 * d
    passed = 1.0 if rep.min_pairwise_sq_distance >= threshold else 0.0
    return np.array([rep.min_pairwise_sq_distance, rep.delta2, rep.min_sq_norm, passed])


def _lemma2_trial(cfg, seed, params):
    spec = DistributionSpec(params["family"], 1.0, params["d"])
    pts = sample_cloud(spec, cfg.samples, seed).points
    dev = np.abs(np.linalg.norm(pts, axis=1) - math.sqrt(params["d"]))
    return np.array([float(np.mean(dev >= params["t"]))])


# --- campaign plumbing ---------------------------------------------------


def _grid(names, *axes):
    return names, [dict(zip(names, combo)) for combo in itertools.product(*axes)]


def _plan(cfg):
    """(param names, grid, stat names, trial function) for a config."""
    exp = cfg.experiment
    d_grid = [int(d) for d in cfg.d_grid]
    sigmas = [float(s) for s in cfg.sigma_grid]
    if exp == "fig1_extreme_sv_vs_d":
        names, grid = _grid(("sigma", "d"), sigmas, d_grid)
        return names, grid, ("sv_min", "sv_max", "condition_number"), _fig1_trial
    if exp in ("fig2_sv_distribution_vs_N", "fig3_sv_distribution_vs_sigma"):
        if exp.startswith("fig2"):
            names, grid = _grid(("N", "d"), cfg.sample_grid("N"), d_grid)
        else:
            names, grid = _grid(("sigma", "d"), sigmas, d_grid)
        k = min(cfg.m, max(p.get("N", cfg.N) for p in grid))
        return names, grid, tuple(f"sv_{i}" for i in range(k)), _svdist_trial
    if exp in ("verify_thm1", "verify_thm4"):
        names, grid = _grid(("m", "d"), cfg.sample_grid("m"), d_grid)
        stats = ("gram_minus_identity", "gram_minus_full") if exp == "verify_thm1" else (
            "gram_minus_expected",)
        return names, grid, stats, _concentration_trial
    if exp == "verify_thm2":
        names, grid = _grid(("N", "d"), cfg.sample_grid("N"), d_grid)
        return names, grid, ("gram_minus_identity", "gram_minus_full"), _concentration_trial
    if exp == "verify_thm6":
        names, grid = _grid(("N", "d"), cfg.sample_grid("N"), d_grid)
        return names, grid, ("expected_minus_identity", "expected_minus_full"), _concentration_trial
    if exp == "verify_thm3":
        names, grid = _grid(("N", "d"), cfg.sample_grid("N"), d_grid)
        return names, grid, ("gram_minus_kernel", "min_data_distance"), None
    if exp == "verify_thm5":
        names, grid = _grid(("family", "d"), list(cfg.families), d_grid)
        stats = ("min_pairwise_sq_distance", "delta2", "min_sq_norm", "separated")
        return names, grid, stats, _separation_trial
    if exp == "lemma2_tail":
        names, grid = _grid(("family", "d", "t"), list(cfg.families), d_grid, list(cfg.t_grid))
        return names, grid, ("tail_fraction",), _lemma2_trial
    raise ConfigurationError(f"unknown experiment {exp!r}")


def _frozen_data(cfg):
    """Data sampled once per dimension, shared by every trial (kernel campaigns)."""
    data_seed, _ = rng.child_seeds(rng.trial_seed(cfg.seed, 2**32 - 1), 2)
    out = {}
    for d in sorted({int(v) for v in cfg.d_grid}):
        spec = DistributionSpec.for_data(cfg.gamma, d, cfg.data_family)
        out[d] = sample_cloud(spec, cfg.m, data_seed)
    return out


def _bound_report(cfg, params, values):
    exp = cfg.experiment
    C = cfg.constants
    d = params.get("d")
    sigma = params.get("sigma", cfg.sigma)
    m = params.get("m", cfg.m)
    N = params.get("N", cfg.N)
    if exp == "verify_thm1":
        return bounds.check_theorem1(d, m, N, cfg.gamma, sigma, cfg.delta, cfg.eta,
                                     C.get("C1", 1.0), C.get("C2", 1.0))
    if exp == "verify_thm2":
        return bounds.check_theorem2(d, m, N, cfg.gamma, sigma, cfg.delta, cfg.eta,
                                     C.get("C1", 1.0), C.get("C2", 1.0))
    if exp == "verify_thm4":
        # Gaussian weights separate to |w_j - w_k|^2 >= sigma^2 d / 2 (t = 1/4)
        return bounds.check_theorem4(m, N, cfg.gamma, sigma**2 / 2.0, cfg.delta, cfg.eta,
                                     C.get("C", 6.0))
    if exp == "verify_thm6":
        return bounds.check_theorem6(d, N, cfg.gamma, sigma, cfg.delta, cfg.eta, C.get("C", 1.0))
    if exp == "verify_thm3":
        R = float(np.min(values[:, 1]))
        if not (math.isfinite(R) and R > 0):
            return None
        return bounds.check_theorem3(N, cfg.m, sigma, R, cfg.delta, cfg.eta, C.get("C", 1.0))
    if exp == "verify_thm5":
        return bounds.check_separation(d, cfg.N, cfg.delta, cfg.t, C.get("C", 1.0))
    return None


def _extras(cfg, stat_names, values):
    exp = cfg.experiment
    if exp in ("verify_thm1", "verify_thm2", "verify_thm3", "verify_thm4", "verify_thm6"):
        return {
            f"exceed_{name}": float(np.mean(values[:, k] > cfg.eta))
            for k, name in enumerate(stat_names)
            if name != "min_data_distance"
        }
    if exp == "verify_thm5":
        return {"separated_fraction": float(np.mean(values[:, -1]))}
    return {}


def run_campaign(cfg: ExperimentConfig, threads=None) -> AggregateResult:
    """Run every (grid point, trial) task and aggregate in grid order."""
    names, grid, stat_names, trial_fn = _plan(cfg)
    if cfg.experiment == "verify_thm3":
        frozen = _frozen_data(cfg) if cfg.frozen_data else None

        def trial_fn(c, s, p):
            return _kernel_trial(c, s, p, frozen)

    trials = int(cfg.trials)
    tasks = [
        (g, i, rng.trial_seed(cfg.seed, g * trials + i))
        for g in range(len(grid))
        for i in range(trials)
    ]

    def work(task):
        g, i, seed = task
        return g, i, trial_fn(cfg, seed, grid[g])

    workers = max(1, int(threads or 1))
    if workers == 1:
        outputs = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(work, tasks))
    outputs.sort(key=lambda r: (r[0], r[1]))

    k = len(stat_names)
    points = []
    for g, params in enumerate(grid):
        rows = [np.asarray(v, dtype=np.float64) for gg, _, v in outputs if gg == g]
        values = np.full((trials, k), np.nan)
        for i, row in enumerate(rows):
            values[i, : row.shape[0]] = row
        point = GridPoint(dict(params), values)
        point.extras = _extras(cfg, stat_names, values)
        point.bound_report = _bound_report(cfg, params, values)
        points.append(point)
    return AggregateResult(cfg.experiment, names, stat_names, points, cfg)


def run_fig1(cfg, threads=None):
    if cfg.experiment != "fig1_extreme_sv_vs_d":
        raise ConfigurationError("run_fig1 needs experiment fig1_extreme_sv_vs_d")
    return run_campaign(cfg, threads)


def run_sv_distribution(cfg, threads=None):
    if cfg.experiment not in ("fig2_sv_distribution_vs_N", "fig3_sv_distribution_vs_sigma"):
        raise ConfigurationError("run_sv_distribution needs a fig2/fig3 experiment")
    return run_campaign(cfg, threads)


def verify_concentration(cfg, threads=None):
    if cfg.experiment not in ("verify_thm1", "verify_thm2", "verify_thm4", "verify_thm6"):
        raise ConfigurationError("verify_concentration needs verify_thm1/2/4/6")
    return run_campaign(cfg, threads)


def verify_kernel_concentration(cfg, threads=None):
    if cfg.experiment != "verify_thm3":
        raise ConfigurationError("verify_kernel_concentration needs verify_thm3")
    return run_campaign(cfg, threads)


def verify_separation(cfg, threads=None):
    if cfg.experiment != "verify_thm5":
        raise ConfigurationError("verify_separation needs verify_thm5")
    return run_campaign(cfg, threads)


# --- output --------------------------------------------------------------


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def result_to_csv(result: AggregateResult) -> str:
    """CSV with a config comment line, one row per trial, then mean and std rows.

    Extra per-point summaries (exceedance fractions) follow as rows labelled
    with the summary name in the ``row`` column and the value in the first
    statistic column.
    """
    cfg = result.config.to_dict() if result.config is not None else {}
    lines = ["# config: " + json.dumps(cfg, sort_keys=True)]
    lines.append(",".join([*result.param_names, "row", *result.stat_names]))
    width = len(result.stat_names)
    for p in result.points:
        prefix = [_fmt(p.params[n]) for n in result.param_names]
        for i, row in enumerate(p.values):
            lines.append(",".join(prefix + [str(i)] + [_fmt(v) for v in row]))
        lines.append(",".join(prefix + ["mean"] + [_fmt(v) for v in p.mean]))
        lines.append(",".join(prefix + ["std"] + [_fmt(v) for v in p.std]))
        for name, value in sorted(p.extras.items()):
            lines.append(",".join(prefix + [name, _fmt(value)] + [""] * (width - 1)))
    return "\n".join(lines) + "\n"


def bound_reports_json(result: AggregateResult) -> str:
    payload = [
        {"params": p.params, "report": p.bound_report.to_dict()}
        for p in result.points
        if p.bound_report is not None
    ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
