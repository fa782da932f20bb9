"""Command-line front end.

    rfspectrum figure1 --out results/ --set trials=5
    rfspectrum bounds --config thm1.json
    rfspectrum verify --config verify_thm4.json --threads 4

Exit status: 0 on success, 2 on configuration errors, 3 on numerical failure.
Outputs are written to a temporary directory and renamed into ``--out`` only
after every artifact has been produced.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shutil
import sys
import tempfile

import numpy as np

from . import bounds, experiments, kernels
from .errors import ConfigurationError, ConvergenceError
from .features import build_feature_matrix, matrix_to_csv
from .sampling import DistributionSpec, sample_cloud

log = logging.getLogger("rfspectrum")

FIGURES = {
    "figure1": "fig1_extreme_sv_vs_d",
    "figure2": "fig2_sv_distribution_vs_N",
    "figure3": "fig3_sv_distribution_vs_sigma",
}
SUBCOMMANDS = ("spectrum", "figure1", "figure2", "figure3", "verify", "bounds", "kernel")

SPECTRUM_DEFAULTS = dict(m=100, N=5000, d=10, gamma=1.0, sigma=3.0, seed=20220101,
                         data_family="gaussian", weight_family="gaussian", normalize=True)
KERNEL_DEFAULTS = dict(kind="over_weights", n=10, d=5, gamma=1.0, sigma=1.0,
                       family="gaussian", seed=20220101)


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _load_config(args):
    cfg = {}
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigurationError("config must be a JSON object")
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        cfg[key] = _parse_value(value)
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _merge(defaults, cfg, where):
    unknown = sorted(set(cfg) - set(defaults))
    if unknown:
        raise ConfigurationError(f"unknown {where} config keys: {unknown}")
    out = dict(defaults)
    out.update(cfg)
    return out


def _comment(cfg):
    return "# config: " + json.dumps(cfg, sort_keys=True) + "\n"


def _campaign(experiment, cfg, threads):
    if cfg.setdefault("experiment", experiment) != experiment:
        raise ConfigurationError(f"config experiment {cfg['experiment']!r} != {experiment!r}")
    config = experiments.ExperimentConfig.from_dict(cfg)
    return experiments.run_campaign(config, threads=threads)


def cmd_figure(name, cfg, args):
    from . import plotting

    experiment = FIGURES[name]
    result = _campaign(experiment, cfg, args.threads)
    return {
        f"{experiment}.csv": experiments.result_to_csv(result),
        f"{experiment}.svg": lambda path: plotting.plot_result(result, path),
    }


def cmd_verify(cfg, args):
    experiment = cfg.get("experiment")
    if experiment is None or not (experiment.startswith("verify_") or experiment == "lemma2_tail"):
        raise ConfigurationError("verify needs a config with a verify_* or lemma2_tail experiment")
    result = _campaign(experiment, cfg, args.threads)
    files = {f"{experiment}.csv": experiments.result_to_csv(result)}
    if any(p.bound_report is not None for p in result.points):
        files[f"{experiment}_bounds.json"] = experiments.bound_reports_json(result)
        for p in result.points:
            if p.bound_report is not None:
                extras = ", ".join(f"{k}={v:.4g}" for k, v in p.extras.items())
                print(f"{p.params} {extras}")
                print(p.bound_report.table())
    return files


def cmd_bounds(cfg, args):
    cfg = dict(cfg)
    theorem = cfg.pop("theorem", None)
    if theorem is None:
        raise ConfigurationError("bounds config needs a 'theorem' key")
    report = bounds.evaluate(theorem, **cfg)
    print(report.table())
    return {"bounds.json": report.to_json(indent=2, sort_keys=True) + "\n"}


def cmd_spectrum(cfg, args):
    from .experiments import feature_singular_values

    cfg = _merge(SPECTRUM_DEFAULTS, cfg, "spectrum")
    from . import rng

    data_seed, weight_seed = rng.child_seeds(cfg["seed"], 2)
    d = int(cfg["d"])
    data = sample_cloud(DistributionSpec.for_data(cfg["gamma"], d, cfg["data_family"]),
                        cfg["m"], data_seed)
    weights = sample_cloud(DistributionSpec.for_weights(cfg["sigma"], d, cfg["weight_family"]),
                           cfg["N"], weight_seed)
    sv = feature_singular_values(build_feature_matrix(data, weights), cfg["normalize"])
    cond = sv[-1] / sv[0] if sv[0] > 1e-14 * sv[-1] else float("inf")
    print(f"sigma_min={sv[0]:.6g} sigma_max={sv[-1]:.6g} condition_number={cond:.6g}")
    body = "index,value\n" + "".join(f"{i},{v:.17g}\n" for i, v in enumerate(sv))
    return {"spectrum.csv": _comment(cfg) + body}


def cmd_kernel(cfg, args):
    cfg = _merge(KERNEL_DEFAULTS, cfg, "kernel")
    kind = kernels.ExpectationKind(cfg["kind"])
    n, d = int(cfg["n"]), int(cfg["d"])
    if kind is kernels.ExpectationKind.OVER_DATA:
        cloud = sample_cloud(DistributionSpec.for_weights(cfg["sigma"], d, cfg["family"]),
                             n, cfg["seed"])
        mat = kernels.expected_gram_over_data(cloud, cfg["gamma"])
    elif kind is kernels.ExpectationKind.OVER_WEIGHTS:
        cloud = sample_cloud(DistributionSpec.for_data(cfg["gamma"], d, cfg["family"]),
                             n, cfg["seed"])
        mat = kernels.gaussian_kernel_over_weights(cloud, cfg["sigma"])
    else:
        mat = kernels.full_expectation_matrix(n, cfg["gamma"], cfg["sigma"], d)
    return {"kernel.csv": _comment(cfg) + matrix_to_csv(mat)}


def _commit(files, out_dir):
    """Render every artifact in a temp dir, then move them into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".rfspectrum-", dir=out_dir)
    try:
        for name, content in files.items():
            path = os.path.join(tmp, name)
            if callable(content):
                content(path)
            else:
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(content)
        written = []
        for name in files:
            final = os.path.join(out_dir, name)
            os.replace(os.path.join(tmp, name), final)
            written.append(final)
        return written
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rfspectrum",
        description="Spectra of random feature matrices: figures, checks and bounds.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", default=".", help="output directory (default: .)")
    parser.add_argument("--seed", type=int, help="override the base seed")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for trials (results do not depend on it)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config entry; VALUE is parsed as JSON when possible")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def run(argv=None):
    """Parse ``argv``, run the subcommand and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.threads < 1:
            raise ConfigurationError("--threads must be >= 1")
        cfg = _load_config(args)
        if args.subcommand in FIGURES:
            files = cmd_figure(args.subcommand, cfg, args)
        else:
            handler = {"verify": cmd_verify, "bounds": cmd_bounds,
                       "spectrum": cmd_spectrum, "kernel": cmd_kernel}[args.subcommand]
            files = handler(cfg, args)
        for path in _commit(files, args.out):
            log.info("wrote %s", path)
    except (ConfigurationError, ValueError, TypeError) as exc:
        print(f"rfspectrum: config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"rfspectrum: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
