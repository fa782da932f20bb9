"""Matplotlib renderings of the figure campaigns (mean curves with one-std bands)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed salt and no timestamp so repeated renders are byte-identical
STYLE = {
    "svg.hashsalt": "rfspectrum",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.5,
}
_METADATA = {"svg": {"Date": None}, "png": {"Software": None}}


def _save(fig, path):
    fmt = str(path).rsplit(".", 1)[-1].lower()
    fig.savefig(path, format=fmt, metadata=_METADATA.get(fmt), bbox_inches="tight")
    plt.close(fig)


def _series(result, outer):
    groups = {}
    for p in result.points:
        groups.setdefault(p.params[outer], []).append(p)
    return groups


def plot_extreme_singular_values(result, path):
    """Min/max singular value against d, one colour per sigma."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.5, 3.6))
        lo_k = result.stat_names.index("sv_min")
        hi_k = result.stat_names.index("sv_max")
        for idx, (sigma, pts) in enumerate(sorted(_series(result, "sigma").items())):
            colour = f"C{idx}"
            d = np.array([p.params["d"] for p in pts])
            for k, style in ((lo_k, "-"), (hi_k, "--")):
                mean = np.array([p.mean[k] for p in pts])
                std = np.array([p.std[k] for p in pts])
                label = rf"$\sigma={sigma:g}$" if k == lo_k else None
                ax.plot(d, mean, style, color=colour, label=label)
                ax.fill_between(d, mean - std, mean + std, color=colour, alpha=0.25, lw=0)
        ax.axhline(1.0, color="0.5", lw=0.8, ls=":")
        ax.set_xlabel("dimension $d$")
        ax.set_ylabel("extreme singular values")
        ax.legend(frameon=False)
        _save(fig, path)


def plot_sv_distribution(result, path):
    """Sorted mean singular values, one panel per N (fig2) or sigma (fig3)."""
    outer = result.param_names[0]
    groups = sorted(_series(result, outer).items())
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(groups), figsize=(4.2 * len(groups), 3.4),
                                 sharey=True, squeeze=False)
        for ax, (value, pts) in zip(axes[0], groups):
            for idx, p in enumerate(pts):
                mean = p.mean[~np.isnan(p.mean)]
                ax.plot(np.arange(1, mean.size + 1), mean, color=f"C{idx % 10}",
                        label=f"d={p.params['d']}")
            ax.axhline(1.0, color="0.5", lw=0.8, ls=":")
            symbol = "N" if outer == "N" else r"\sigma"
            ax.set_title(rf"${symbol}={value:g}$")
            ax.set_xlabel("sorted index")
        axes[0][0].set_ylabel("singular value")
        axes[0][-1].legend(frameon=False, ncol=2)
        _save(fig, path)


def plot_result(result, path):
    if result.experiment.startswith("fig1"):
        plot_extreme_singular_values(result, path)
    elif result.experiment.startswith(("fig2", "fig3")):
        plot_sv_distribution(result, path)
    else:
        raise ValueError(f"no plot for {result.experiment}")
