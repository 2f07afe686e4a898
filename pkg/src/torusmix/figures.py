"""Figure emission for runs and sweeps (mix-norm curves, rate-vs-a, envelopes)."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "plot_mix_norm_curves",
    "plot_log_mix_norm_curves",
    "plot_rate_vs_parameter",
    "plot_envelope",
]


def _curve_figure(runs, log: bool):
    fig, ax = plt.subplots(figsize=(5, 4), dpi=120)
    for label, series in runs:
        t = np.asarray(series.time)
        h = np.asarray(series.h_neg1)
        if log:
            ax.plot(t, np.log(h), label=label)
        else:
            ax.plot(t, h, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("ln mix-norm" if log else "mix-norm")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def plot_mix_norm_curves(path, runs) -> None:
    """runs: iterable of (label, MixTimeSeries)."""
    fig = _curve_figure(runs, log=False)
    fig.savefig(path)
    plt.close(fig)


def plot_log_mix_norm_curves(path, runs) -> None:
    fig = _curve_figure(runs, log=True)
    fig.savefig(path)
    plt.close(fig)


def plot_rate_vs_parameter(path, table) -> None:
    """table: analysis.RateTable."""
    fig, ax = plt.subplots(figsize=(5, 4), dpi=120)
    a = [e[0] for e in table.entries]
    r = [e[1].rate_reciprocal for e in table.entries]
    ax.plot(a, r, "o", label="measured")
    if not table.degenerate:
        aa = np.linspace(min(a), max(a), 50)
        ax.plot(aa, table.slope * aa + table.intercept, "-",
                label=f"linear fit (R^2={table.r_squared:.3f})")
    ax.set_xlabel("a")
    ax.set_ylabel("-1/slope")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_envelope(path, series, envelope) -> None:
    """Measured mix-norm with the fitted exponential lower envelope."""
    t = np.asarray(series.time)
    h = np.asarray(series.h_neg1)
    w = np.asarray(series.cost[envelope.p].cumulative)
    m = (t >= envelope.t0 - 1e-12) & (t <= envelope.t1 + 1e-12)
    fig, ax = plt.subplots(figsize=(5, 4), dpi=120)
    ax.semilogy(t, h, label="measured mix-norm")
    ax.semilogy(
        t[m],
        envelope.prefactor * np.exp(-envelope.rate_coeff * w[m]),
        "--",
        label="fitted lower envelope",
    )
    ax.set_xlabel("t")
    ax.set_ylabel("mix-norm")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
