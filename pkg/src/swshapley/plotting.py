"""Figures for the benchmark aggregates."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.4,
}


def _figure(width=6.0, height=3.4):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(width, height))
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_oracle_calls(agg, path):
    fig, ax = _figure()
    xs = [a["players"] for a in agg]
    ax.plot(xs, [a["meanDirectCalls"] for a in agg], "b^-", label="direct formula")
    ax.plot(xs, [a["meanDecomposedCalls"] for a in agg], "ro-", label="finest decomposer + subgames")
    ax.set_xlabel("|V|, number of sensors in each cluster")
    ax.set_ylabel("mean oracle calls of H")
    ax.legend(loc="upper left")
    _save(fig, path)


def plot_completion_time(agg, path):
    fig, ax = _figure()
    xs = [a["players"] for a in agg]
    ax.plot(xs, [a["medianDirectTimeSec"] for a in agg], "b^-", label="direct formula")
    ax.plot(xs, [a["medianDecomposedTimeSec"] for a in agg], "ro-", label="subgames in parallel")
    ax.set_xlabel("|V|, number of sensors in each cluster")
    ax.set_ylabel("median completion time (s)")
    ax.set_yscale("log")
    ax.legend(loc="upper left")
    _save(fig, path)
