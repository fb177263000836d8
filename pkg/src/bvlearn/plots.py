"""Figure rendering: threshold curves and experiment traces, files only."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ConfigError

__all__ = ["render_figure1", "render_success_trace"]

# fixed salt so SVG element ids do not churn between runs
matplotlib.rcParams["svg.hashsalt"] = "bvlearn"


def _save(fig, path: Path) -> None:
    if path.suffix == ".svg":
        # drop the creation timestamp, the one nondeterministic SVG field
        fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path)
    plt.close(fig)


def render_figure1(ns, max_bias, min_bias, path: str | Path) -> None:
    """Plot both per-coordinate bias thresholds against n on a log axis."""
    ns = np.asarray(ns)
    if ns.size == 0:
        raise ConfigError("nothing to plot: empty n grid")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.semilogx(ns, np.asarray(max_bias), "x", color="tab:blue",
                markersize=4, label="thm53 max bias: 1/sqrt(2n)")
    ax.semilogx(ns, np.asarray(min_bias), ".", color="tab:red",
                markersize=4, label="thm74 min bias: 2(1 - 1/ln n)^(1/n) - 1")
    ax.set_xlabel("string length n")
    ax.set_ylabel("per-coordinate bias")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="center right")
    fig.tight_layout()
    _save(fig, Path(path))


def render_success_trace(successes, ci: tuple[float, float], path: str | Path) -> None:
    """Running success rate over trials with the final 99% interval shaded."""
    successes = np.asarray(successes, dtype=float)
    if successes.size == 0:
        raise ConfigError("nothing to plot: no trials")
    running = np.cumsum(successes) / np.arange(1, successes.size + 1)
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(np.arange(1, running.size + 1), running, color="tab:blue",
            label="running success rate")
    ax.axhspan(ci[0], ci[1], color="tab:green", alpha=0.2,
               label="99% interval, all trials")
    ax.set_xlabel("trials")
    ax.set_ylabel("success rate")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    _save(fig, Path(path))
