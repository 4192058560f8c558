"""Report figures rendered next to the delimited output.

All plots go straight to files via the Agg backend; nothing opens a
window.  The CSV files remain the programmatic contract; figures are the
human-readable companion.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .estimators import asymptotic_variance_mle
from .montecarlo import McSummary, SweepRow
from .simulate import SimulatedPath

__all__ = ["save_error_histogram", "save_sweep_figure", "save_path_figure"]


def save_error_histogram(
    summary: McSummary, out_path: str, estimator: str = "filtered_mle"
) -> None:
    """Histogram of the standardized errors sqrt(T)(a_hat - a) with the
    theoretical normal limit overlaid."""
    errors = summary.results[estimator].standardized_errors
    avar = asymptotic_variance_mle(summary.config.model)
    sd = math.sqrt(avar)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(errors, bins=30, density=True, alpha=0.65, label=f"{estimator} errors")
    xs = np.linspace(min(-4 * sd, errors.min()), max(4 * sd, errors.max()), 400)
    ax.plot(
        xs,
        np.exp(-(xs**2) / (2 * avar)) / math.sqrt(2 * math.pi * avar),
        lw=1.5,
        label=f"N(0, {avar:.4g})",
    )
    ax.set_xlabel("standardized error")
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def save_sweep_figure(rows: list[SweepRow], horizon: float, out_path: str) -> None:
    """Two panels against jump intensity: estimator means, and sample
    standard deviations with the sqrt(avar/T) theory curves."""
    lam = [r.intensity for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ax1.plot(lam, [r.mean_mle for r in rows], "o-", label="filtered")
    ax1.plot(lam, [r.mean_lse for r in rows], "s--", label="unfiltered")
    ax1.set_xlabel("jump intensity")
    ax1.set_ylabel("mean estimate")
    ax1.legend(frameon=False)
    ax2.plot(lam, [r.std_mle for r in rows], "o-", label="filtered")
    ax2.plot(lam, [r.std_lse for r in rows], "s--", label="unfiltered")
    ax2.plot(
        lam,
        [math.sqrt(r.avar_mle / horizon) for r in rows],
        ":",
        label="filtered theory",
    )
    ax2.plot(
        lam,
        [math.sqrt(r.avar_lse / horizon) for r in rows],
        "-.",
        label="unfiltered theory",
    )
    ax2.set_xlabel("jump intensity")
    ax2.set_ylabel("std dev of estimate")
    ax2.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def save_path_figure(path: SimulatedPath, out_path: str, threshold: float | None = None) -> None:
    """Observed path with jump-bearing increments marked; optionally draws
    the increments that exceed the filter threshold."""
    t = path.grid.times()
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    ax.plot(t, path.x, lw=0.8)
    if not path.infinite_activity:
        loc = np.nonzero(path.jump_count > 0)[0]
        ax.plot(t[loc + 1], path.x[loc + 1], "rx", ms=5, label="true jump")
    if threshold is not None and math.isfinite(threshold):
        dx = np.abs(np.diff(path.x))
        loc = np.nonzero(dx > threshold)[0]
        ax.plot(
            t[loc + 1], path.x[loc + 1], "o", mfc="none", ms=9, label="flagged"
        )
    if ax.get_legend_handles_labels()[0]:
        ax.legend(frameon=False)
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
