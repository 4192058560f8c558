"""Seeded Monte Carlo campaigns over the drift estimators.

Replication ``r`` of a campaign always draws from ``RngStream(seed, r)``,
so results are independent of execution order and of the number of worker
processes; the reduction step only assembles per-replication values into
arrays indexed by ``r``.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .estimators import (
    DegeneratePathError,
    EstimateResult,
    FilterSpec,
    asymptotic_variance_lse,
    asymptotic_variance_mle,
    jump_filtered_mle,
    least_squares,
    oracle_discretized_mle,
)
from .levy import CompoundPoissonJumps, LevyModel
from .rng import RngStream
from .simulate import ObservationGrid, OuModel, simulate_path

__all__ = [
    "ESTIMATOR_NAMES",
    "McConfig",
    "EstimatorSummary",
    "McSummary",
    "run_campaign",
    "NormalityCheck",
    "normality_check",
    "SweepRow",
    "sweep_intensity",
    "write_summary_csv",
    "write_replications_csv",
    "write_sweep_csv",
]

ESTIMATOR_NAMES = ("filtered_mle", "oracle_mle", "lse")

_FMT = "%.17g"


@dataclass(frozen=True)
class McConfig:
    """One campaign: model, grid, filter, replication count and seed.

    ``estimators`` is an ordered subset of ESTIMATOR_NAMES.  ``substeps``
    and ``stationary_start`` are forwarded to the simulator.
    """

    model: OuModel
    grid: ObservationGrid
    filter: FilterSpec
    replications: int
    seed: int
    estimators: tuple[str, ...] = ("filtered_mle",)
    substeps: int = 8
    stationary_start: bool = False

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if not self.estimators:
            raise ValueError("estimators must not be empty")
        for name in self.estimators:
            if name not in ESTIMATOR_NAMES:
                raise ValueError(
                    f"unknown estimator {name!r}; choose from {ESTIMATOR_NAMES}"
                )
        if len(set(self.estimators)) != len(self.estimators):
            raise ValueError("estimators must not repeat")


@dataclass(frozen=True)
class EstimatorSummary:
    """Per-estimator campaign output.  standardized_errors are
    sqrt(T) (a_hat - a); studentized_errors are sqrt(s_t)/sigma_w (a_hat - a)
    (NaN when the model has no Brownian part).  std_dev uses the n-1
    divisor and is 0.0 for a single replication by convention."""

    estimates: np.ndarray
    filtered_counts: np.ndarray
    standardized_errors: np.ndarray
    studentized_errors: np.ndarray
    mean: float
    std_dev: float
    avg_filtered: float


@dataclass(frozen=True)
class McSummary:
    config: McConfig
    results: dict[str, EstimatorSummary] = field(compare=False)


def _estimate(name: str, path, filt: FilterSpec) -> EstimateResult:
    if name == "filtered_mle":
        return jump_filtered_mle(path, filt)
    if name == "oracle_mle":
        return oracle_discretized_mle(path)
    if name == "lse":
        return least_squares(path)
    raise ValueError(f"unknown estimator {name!r}")


def _replicate(config: McConfig, r: int) -> tuple[int, list[tuple[float, int, float]]]:
    """Run replication r.  Returns (r, [(a_hat, filtered, s_t), ...]) in
    config.estimators order."""
    rng = RngStream(config.seed, r)
    try:
        path = simulate_path(
            config.model,
            config.grid,
            rng,
            substeps=config.substeps,
            stationary_start=config.stationary_start,
        )
        rows = []
        for name in config.estimators:
            res = _estimate(name, path, config.filter)
            rows.append((res.a_hat, res.filtered, res.s_t))
    except DegeneratePathError as exc:
        raise DegeneratePathError(f"replication {r}: {exc}") from exc
    return r, rows


def run_campaign(config: McConfig, workers: int = 1) -> McSummary:
    """Run all replications and summarize per estimator.

    Any replication hitting a degenerate path aborts the whole campaign
    with the replication index in the error message.  Results are
    bit-identical for any ``workers`` value.
    """
    reps = config.replications
    n_est = len(config.estimators)
    a_hat = np.empty((n_est, reps))
    filtered = np.empty((n_est, reps))
    s_t = np.empty((n_est, reps))

    if workers <= 1:
        results = (_replicate(config, r) for r in range(reps))
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        chunk = max(1, reps // (workers * 4))
        results = pool.map(
            _replicate, [config] * reps, range(reps), chunksize=chunk
        )
    try:
        for r, rows in results:
            for j, (a, f, s) in enumerate(rows):
                a_hat[j, r] = a
                filtered[j, r] = f
                s_t[j, r] = s
    finally:
        if workers > 1:
            pool.shutdown()

    horizon = config.grid.horizon
    a_true = config.model.a
    sigma_w = config.model.levy.sigma_w
    out: dict[str, EstimatorSummary] = {}
    for j, name in enumerate(config.estimators):
        est = a_hat[j].copy()
        err = est - a_true
        standardized = math.sqrt(horizon) * err
        if sigma_w > 0:
            studentized = np.sqrt(s_t[j]) / sigma_w * err
        else:
            studentized = np.full(reps, np.nan)
        out[name] = EstimatorSummary(
            estimates=est,
            filtered_counts=filtered[j].copy(),
            standardized_errors=standardized,
            studentized_errors=studentized,
            mean=float(est.mean()),
            std_dev=float(est.std(ddof=1)) if reps > 1 else 0.0,
            avg_filtered=float(filtered[j].mean()),
        )
    return McSummary(config=config, results=out)


@dataclass(frozen=True)
class NormalityCheck:
    """Kolmogorov-Smirnov check of the standardized errors against their
    theoretical normal limit, at the 1% level (critical value 1.63/sqrt(N))."""

    statistic: float
    critical: float
    n: int
    passed: bool


def normality_check(
    summary: McSummary, estimator: str = "filtered_mle"
) -> NormalityCheck:
    """KS test of sqrt(T)(a_hat - a) against N(0, sigma_w^2 / E[X_inf^2]).

    Requires at least 100 replications for the asymptotic critical value
    to be meaningful.
    """
    from scipy import stats

    if summary.config.replications < 100:
        raise ValueError("normality check needs at least 100 replications")
    errors = summary.results[estimator].standardized_errors
    avar = asymptotic_variance_mle(summary.config.model)
    statistic = float(
        stats.kstest(errors, "norm", args=(0.0, math.sqrt(avar))).statistic
    )
    critical = 1.63 / math.sqrt(len(errors))
    return NormalityCheck(
        statistic=statistic,
        critical=critical,
        n=len(errors),
        passed=statistic < critical,
    )


@dataclass(frozen=True)
class SweepRow:
    """Summary of one jump-intensity setting of the filtered-vs-unfiltered
    comparison, plus the two theoretical limit variances."""

    intensity: float
    mean_mle: float
    std_mle: float
    mean_lse: float
    std_lse: float
    avar_mle: float
    avar_lse: float


def sweep_intensity(base: McConfig, intensities, workers: int = 1) -> list[SweepRow]:
    """Re-run the campaign across jump intensities with both the filtered
    and the unfiltered estimator.

    The base model must have compound Poisson jumps (their height_std is
    reused); intensity 0 swaps the jump part out entirely.  Each intensity
    reuses the same replication streams, so rows are paired.
    """
    jumps = base.model.levy.jumps
    if not isinstance(jumps, CompoundPoissonJumps):
        raise UnsupportedSweepError(
            "intensity sweep requires a compound Poisson base model"
        )
    rows = []
    for lam in intensities:
        if lam < 0:
            raise ValueError("intensity must be nonnegative")
        new_jumps = (
            CompoundPoissonJumps(float(lam), jumps.height_std) if lam > 0 else None
        )
        model = replace(
            base.model, levy=LevyModel(base.model.levy.sigma_w, new_jumps)
        )
        config = replace(base, model=model, estimators=("filtered_mle", "lse"))
        summary = run_campaign(config, workers=workers)
        res_mle = summary.results["filtered_mle"]
        res_lse = summary.results["lse"]
        rows.append(
            SweepRow(
                intensity=float(lam),
                mean_mle=res_mle.mean,
                std_mle=res_mle.std_dev,
                mean_lse=res_lse.mean,
                std_lse=res_lse.std_dev,
                avar_mle=asymptotic_variance_mle(model),
                avar_lse=asymptotic_variance_lse(model),
            )
        )
    return rows


class UnsupportedSweepError(ValueError):
    """The sweep is only defined for compound Poisson base models."""


def write_summary_csv(summary: McSummary, file_path: str, append: bool = False) -> None:
    """Summary CSV: estimator,n_reps,mean,std_dev,avg_filtered,seed; one
    row per estimator, in campaign order."""
    mode = "a" if append else "w"
    with open(file_path, mode, newline="") as fh:
        writer = csv.writer(fh)
        if not append:
            writer.writerow(
                ["estimator", "n_reps", "mean", "std_dev", "avg_filtered", "seed"]
            )
        for name in summary.config.estimators:
            res = summary.results[name]
            writer.writerow(
                [
                    name,
                    str(summary.config.replications),
                    _FMT % res.mean,
                    _FMT % res.std_dev,
                    _FMT % res.avg_filtered,
                    str(summary.config.seed),
                ]
            )


def write_replications_csv(summary: McSummary, file_path: str) -> None:
    """Raw per-replication CSV: rep,estimator,a_hat,std_error,studentized_error."""
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rep", "estimator", "a_hat", "std_error", "studentized_error"])
        for r in range(summary.config.replications):
            for name in summary.config.estimators:
                res = summary.results[name]
                writer.writerow(
                    [
                        str(r),
                        name,
                        _FMT % res.estimates[r],
                        _FMT % res.standardized_errors[r],
                        _FMT % res.studentized_errors[r],
                    ]
                )


def write_sweep_csv(rows: list[SweepRow], file_path: str) -> None:
    """Sweep CSV: lambda,mean_mle,std_mle,mean_lse,std_lse,avar_mle,avar_lse."""
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["lambda", "mean_mle", "std_mle", "mean_lse", "std_lse", "avar_mle", "avar_lse"]
        )
        for row in rows:
            writer.writerow(
                [
                    _FMT % row.intensity,
                    _FMT % row.mean_mle,
                    _FMT % row.std_mle,
                    _FMT % row.mean_lse,
                    _FMT % row.std_lse,
                    _FMT % row.avar_mle,
                    _FMT % row.avar_lse,
                ]
            )
