"""Exact path synthesis for the jump-driven Ornstein-Uhlenbeck process.

The process solves dX_t = -a X_t dt + dL_t where L is Brownian motion plus
an optional jump part (see :mod:`oujump.levy`).  Between observations the
explicit solution is used:

    X_{t+dt} = exp(-a dt) X_t + I + (decayed jump contributions)

with I the Gaussian stochastic integral of exp(-a(dt-s)) against the
Brownian part.  I and the raw Brownian increment are drawn jointly (their
covariance is sigma_w^2 (1 - exp(-a dt)) / a), so the recorded noise
increment is exact, not reconstructed.

Each simulated path carries its ground-truth increment decomposition

    x[i+1] - x[i] = dw[i] + dd[i] + dj[i]

where dw is the raw Brownian increment, dj the raw jump-part increment and
dd the drift integral -a * int X_s ds, recovered exactly by subtraction.
``dw + dd`` is therefore the increment of the continuous part of X, which
is what the oracle estimator consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .levy import CompoundPoissonJumps, GammaJumps, LevyModel
from .rng import RngStream

__all__ = [
    "OuModel",
    "ObservationGrid",
    "SimulatedPath",
    "simulate_path",
    "continuous_part_increments",
    "write_path_csv",
    "read_path_csv",
    "GAMMA_JUMP_COUNT_SENTINEL",
]

# jump_count entry used for infinite-activity drivers, where a per-interval
# jump count is meaningless
GAMMA_JUMP_COUNT_SENTINEL = -1

_FMT = "%.17g"


@dataclass(frozen=True)
class OuModel:
    """Mean-reverting model: drift rate ``a`` > 0, start value ``x0``,
    driving noise ``levy``."""

    a: float
    levy: LevyModel
    x0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError("a must be a finite positive real")
        if not math.isfinite(self.x0):
            raise ValueError("x0 must be finite")


@dataclass(frozen=True)
class ObservationGrid:
    """Equidistant observation times t_i = i * dt, i = 0..n, stored as the
    interval count n and the horizon T = n * dt."""

    n: int
    horizon: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValueError("horizon must be a finite positive real")

    @classmethod
    def from_dt(cls, n: int, dt: float) -> "ObservationGrid":
        if not (dt > 0 and math.isfinite(dt)):
            raise ValueError("dt must be a finite positive real")
        return cls(n=n, horizon=n * dt)

    @property
    def dt(self) -> float:
        return self.horizon / self.n

    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.dt


@dataclass(frozen=True)
class SimulatedPath:
    """Observations plus the ground-truth decomposition of each increment.

    x has n+1 entries; dw, dd, dj and jump_count have n entries, attached
    to the interval [t_i, t_{i+1}).  For gamma-driven paths jump_count is
    filled with GAMMA_JUMP_COUNT_SENTINEL.
    """

    grid: ObservationGrid
    x: np.ndarray
    dw: np.ndarray
    dd: np.ndarray
    dj: np.ndarray
    jump_count: np.ndarray

    @property
    def infinite_activity(self) -> bool:
        return bool(self.jump_count.size) and int(self.jump_count[0]) < 0

    @property
    def total_jumps(self) -> int | None:
        """Total true jump count, or None for infinite-activity drivers."""
        if self.infinite_activity:
            return None
        return int(self.jump_count.sum())


def simulate_path(
    model: OuModel,
    grid: ObservationGrid,
    rng: RngStream,
    substeps: int = 8,
    stationary_start: bool = False,
) -> SimulatedPath:
    """Simulate one path on the grid.

    Args:
        model: drift, start value and driving noise.
        rng: stream consumed by this call; the draw order is documented in
            the internal helpers, so equal streams give bit-identical paths.
        substeps: sub-grid refinement per interval for the gamma driver.
            Each sub-increment is exact in distribution; only its decay
            weighting uses the sub-interval right endpoint, so the grid
            values carry an O(dt/substeps) drift-response bias while the
            recorded dj increments stay exact.
        stationary_start: when True, run a burn-in of length 10/a (same dt,
            drawn from the stream first) and start the path at its endpoint.

    Returns:
        SimulatedPath with the exact decomposition x[i+1]-x[i] = dw+dd+dj.
    """
    if substeps < 1:
        raise ValueError("substeps must be at least 1")
    gen = rng.generator
    x0 = model.x0
    if stationary_start:
        n_burn = max(2, math.ceil(10.0 / (model.a * grid.dt)))
        burn_x, *_ = _core(model, n_burn, grid.dt, x0, gen, substeps)
        x0 = float(burn_x[-1])
    x, dw, dj, counts = _core(model, grid.n, grid.dt, x0, gen, substeps)
    dd = np.diff(x) - dw - dj
    return SimulatedPath(grid=grid, x=x, dw=dw, dd=dd, dj=dj, jump_count=counts)


def _core(
    model: OuModel,
    n: int,
    dt: float,
    x0: float,
    gen: np.random.Generator,
    substeps: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Simulate n exact transitions.  Draw order: Gaussian block (skipped
    entirely when sigma_w = 0), then the jump block of the noise family."""
    a = model.a
    sigma = model.levy.sigma_w
    rho = math.exp(-a * dt)

    if sigma > 0:
        # var_i: variance of the decayed integral; cov: its covariance with
        # the raw increment.  Joint draw keeps dw exact.
        var_i = sigma**2 * (-math.expm1(-2 * a * dt)) / (2 * a)
        cov = sigma**2 * (-math.expm1(-a * dt)) / a
        var_w = sigma**2 * dt
        z = gen.standard_normal((n, 2))
        part_i = math.sqrt(var_i) * z[:, 0]
        cond_var = max(var_w - cov**2 / var_i, 0.0)
        dw = (cov / var_i) * part_i + math.sqrt(cond_var) * z[:, 1]
    else:
        part_i = np.zeros(n)
        dw = np.zeros(n)

    jumps = model.levy.jumps
    if jumps is None:
        contrib = np.zeros(n)
        dj = np.zeros(n)
        counts = np.zeros(n, dtype=np.int64)
    elif isinstance(jumps, CompoundPoissonJumps):
        contrib, dj, counts = _compound_poisson_block(gen, jumps, a, dt, n)
    elif isinstance(jumps, GammaJumps):
        contrib, dj = _gamma_block(gen, jumps, a, dt, n, substeps)
        counts = np.full(n, GAMMA_JUMP_COUNT_SENTINEL, dtype=np.int64)
    else:
        raise TypeError(f"unknown jump spec: {jumps!r}")

    # x[i+1] = rho x[i] + u[i]; lfilter runs the same recursion in C.
    u = part_i + contrib
    body, _ = lfilter([1.0], [1.0, -rho], u, zi=np.array([rho * x0]))
    x = np.concatenate(([x0], body))
    return x, dw, dj, counts


def _compound_poisson_block(
    gen: np.random.Generator,
    jumps: CompoundPoissonJumps,
    a: float,
    dt: float,
    n: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact per-interval jump events.  Draw order: counts, offsets, heights.

    A jump of height z at offset tau contributes z * exp(-a (dt - tau)) to
    the next grid value; the raw height goes into dj.
    """
    counts = gen.poisson(jumps.intensity * dt, n)
    total = int(counts.sum())
    offsets = gen.random(total) * dt
    heights = gen.standard_normal(total) * jumps.height_std
    idx = np.repeat(np.arange(n), counts)
    decayed = heights * np.exp(-a * (dt - offsets))
    contrib = np.bincount(idx, weights=decayed, minlength=n)
    dj = np.bincount(idx, weights=heights, minlength=n)
    return contrib, dj, counts.astype(np.int64)


def _gamma_block(
    gen: np.random.Generator,
    jumps: GammaJumps,
    a: float,
    dt: float,
    n: int,
    substeps: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Gamma driver on a sub-grid: each interval is split into ``substeps``
    exact Gamma(c*dt/substeps, rate) increments; each sub-increment is
    placed as an atom at its sub-interval right endpoint for decay.  dj is
    the raw sum, hence exactly Gamma(c*dt, rate) distributed."""
    from .levy import _gamma_unit  # local import avoids a cycle in docs

    shape = jumps.c * dt / substeps
    g = (_gamma_unit(gen, shape, n * substeps) / jumps.rate).reshape(n, substeps)
    s_k = (np.arange(substeps) + 1.0) * dt / substeps
    weights = np.exp(-a * (dt - s_k))
    contrib = g @ weights
    dj = g.sum(axis=1)
    return contrib, dj


def continuous_part_increments(path: SimulatedPath) -> np.ndarray:
    """Increments of the continuous part of X (Brownian plus drift
    integral), the ground truth consumed by the oracle estimator."""
    return path.dw + path.dd


def write_path_csv(path: SimulatedPath, file_path: str, diagnostics: bool = False) -> None:
    """Write the path as CSV: header ``t,x`` (one row per observation), or
    with ``diagnostics`` the extended ``t,x,dw,dd,dj,jump_count`` where the
    increment columns sit on the left-endpoint row and the final row leaves
    them empty.  Floats carry 17 significant digits."""
    import csv

    t = path.grid.times()
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if not diagnostics:
            writer.writerow(["t", "x"])
            for ti, xi in zip(t, path.x):
                writer.writerow([_FMT % ti, _FMT % xi])
            return
        writer.writerow(["t", "x", "dw", "dd", "dj", "jump_count"])
        for i in range(path.grid.n):
            writer.writerow(
                [
                    _FMT % t[i],
                    _FMT % path.x[i],
                    _FMT % path.dw[i],
                    _FMT % path.dd[i],
                    _FMT % path.dj[i],
                    str(int(path.jump_count[i])),
                ]
            )
        writer.writerow([_FMT % t[-1], _FMT % path.x[-1], "", "", "", ""])


def read_path_csv(file_path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``t,x`` CSV (diagnostics columns are ignored) and validate it.

    Raises ValueError with the offending line number on malformed rows or
    non-increasing times.
    """
    import csv

    t: list[float] = []
    x: list[float] = []
    with open(file_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["t", "x"]:
            raise ValueError("line 1: expected CSV header starting with t,x")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 2:
                raise ValueError(f"line {lineno}: expected at least 2 columns")
            try:
                ti, xi = float(row[0]), float(row[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: non-numeric value") from exc
            if not (math.isfinite(ti) and math.isfinite(xi)):
                raise ValueError(f"line {lineno}: non-finite value")
            if t and ti <= t[-1]:
                raise ValueError(f"line {lineno}: t must be strictly increasing")
            t.append(ti)
            x.append(xi)
    if len(t) < 3:
        raise ValueError("need at least 3 observations (2 increments)")
    return np.asarray(t), np.asarray(x)
