"""Driving-noise models and exact increment samplers.

The driving noise is a Brownian motion with volatility ``sigma_w`` plus an
optional independent jump part: either a compound Poisson process with
Gaussian heights or a gamma subordinator (infinite activity, nonnegative
increments).  Samplers are exact in distribution; none relies on Euler
stepping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

__all__ = [
    "CompoundPoissonJumps",
    "GammaJumps",
    "LevyModel",
    "JumpBatch",
    "sample_wiener_increment",
    "sample_compound_poisson_increment",
    "sample_gamma_increment",
    "jump_variance_rate",
    "jump_mean_rate",
]


@dataclass(frozen=True)
class CompoundPoissonJumps:
    """Compound Poisson jump part: ``intensity`` jumps per unit time,
    i.i.d. centered Gaussian heights with standard deviation ``height_std``."""

    intensity: float
    height_std: float

    def __post_init__(self) -> None:
        if not (self.intensity > 0 and math.isfinite(self.intensity)):
            raise ValueError("intensity must be a finite positive real")
        if not (self.height_std > 0 and math.isfinite(self.height_std)):
            raise ValueError("height_std must be a finite positive real")


@dataclass(frozen=True)
class GammaJumps:
    """Gamma subordinator with jump density c * x^-1 * exp(-rate*x), x > 0.

    Increments over dt are Gamma(shape=c*dt, rate=rate).  All jumps are
    positive, so this driver has a nonzero mean rate; estimators that
    assume centered jumps carry a metadata note (see LevyModel.notes).
    """

    c: float
    rate: float

    def __post_init__(self) -> None:
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError("c must be a finite positive real")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError("rate must be a finite positive real")


JumpSpec = CompoundPoissonJumps | GammaJumps | None


@dataclass(frozen=True)
class LevyModel:
    """Brownian part plus optional jump part.  At least one of the two
    components must be non-degenerate."""

    sigma_w: float
    jumps: JumpSpec = None

    def __post_init__(self) -> None:
        if not (self.sigma_w >= 0 and math.isfinite(self.sigma_w)):
            raise ValueError("sigma_w must be a finite nonnegative real")
        if self.sigma_w == 0 and self.jumps is None:
            raise ValueError("degenerate model: sigma_w = 0 and no jumps")

    @property
    def notes(self) -> tuple[str, ...]:
        """Metadata flags on modelling assumptions."""
        if isinstance(self.jumps, GammaJumps):
            return ("assumption-violating: asymmetric jumps",)
        return ()


@dataclass(frozen=True)
class JumpBatch:
    """Jump events of one grid interval: total increment plus the per-event
    (offset in [0, dt), height) pairs."""

    total: float
    offsets: np.ndarray
    heights: np.ndarray

    @property
    def count(self) -> int:
        return len(self.heights)


def sample_wiener_increment(
    rng: RngStream, sigma_w: float, dt: float, size: int | None = None
):
    """Draw sigma_w * (W_{t+dt} - W_t) ~ N(0, sigma_w^2 * dt).

    With sigma_w = 0 returns exact zeros without consuming draws.
    """
    _check_dt(dt)
    if sigma_w < 0:
        raise ValueError("sigma_w must be nonnegative")
    if sigma_w == 0:
        return 0.0 if size is None else np.zeros(size)
    scale = sigma_w * math.sqrt(dt)
    if size is None:
        return scale * rng.generator.standard_normal()
    return scale * rng.generator.standard_normal(size)


def sample_compound_poisson_increment(
    rng: RngStream, intensity: float, height_std: float, dt: float
) -> JumpBatch:
    """Draw the jump events of one interval of length dt.

    Draw order (fixed for reproducibility): event count ~ Poisson(intensity*dt),
    then offsets i.i.d. Uniform[0, dt), then heights i.i.d. N(0, height_std^2).
    Intensity 0 is allowed as the no-jump limit and consumes no draws.
    """
    _check_dt(dt)
    if intensity == 0:
        return JumpBatch(0.0, np.empty(0), np.empty(0))
    jumps = CompoundPoissonJumps(intensity, height_std)  # validates
    gen = rng.generator
    count = int(gen.poisson(jumps.intensity * dt))
    offsets = gen.random(count) * dt
    heights = gen.standard_normal(count) * jumps.height_std
    return JumpBatch(float(heights.sum()), offsets, heights)


def sample_gamma_increment(
    rng: RngStream, c: float, rate: float, dt: float, size: int | None = None
):
    """Draw increments of the gamma subordinator: Gamma(shape=c*dt, rate).

    The integer part of the shape is a sum of unit exponentials; the
    fractional part uses Johnk's rejection algorithm (beta ratio times an
    independent unit exponential), evaluated in log space so shapes far
    below 1 do not underflow prematurely.
    """
    _check_dt(dt)
    jumps = GammaJumps(c, rate)  # validates
    n = 1 if size is None else int(size)
    out = _gamma_unit(rng.generator, jumps.c * dt, n) / jumps.rate
    return float(out[0]) if size is None else out


def _gamma_unit(gen: np.random.Generator, shape: float, n: int) -> np.ndarray:
    """n draws from Gamma(shape, 1).  Draw order: exponential block for the
    integer shape part, then Johnk rejection rounds, then the exponential
    factor of the Johnk samples."""
    k = int(math.floor(shape))
    frac = shape - k
    out = np.zeros(n)
    if k > 0:
        out += gen.standard_exponential((n, k)).sum(axis=1)
    if frac > 0.0:
        out += _johnk(gen, frac, n)
    return out


def _johnk(gen: np.random.Generator, frac: float, n: int) -> np.ndarray:
    """Johnk's algorithm for Gamma(frac, 1), 0 < frac < 1, vectorized.

    Repeat (u, v) ~ U(0,1)^2, x = u^(1/frac), y = v^(1/(1-frac)) until
    x + y <= 1; return x/(x+y) times an independent Exp(1).  Acceptance is
    tested on log x and log y so tiny fractional shapes stay valid.
    """
    beta = np.empty(n)
    pending = np.arange(n)
    while pending.size:
        u = gen.random(pending.size)
        v = gen.random(pending.size)
        with np.errstate(divide="ignore"):
            logx = np.log(u) / frac
            logy = np.log(v) / (1.0 - frac)
        logsum = np.logaddexp(logx, logy)
        ok = logsum <= 0.0
        beta[pending[ok]] = np.exp(logx[ok] - logsum[ok])
        pending = pending[~ok]
    return beta * gen.standard_exponential(n)


def jump_variance_rate(jumps: JumpSpec) -> float:
    """Second moment of the jump measure per unit time.

    None -> 0; compound Poisson -> intensity * height_std^2;
    gamma -> c / rate^2.
    """
    if jumps is None:
        return 0.0
    if isinstance(jumps, CompoundPoissonJumps):
        return jumps.intensity * jumps.height_std**2
    if isinstance(jumps, GammaJumps):
        return jumps.c / jumps.rate**2
    raise TypeError(f"unknown jump spec: {jumps!r}")


def jump_mean_rate(jumps: JumpSpec) -> float:
    """First moment of the jump part per unit time (0 unless gamma)."""
    if jumps is None:
        return 0.0
    if isinstance(jumps, CompoundPoissonJumps):
        return 0.0  # centered heights
    if isinstance(jumps, GammaJumps):
        return jumps.c / jumps.rate
    raise TypeError(f"unknown jump spec: {jumps!r}")


def _check_dt(dt: float) -> None:
    if not (dt > 0 and math.isfinite(dt)):
        raise ValueError("dt must be a finite positive real")
