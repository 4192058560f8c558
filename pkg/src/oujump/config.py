"""Flat sectioned key-value run configuration.

Grammar (one assignment per line):

    # full-line or trailing comments start with '#'
    model.a = 2.0
    model.x0 = 0.0
    model.sigma_w = 1.0
    model.jump_family = compound_poisson   # none | compound_poisson | gamma
    model.lambda = 1.0                     # compound_poisson intensity
    model.height_std = 1.4142135623730951  # compound_poisson height std dev
    model.c = 0.5                          # gamma activity
    model.rate = 1.0                       # gamma rate
    grid.T = 20.0
    grid.n = 2000
    filter.mode = exponent                 # exponent | absolute | off
    filter.beta = 0.3
    filter.v = 0.5                         # absolute mode only
    mc.replications = 100
    mc.seed = 1234
    mc.estimators = filtered_mle,lse       # subset of filtered_mle,oracle_mle,lse
    sim.substeps = 8                       # gamma sub-grid refinement
    sim.stationary_start = false
    row = lambda=5 T=20 n=2000             # table rows: space-separated overrides

Keys are dotted field paths in a flat namespace; errors name the offending
path and its legal range.  ``row`` lines (table command only) override
fields per row; shorthand tokens lambda, c, T, n, a, dt, beta, seed and
replications map onto the corresponding dotted keys, where ``dt`` sets
grid.n = round(grid.T / dt).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .estimators import FilterSpec
from .levy import CompoundPoissonJumps, GammaJumps, LevyModel
from .montecarlo import ESTIMATOR_NAMES, McConfig
from .simulate import ObservationGrid, OuModel

__all__ = ["ConfigError", "RunConfig", "parse_config", "parse_config_text", "canonical_text"]


class ConfigError(ValueError):
    """Malformed or out-of-range configuration input."""


_MODEL_KEYS = {
    "model.a",
    "model.x0",
    "model.sigma_w",
    "model.jump_family",
    "model.lambda",
    "model.height_std",
    "model.c",
    "model.rate",
}
_OTHER_KEYS = {
    "grid.T",
    "grid.n",
    "filter.mode",
    "filter.beta",
    "filter.v",
    "mc.replications",
    "mc.seed",
    "mc.estimators",
    "sim.substeps",
    "sim.stationary_start",
}
_KNOWN_KEYS = _MODEL_KEYS | _OTHER_KEYS

_ROW_SHORTHAND = {
    "lambda": "model.lambda",
    "c": "model.c",
    "a": "model.a",
    "height_std": "model.height_std",
    "rate": "model.rate",
    "sigma_w": "model.sigma_w",
    "T": "grid.T",
    "n": "grid.n",
    "beta": "filter.beta",
    "v": "filter.v",
    "seed": "mc.seed",
    "replications": "mc.replications",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration: domain objects plus the table rows."""

    model: OuModel
    grid: ObservationGrid
    filter: FilterSpec
    replications: int
    seed: int
    estimators: tuple[str, ...]
    substeps: int
    stationary_start: bool
    rows: tuple[tuple[tuple[str, str], ...], ...] = ()

    def mc_config(self) -> McConfig:
        return McConfig(
            model=self.model,
            grid=self.grid,
            filter=self.filter,
            replications=self.replications,
            seed=self.seed,
            estimators=self.estimators,
            substeps=self.substeps,
            stationary_start=self.stationary_start,
        )

    def row_configs(self) -> list["RunConfig"]:
        """One RunConfig per ``row`` line (or just this config if none)."""
        if not self.rows:
            return [self]
        return [_apply_row(self, overrides) for overrides in self.rows]


def parse_config(path: str) -> RunConfig:
    with open(path) as fh:
        return parse_config_text(fh.read())


def parse_config_text(text: str) -> RunConfig:
    values, rows = _scan(text)
    return _build(values, rows)


def _scan(text: str) -> tuple[dict[str, str], list[tuple[tuple[str, str], ...]]]:
    values: dict[str, str] = {}
    rows: list[tuple[tuple[str, str], ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "row":
            rows.append(_parse_row_tokens(value, lineno))
            continue
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for '{key}'")
        values[key] = value
    return values, rows


def _parse_row_tokens(value: str, lineno: int) -> tuple[tuple[str, str], ...]:
    overrides = []
    for token in value.split():
        if "=" not in token:
            raise ConfigError(f"line {lineno}: row token '{token}' is not key=value")
        key, val = token.split("=", 1)
        target = _ROW_SHORTHAND.get(key, key)
        if target != "dt" and target not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown row key '{key}'")
        overrides.append((target, val))
    if not overrides:
        raise ConfigError(f"line {lineno}: empty row")
    return tuple(overrides)


def _apply_row(base: RunConfig, overrides: tuple[tuple[str, str], ...]) -> RunConfig:
    values = _config_values(base)
    merged = dict(values)
    dt_override = None
    for key, val in overrides:
        if key == "dt":
            dt_override = val
        else:
            merged[key] = val
    if dt_override is not None:
        horizon = _to_float("grid.T", merged.get("grid.T", "0"))
        dt = _to_float("dt", dt_override)
        if dt <= 0 or dt >= horizon:
            raise ConfigError("dt must satisfy 0 < dt < grid.T")
        merged["grid.n"] = str(round(horizon / dt))
    return _build(merged, rows=[])


def _build(values: dict[str, str], rows) -> RunConfig:
    model = _build_model(values)
    grid = _build_grid(values)
    filt = _build_filter(values)

    replications = _to_int("mc.replications", values.get("mc.replications", "100"))
    if replications < 1:
        raise ConfigError("mc.replications must be at least 1")
    seed = _to_int("mc.seed", values.get("mc.seed", "0"))
    estimators = tuple(
        name.strip()
        for name in values.get("mc.estimators", "filtered_mle").split(",")
        if name.strip()
    )
    if not estimators:
        raise ConfigError("mc.estimators must name at least one estimator")
    for name in estimators:
        if name not in ESTIMATOR_NAMES:
            raise ConfigError(
                f"mc.estimators: unknown estimator '{name}' "
                f"(choose from {', '.join(ESTIMATOR_NAMES)})"
            )
    if len(set(estimators)) != len(estimators):
        raise ConfigError("mc.estimators must not repeat")

    substeps = _to_int("sim.substeps", values.get("sim.substeps", "8"))
    if substeps < 1:
        raise ConfigError("sim.substeps must be at least 1")
    stationary = _to_bool(
        "sim.stationary_start", values.get("sim.stationary_start", "false")
    )
    return RunConfig(
        model=model,
        grid=grid,
        filter=filt,
        replications=replications,
        seed=seed,
        estimators=estimators,
        substeps=substeps,
        stationary_start=stationary,
        rows=tuple(rows),
    )


def _build_model(values: dict[str, str]) -> OuModel:
    if "model.a" not in values:
        raise ConfigError("model.a is required")
    a = _to_float("model.a", values["model.a"])
    if not (a > 0 and math.isfinite(a)):
        raise ConfigError("model.a must be a finite positive real")
    x0 = _to_float("model.x0", values.get("model.x0", "0"))
    sigma_w = _to_float("model.sigma_w", values.get("model.sigma_w", "1"))
    if not (sigma_w >= 0 and math.isfinite(sigma_w)):
        raise ConfigError("model.sigma_w must be a finite nonnegative real")

    family = values.get("model.jump_family", "none")
    cp_keys = [k for k in ("model.lambda", "model.height_std") if k in values]
    gamma_keys = [k for k in ("model.c", "model.rate") if k in values]
    if family == "none":
        for key in cp_keys + gamma_keys:
            raise ConfigError(f"{key} requires a matching model.jump_family")
        jumps = None
    elif family == "compound_poisson":
        for key in gamma_keys:
            raise ConfigError(f"{key} requires model.jump_family = gamma")
        if "model.lambda" not in values:
            raise ConfigError("model.lambda is required for compound_poisson jumps")
        if "model.height_std" not in values:
            raise ConfigError("model.height_std is required for compound_poisson jumps")
        lam = _to_float("model.lambda", values["model.lambda"])
        if lam <= 0:
            raise ConfigError("model.lambda must be a finite positive real")
        height = _to_float("model.height_std", values["model.height_std"])
        if height <= 0:
            raise ConfigError("model.height_std must be a finite positive real")
        jumps = CompoundPoissonJumps(lam, height)
    elif family == "gamma":
        for key in cp_keys:
            raise ConfigError(f"{key} requires model.jump_family = compound_poisson")
        if "model.c" not in values:
            raise ConfigError("model.c is required for gamma jumps")
        if "model.rate" not in values:
            raise ConfigError("model.rate is required for gamma jumps")
        c = _to_float("model.c", values["model.c"])
        if c <= 0:
            raise ConfigError("model.c must be a finite positive real")
        rate = _to_float("model.rate", values["model.rate"])
        if rate <= 0:
            raise ConfigError("model.rate must be a finite positive real")
        jumps = GammaJumps(c, rate)
    else:
        raise ConfigError(
            "model.jump_family must be one of none, compound_poisson, gamma"
        )
    if sigma_w == 0 and jumps is None:
        raise ConfigError("model.sigma_w: degenerate model (sigma_w = 0 and no jumps)")
    try:
        return OuModel(a=a, levy=LevyModel(sigma_w=sigma_w, jumps=jumps), x0=x0)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc


def _build_grid(values: dict[str, str]) -> ObservationGrid:
    if "grid.T" not in values:
        raise ConfigError("grid.T is required")
    if "grid.n" not in values:
        raise ConfigError("grid.n is required")
    horizon = _to_float("grid.T", values["grid.T"])
    if not (horizon > 0 and math.isfinite(horizon)):
        raise ConfigError("grid.T must be a finite positive real")
    n = _to_int("grid.n", values["grid.n"])
    if n < 2:
        raise ConfigError("grid.n must be at least 2")
    return ObservationGrid(n=n, horizon=horizon)


def _build_filter(values: dict[str, str]) -> FilterSpec:
    mode = values.get("filter.mode", "exponent")
    if mode == "exponent":
        if "filter.v" in values:
            raise ConfigError("filter.v only applies to filter.mode = absolute")
        beta = _to_float("filter.beta", values.get("filter.beta", "0.3"))
        if not (0.0 < beta < 0.5):
            raise ConfigError(
                "filter.beta must lie in the open interval (0, 0.5)"
            )
        return FilterSpec.exponent(beta)
    if mode == "absolute":
        if "filter.beta" in values:
            raise ConfigError("filter.beta only applies to filter.mode = exponent")
        if "filter.v" not in values:
            raise ConfigError("filter.v is required for filter.mode = absolute")
        v = _to_float("filter.v", values["filter.v"])
        if not (v > 0 and math.isfinite(v)):
            raise ConfigError("filter.v must be a finite positive real")
        return FilterSpec.absolute(v)
    if mode == "off":
        for key in ("filter.beta", "filter.v"):
            if key in values:
                raise ConfigError(f"{key} only applies when the filter is on")
        return FilterSpec.off()
    raise ConfigError("filter.mode must be one of exponent, absolute, off")


def _config_values(config: RunConfig) -> dict[str, str]:
    """Flatten a RunConfig back to its key-value form (used by rows and
    by --print-config; parse(canonical_text(c)) == c)."""
    values = {
        "model.a": _fmt(config.model.a),
        "model.x0": _fmt(config.model.x0),
        "model.sigma_w": _fmt(config.model.levy.sigma_w),
    }
    jumps = config.model.levy.jumps
    if jumps is None:
        values["model.jump_family"] = "none"
    elif isinstance(jumps, CompoundPoissonJumps):
        values["model.jump_family"] = "compound_poisson"
        values["model.lambda"] = _fmt(jumps.intensity)
        values["model.height_std"] = _fmt(jumps.height_std)
    elif isinstance(jumps, GammaJumps):
        values["model.jump_family"] = "gamma"
        values["model.c"] = _fmt(jumps.c)
        values["model.rate"] = _fmt(jumps.rate)
    values["grid.T"] = _fmt(config.grid.horizon)
    values["grid.n"] = str(config.grid.n)
    values["filter.mode"] = config.filter.mode
    if config.filter.mode == "exponent":
        values["filter.beta"] = _fmt(config.filter.beta)
    elif config.filter.mode == "absolute":
        values["filter.v"] = _fmt(config.filter.v)
    values["mc.replications"] = str(config.replications)
    values["mc.seed"] = str(config.seed)
    values["mc.estimators"] = ",".join(config.estimators)
    values["sim.substeps"] = str(config.substeps)
    values["sim.stationary_start"] = "true" if config.stationary_start else "false"
    return values


def canonical_text(config: RunConfig) -> str:
    """Canonical config text; re-parsing it reproduces the RunConfig."""
    lines = [f"{key} = {value}" for key, value in _config_values(config).items()]
    for overrides in config.rows:
        tokens = " ".join(f"{k}={v}" for k, v in overrides)
        lines.append(f"row = {tokens}")
    return "\n".join(lines) + "\n"


def _fmt(value: float) -> str:
    return "%.17g" % value


def _to_float(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: '{raw}' is not a number") from exc
    if math.isnan(value):
        raise ConfigError(f"{key}: must not be NaN")
    return value


def _to_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: '{raw}' is not an integer") from exc


def _to_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: '{raw}' is not a boolean (true/false)")
