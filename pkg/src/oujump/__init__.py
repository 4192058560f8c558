"""Simulation and jump-robust drift estimation for Ornstein-Uhlenbeck
processes driven by noise with jumps.

The package splits into five layers: reproducible random streams
(:mod:`oujump.rng`), driving-noise models and samplers (:mod:`oujump.levy`),
exact path synthesis with a ground-truth increment decomposition
(:mod:`oujump.simulate`), drift estimators with jump filtering
(:mod:`oujump.estimators`), and a Monte Carlo harness plus config/CLI
(:mod:`oujump.montecarlo`, :mod:`oujump.config`, :mod:`oujump.cli`).
"""

from .config import ConfigError, RunConfig, canonical_text, parse_config, parse_config_text
from .estimators import (
    ConfusionCounts,
    DegeneratePathError,
    EstimateResult,
    FilterSpec,
    UnsupportedDiagnosticError,
    UnsupportedModelError,
    asymptotic_variance_lse,
    asymptotic_variance_mle,
    jump_detection_confusion,
    jump_filtered_mle,
    least_squares,
    oracle_discretized_mle,
    resolve_threshold,
    stationary_second_moment,
    studentized_statistic,
    write_estimates_csv,
)
from .levy import (
    CompoundPoissonJumps,
    GammaJumps,
    JumpBatch,
    LevyModel,
    jump_mean_rate,
    jump_variance_rate,
    sample_compound_poisson_increment,
    sample_gamma_increment,
    sample_wiener_increment,
)
from .montecarlo import (
    ESTIMATOR_NAMES,
    EstimatorSummary,
    McConfig,
    McSummary,
    NormalityCheck,
    SweepRow,
    UnsupportedSweepError,
    normality_check,
    run_campaign,
    sweep_intensity,
    write_replications_csv,
    write_summary_csv,
    write_sweep_csv,
)
from .rng import RngStream, derive_key, splitmix64
from .simulate import (
    GAMMA_JUMP_COUNT_SENTINEL,
    ObservationGrid,
    OuModel,
    SimulatedPath,
    continuous_part_increments,
    read_path_csv,
    simulate_path,
    write_path_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CompoundPoissonJumps",
    "ConfigError",
    "ConfusionCounts",
    "DegeneratePathError",
    "ESTIMATOR_NAMES",
    "EstimateResult",
    "EstimatorSummary",
    "FilterSpec",
    "GAMMA_JUMP_COUNT_SENTINEL",
    "GammaJumps",
    "JumpBatch",
    "LevyModel",
    "McConfig",
    "McSummary",
    "NormalityCheck",
    "ObservationGrid",
    "OuModel",
    "RngStream",
    "RunConfig",
    "SimulatedPath",
    "SweepRow",
    "UnsupportedDiagnosticError",
    "UnsupportedModelError",
    "UnsupportedSweepError",
    "asymptotic_variance_lse",
    "asymptotic_variance_mle",
    "canonical_text",
    "continuous_part_increments",
    "derive_key",
    "jump_detection_confusion",
    "jump_filtered_mle",
    "jump_mean_rate",
    "jump_variance_rate",
    "least_squares",
    "normality_check",
    "oracle_discretized_mle",
    "parse_config",
    "parse_config_text",
    "read_path_csv",
    "resolve_threshold",
    "run_campaign",
    "sample_compound_poisson_increment",
    "sample_gamma_increment",
    "sample_wiener_increment",
    "simulate_path",
    "splitmix64",
    "stationary_second_moment",
    "studentized_statistic",
    "sweep_intensity",
    "write_estimates_csv",
    "write_path_csv",
    "write_replications_csv",
    "write_summary_csv",
    "write_sweep_csv",
    "__version__",
]
