"""Command line interface.

Subcommands: simulate, estimate, table, compare.  Every command reads its
model and run settings from a config file (see :mod:`oujump.config` for
the grammar); there are no positional model parameters.  Exit codes:
0 success, 2 configuration or input error, 3 I/O error, 4 degenerate data.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import ConfigError, RunConfig, canonical_text, parse_config
from .estimators import (
    DegeneratePathError,
    jump_filtered_mle,
    least_squares,
    oracle_discretized_mle,
    resolve_threshold,
)
from .montecarlo import (
    UnsupportedSweepError,
    run_campaign,
    sweep_intensity,
    write_summary_csv,
    write_sweep_csv,
)
from .rng import RngStream
from .simulate import read_path_csv, simulate_path, write_path_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
        if getattr(args, "print_config", False):
            sys.stdout.write(canonical_text(config))
            return EXIT_OK
        return args.handler(args, config)
    except (ConfigError, UnsupportedSweepError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegeneratePathError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oujump",
        description=(
            "Simulate mean-reverting paths driven by noise with jumps and "
            "estimate the drift with a jump-filtered regression."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run configuration file")
    common.add_argument("--out", required=True, help="output CSV path")
    common.add_argument("--seed", type=int, default=None, help="override mc.seed")
    common.add_argument(
        "--print-config",
        action="store_true",
        help="echo the parsed config in canonical form and exit",
    )

    p_sim = sub.add_parser(
        "simulate", parents=[common], help="synthesize one path as CSV"
    )
    p_sim.add_argument(
        "--diagnostics",
        action="store_true",
        help="include the ground-truth increment decomposition columns",
    )
    p_sim.add_argument("--figures", action="store_true", help="render a path figure")
    p_sim.set_defaults(handler=_cmd_simulate)

    p_est = sub.add_parser(
        "estimate", parents=[common], help="estimate the drift from observations"
    )
    src = p_est.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="t,x CSV of observations")
    src.add_argument(
        "--self-sim",
        action="store_true",
        help="simulate a path from the config and estimate on it",
    )
    p_est.set_defaults(handler=_cmd_estimate)

    p_table = sub.add_parser(
        "table", parents=[common], help="Monte Carlo summary table"
    )
    p_table.add_argument("--workers", type=int, default=1, help="worker processes")
    p_table.add_argument(
        "--figures",
        action="store_true",
        help="render an error histogram per table row next to the CSV",
    )
    p_table.set_defaults(handler=_cmd_table)

    p_cmp = sub.add_parser(
        "compare",
        parents=[common],
        help="filtered vs unfiltered estimator across jump intensities",
    )
    p_cmp.add_argument(
        "intensities",
        nargs="+",
        type=float,
        help="jump intensities to sweep (0 = no jumps)",
    )
    p_cmp.add_argument("--workers", type=int, default=1, help="worker processes")
    p_cmp.add_argument(
        "--figures", action="store_true", help="render the sweep figure next to the CSV"
    )
    p_cmp.set_defaults(handler=_cmd_compare)
    return parser


def _load_config(args) -> RunConfig:
    try:
        config = parse_config(args.config)
    except FileNotFoundError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    return config


def _figure_path(out: str, suffix: str) -> str:
    stem, _ = os.path.splitext(out)
    return f"{stem}_{suffix}.png"


def _cmd_simulate(args, config: RunConfig) -> int:
    rng = RngStream(config.seed, 0)
    path = simulate_path(
        config.model,
        config.grid,
        rng,
        substeps=config.substeps,
        stationary_start=config.stationary_start,
    )
    write_path_csv(path, args.out, diagnostics=args.diagnostics)
    total = path.total_jumps
    jumps = "inf" if total is None else str(total)
    print(f"n={config.grid.n} T={config.grid.horizon:g} jumps={jumps}")
    if args.figures:
        from .figures import save_path_figure

        fig_path = _figure_path(args.out, "path")
        save_path_figure(
            path, fig_path, threshold=resolve_threshold(config.filter, config.grid.dt)
        )
        print(f"figure={fig_path}")
    return EXIT_OK


def _cmd_estimate(args, config: RunConfig) -> int:
    from .estimators import write_estimates_csv

    if args.self_sim:
        rng = RngStream(config.seed, 0)
        data = simulate_path(
            config.model,
            config.grid,
            rng,
            substeps=config.substeps,
            stationary_start=config.stationary_start,
        )
    else:
        if "oracle_mle" in config.estimators:
            raise ConfigError(
                "mc.estimators: oracle_mle needs ground truth; use --self-sim"
            )
        try:
            data = read_path_csv(args.data)
        except FileNotFoundError as exc:
            raise ConfigError(f"cannot read data: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"{args.data}: {exc}") from exc

    results = []
    for name in config.estimators:
        if name == "filtered_mle":
            results.append(jump_filtered_mle(data, config.filter))
        elif name == "lse":
            results.append(least_squares(data))
        else:
            results.append(oracle_discretized_mle(data))
    write_estimates_csv(results, args.out)
    first = results[0]
    print(f"a_hat={first.a_hat:.17g} filtered={first.filtered}")
    return EXIT_OK


def _cmd_table(args, config: RunConfig) -> int:
    from .montecarlo import McSummary

    summaries: list[McSummary] = []
    for row_config in config.row_configs():
        summaries.append(run_campaign(row_config.mc_config(), workers=args.workers))
    for i, summary in enumerate(summaries):
        write_summary_csv(summary, args.out, append=i > 0)
    for i, summary in enumerate(summaries):
        for name in summary.config.estimators:
            res = summary.results[name]
            print(
                f"row={i} estimator={name} mean={res.mean:.6g} "
                f"std={res.std_dev:.6g} avg_filtered={res.avg_filtered:.6g}"
            )
    if args.figures:
        from .figures import save_error_histogram

        for i, summary in enumerate(summaries):
            fig_path = _figure_path(args.out, f"row{i}_errors")
            save_error_histogram(summary, fig_path, summary.config.estimators[0])
            print(f"figure={fig_path}")
    return EXIT_OK


def _cmd_compare(args, config: RunConfig) -> int:
    rows = sweep_intensity(config.mc_config(), args.intensities, workers=args.workers)
    write_sweep_csv(rows, args.out)
    for row in rows:
        print(
            f"lambda={row.intensity:g} std_mle={row.std_mle:.6g} "
            f"std_lse={row.std_lse:.6g}"
        )
    if args.figures:
        from .figures import save_sweep_figure

        fig_path = _figure_path(args.out, "sweep")
        save_sweep_figure(rows, config.grid.horizon, fig_path)
        print(f"figure={fig_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
