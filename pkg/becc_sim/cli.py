"""
Command-line interface for becc-sim.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from . import __version__
from .config import EnvSettings, ScenarioConfig, SweepConfig, load_config, load_environment
from .election_protocols import ProtocolName
from .experiments import (
    export_csv,
    export_trace_csv,
    replicate_seeds,
    run_multilevel_experiment,
    run_sweep_alpha,
    run_sweep_lambda,
    summarize_sweep,
    sweep_base,
    write_resolved_config,
)
from .metrics import metric_series
from .round_engine import run_simulation

logger = logging.getLogger(__name__)

EXIT_IO_ERROR = 1
EXIT_CONFIG_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="becc-sim",
        description="Cluster-head election simulator for heterogeneous-energy sensor networks",
    )
    parser.add_argument("--version", action="store_true", help="Show version information")
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Increase verbosity (use -vv for debug level)",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser, with_out_dir: bool = True) -> None:
        p.add_argument("--config", type=Path, help="TOML scenario file")
        if with_out_dir:
            p.add_argument("--out-dir", type=Path, help="Output directory (default: $BECC_OUT_DIR or ./results)")

    sim = sub.add_parser("simulate", help="Run one scenario and write its series and trace")
    common(sim)
    sim.add_argument("--protocol", choices=[p.value for p in ProtocolName])
    sim.add_argument("--seed", type=int)
    sim.add_argument("--rounds", type=int, help="Round budget (default: until all nodes are dead)")
    sim.add_argument("--stop-on-first-death", action="store_true")

    for name, help_text in (
        ("sweep-lambda", "Stability period versus the advanced-node fraction"),
        ("sweep-alpha", "Stability period versus the advanced-node energy multiplier"),
        ("multilevel", "All protocols on identical multi-level worlds"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--replicates", type=int)
        p.add_argument("--workers", type=int)

    validate = sub.add_parser("validate-config", help="Check a config file and print the resolved scenario")
    common(validate, with_out_dir=False)
    return parser


def _configure_logging(verbose: int, env_level: Optional[str]) -> None:
    log_level = logging.WARNING
    if verbose == 1:
        log_level = logging.INFO
    elif verbose >= 2:
        log_level = logging.DEBUG
    elif env_level:
        log_level = logging.getLevelName(env_level.upper())
        if not isinstance(log_level, int):
            raise ValueError(f"BECC_LOG_LEVEL is not a logging level: {env_level!r}")

    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )


def _first_set(*values: Optional[int]) -> Optional[int]:
    return next((v for v in values if v is not None), None)


def _at_least_one(flag: str, value: int) -> int:
    if value < 1:
        raise ValueError(f"{flag} must be at least 1, got {value}")
    return value


def _workers(args: argparse.Namespace, env: EnvSettings, sweep: SweepConfig) -> int:
    return _at_least_one("--workers", _first_set(args.workers, env.workers, sweep.workers))


def _replicates(args: argparse.Namespace, scenario: ScenarioConfig) -> int:
    return _at_least_one("--replicates", _first_set(args.replicates, scenario.replicates))


def _simulate(args, scenario: ScenarioConfig, out_dir: Path) -> None:
    overrides = {}
    if args.protocol:
        overrides["protocol"] = args.protocol
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.rounds is not None:
        overrides["rounds"] = args.rounds
    if args.stop_on_first_death:
        overrides["stop_on_first_death"] = True
    scenario = scenario.with_overrides(**overrides)

    trace = run_simulation(scenario)
    series = metric_series(trace)
    export_csv(series.to_frame(), out_dir / "series.csv", scenario)
    export_trace_csv(trace, out_dir / "trace.csv")
    write_resolved_config(out_dir, scenario)
    print(
        f"{scenario.protocol.value} seed={scenario.seed}: {len(trace)} rounds "
        f"({trace.termination.value}), stability period {series.stability_period}, "
        f"sink messages {int(series.sink_cumulative[-1]) if series.rounds else 0}"
    )


def _sweep(args, scenario: ScenarioConfig, sweep: SweepConfig, out_dir: Path, workers: int) -> None:
    param = "lambda" if args.command == "sweep-lambda" else "alpha"
    replicates = _replicates(args, scenario)
    base = sweep_base(scenario, sweep, param)
    if param == "lambda":
        table = run_sweep_lambda(base, sweep.lambdas, replicates, workers=workers)
    else:
        table = run_sweep_alpha(base, sweep.alphas, replicates, workers=workers)
    seeds = replicate_seeds(base.seed, replicates)
    export_csv(table, out_dir / f"sweep_{param}.csv", base, seeds)
    summary = summarize_sweep(table, param)
    export_csv(summary, out_dir / f"sweep_{param}_summary.csv", base, seeds)
    write_resolved_config(out_dir, base, sweep)
    print(summary.to_string(index=False))


def _multilevel(args, scenario: ScenarioConfig, out_dir: Path, workers: int) -> None:
    replicates = _replicates(args, scenario)
    result = run_multilevel_experiment(scenario, replicates, workers=workers)
    export_csv(result.stability_table(), out_dir / "multilevel_stability.csv", result.base, result.seeds)
    first = result.seeds[0]
    export_csv(result.series_frame(first), out_dir / f"multilevel_series_seed{first}.csv", result.base, [first])
    write_resolved_config(out_dir, result.base)
    for protocol, median in result.median_stability().items():
        print(f"{protocol.value:8s} median stability period {median:g}")


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the command-line interface."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        env = load_environment()
        _configure_logging(args.verbose, env.log_level)

        if args.version:
            print(f"becc-sim version {__version__}")
            return 0
        if not args.command:
            parser.print_help()
            return 0

        scenario, sweep = load_config(args.config)
        if args.command == "validate-config":
            print(scenario.echo())
            return 0

        out_dir = args.out_dir or env.out_dir
        logger.info(f"Running {args.command}, output in {out_dir}")
        if args.command == "simulate":
            _simulate(args, scenario, out_dir)
        elif args.command in ("sweep-lambda", "sweep-alpha"):
            _sweep(args, scenario, sweep, out_dir, _workers(args, env, sweep))
        else:
            _multilevel(args, scenario, out_dir, _workers(args, env, sweep))
    except (ValidationError, ValueError) as e:
        print(f"error: {' '.join(str(e).split())}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
