"""
Experiment harness

This module provides:
- Two-level stability sweeps over lambda (advanced fraction) and alpha (extra energy)
- The multi-level experiment: all protocols on identical worlds per seed
- Sweep summaries and relative improvement between protocols
- CSV export with a one-line provenance header

Replicates run in a process pool when `workers > 1`; results are assembled in
(protocol, grid point, seed) order so the worker count never changes output.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TypeVar, Union

import numpy as np
import pandas as pd

from . import __version__
from .config import ScenarioConfig, SweepConfig
from .election_protocols import ProtocolName
from .metrics import MetricSeries, metric_series, stability_period, trend_slope
from .network_world import MultiLevelSpec, TwoLevelSpec
from .rng import MAX_SEED
from .round_engine import SimulationTrace, run_simulation

logger = logging.getLogger(__name__)

SWEEP_PROTOCOLS = (ProtocolName.LEACH, ProtocolName.LEACH_E, ProtocolName.SEP, ProtocolName.BECC)
MULTILEVEL_PROTOCOLS = (ProtocolName.LEACH, ProtocolName.LEACH_E, ProtocolName.SEP_M, ProtocolName.BECC)

T = TypeVar("T")
R = TypeVar("R")


def replicate_seeds(base_seed: int, replicates: int) -> List[int]:
    if replicates <= 0:
        raise ValueError(f"replicates must be positive, got {replicates}")
    return [(base_seed + i) % (MAX_SEED + 1) for i in range(replicates)]


def _execute(fn: Callable[[T], R], jobs: Sequence[T], workers: int) -> List[R]:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _run_stability(config: ScenarioConfig) -> int:
    return stability_period(run_simulation(config))


def _run_series(config: ScenarioConfig) -> MetricSeries:
    return metric_series(run_simulation(config))


def _run_sweep(
    base: ScenarioConfig, param: str, values: Iterable[float], replicates: int, workers: int
) -> pd.DataFrame:
    spec = base.heterogeneity
    if not isinstance(spec, TwoLevelSpec):
        raise ValueError(f"the {param} sweep needs a two-level base configuration")
    values = list(values)
    seeds = replicate_seeds(base.seed, replicates)
    keys, jobs = [], []
    for protocol in SWEEP_PROTOCOLS:
        for value in values:
            point = TwoLevelSpec.model_validate({**spec.model_dump(), param: value})
            for seed in seeds:
                keys.append((protocol.value, value, seed))
                jobs.append(
                    base.with_overrides(
                        protocol=protocol, heterogeneity=point, seed=seed, stop_on_first_death=True
                    )
                )
    logger.info(f"Sweeping {param} over {values}:{len(jobs)} runs on {workers} worker(s)")
    periods = _execute(_run_stability, jobs, workers)
    return pd.DataFrame(
        [{"protocol": p, param: v, "seed": s, "stability_period": sp} for (p, v, s), sp in zip(keys, periods)]
    )


def run_sweep_lambda(
    base: ScenarioConfig, lambdas: Sequence[float], replicates: int, workers: int = 1
) -> pd.DataFrame:
    """Stability period per (protocol, lambda, seed); alpha and e0 come from the base spec."""
    return _run_sweep(base, "lam", lambdas, replicates, workers).rename(columns={"lam": "lambda"})


def run_sweep_alpha(
    base: ScenarioConfig, alphas: Sequence[float], replicates: int, workers: int = 1
) -> pd.DataFrame:
    """Stability period per (protocol, alpha, seed); lambda and e0 come from the base spec."""
    return _run_sweep(base, "alpha", alphas, replicates, workers)


def sweep_base(scenario: ScenarioConfig, sweep: SweepConfig, param: str) -> ScenarioConfig:
    """
    Two-level base for a sweep over `param` ("lambda" or "alpha").

    The other parameter is pinned to the sweep's fixed value; e0 is kept from
    a two-level scenario and defaults to 1 J otherwise.
    """
    if param not in ("lambda", "alpha"):
        raise ValueError(f"unknown sweep parameter {param!r}")
    e0 = scenario.heterogeneity.e0 if isinstance(scenario.heterogeneity, TwoLevelSpec) else 1.0
    spec = TwoLevelSpec(e0=e0, lam=sweep.fixed_lambda, alpha=sweep.fixed_alpha)
    return scenario.with_overrides(heterogeneity=spec, protocol=ProtocolName.BECC)


def summarize_sweep(table: pd.DataFrame, param: str) -> pd.DataFrame:
    """Mean and median stability period per (protocol, grid point)."""
    return (
        table.groupby(["protocol", param], sort=True)["stability_period"]
        .agg(["mean", "median"])
        .reset_index()
    )


def improvement_over(summary: pd.DataFrame, protocol: str, baseline: str, param: str) -> float:
    """Relative mean-stability gain of `protocol` over `baseline`, averaged across the grid."""
    ours = summary[summary["protocol"] == protocol].set_index(param)["mean"]
    theirs = summary[summary["protocol"] == baseline].set_index(param)["mean"]
    if ours.empty or theirs.empty:
        raise ValueError(f"summary has no rows for {protocol!r} or {baseline!r}")
    ratio = (ours / theirs).dropna()
    return float(ratio.mean() - 1.0)


@dataclass
class MultilevelResult:
    """Aligned per-seed series for every protocol of the multi-level experiment"""
    base: ScenarioConfig
    seeds: List[int]
    series: Dict[ProtocolName, List[MetricSeries]] = field(default_factory=dict)

    def stability_table(self) -> pd.DataFrame:
        rows = []
        for protocol, runs in self.series.items():
            for run in runs:
                window = run.stability_window()
                stddev = run.stddev[window]
                rows.append(
                    {
                        "protocol": protocol.value,
                        "seed": run.seed,
                        "stability_period": run.stability_period,
                        "death_80_round": run.death_round(0.8),
                        "sink_msgs_final": int(run.sink_cumulative[-1]) if run.rounds else 0,
                        "delivered_final": int(run.delivered_cumulative[-1]) if run.rounds else 0,
                        "stddev_mean_j": float(stddev.mean()) if stddev.size else 0.0,
                        "stddev_slope": trend_slope(stddev),
                    }
                )
        return pd.DataFrame(rows)

    def median_stability(self) -> Dict[ProtocolName, float]:
        return {p: float(np.median([r.stability_period for r in runs])) for p, runs in self.series.items()}

    def series_frame(self, seed: int) -> pd.DataFrame:
        idx = self.seeds.index(seed)
        return pd.concat([runs[idx].to_frame() for runs in self.series.values()], ignore_index=True)


def run_multilevel_experiment(
    base: ScenarioConfig,
    replicates: int,
    workers: int = 1,
    equalize_totals: bool = True,
    protocols: Sequence[ProtocolName] = MULTILEVEL_PROTOCOLS,
) -> MultilevelResult:
    """
    Run every protocol on the same worlds (same seed, same deployment and energies).

    With `equalize_totals`, a base spec without a total target gets
    N * (e_min + e_max) / 2 so every replicate network holds the same energy.
    """
    spec = base.heterogeneity
    if not isinstance(spec, MultiLevelSpec):
        raise ValueError("the multi-level experiment needs a multi-level base configuration")
    if equalize_totals and spec.total_target is None:
        spec = spec.model_copy(update={"total_target": base.nodes * (spec.e_min + spec.e_max) / 2})
    seeds = replicate_seeds(base.seed, replicates)
    jobs = [
        base.with_overrides(protocol=protocol, heterogeneity=spec, seed=seed)
        for protocol in protocols
        for seed in seeds
    ]
    logger.info(f"Multi-level experiment: {len(protocols)} protocols x {len(seeds)} seeds on {workers} worker(s)")
    results = _execute(_run_series, jobs, workers)
    result = MultilevelResult(base=base.with_overrides(heterogeneity=spec), seeds=seeds)
    for i, protocol in enumerate(protocols):
        result.series[ProtocolName(protocol)] = results[i * len(seeds):(i + 1) * len(seeds)]
    return result


def provenance_header(config: ScenarioConfig, seeds: Sequence[int]) -> str:
    return f"# becc-sim {__version__} seeds={','.join(str(s) for s in seeds)} config={config.echo()}"


def export_csv(
    frame: pd.DataFrame, path: Union[str, Path], config: ScenarioConfig, seeds: Optional[Sequence[int]] = None
) -> Path:
    """Write one metric family to `path`: provenance comment line, header, rows (9 significant digits)."""
    path = Path(path)
    header = provenance_header(config, seeds if seeds is not None else [config.seed])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(header + "\n")
            frame.to_csv(fh, index=False, float_format="%.9g", lineterminator="\n")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def trace_frame(trace: SimulationTrace) -> pd.DataFrame:
    """Raw per-round record of one run."""
    return pd.DataFrame(
        [
            {
                "round": r.round,
                "heads": r.head_count,
                "direct": r.direct_count,
                "deaths": len(r.deaths),
                "sink_msgs": r.sink_messages,
                "delivered": r.delivered_frames,
                "alive": r.alive_count,
                "total_residual_j": float(r.residual_energy.sum()),
                "energy_spent_j": float(r.energy_spent.sum()),
            }
            for r in trace.reports
        ],
        columns=["round", "heads", "direct", "deaths", "sink_msgs", "delivered", "alive", "total_residual_j", "energy_spent_j"],
    )


def export_trace_csv(trace: SimulationTrace, path: Union[str, Path]) -> Path:
    return export_csv(trace_frame(trace), path, trace.config, [trace.seed])


def write_resolved_config(
    out_dir: Union[str, Path], scenario: ScenarioConfig, sweep: Optional[SweepConfig] = None
) -> Path:
    path = Path(out_dir) / "resolved_config.json"
    payload = {"version": __version__, "scenario": scenario.model_dump(mode="json")}
    if sweep is not None:
        payload["sweep"] = sweep.model_dump(mode="json")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e
    return path
