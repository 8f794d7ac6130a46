"""
Lifetime and throughput metrics extracted from simulation traces.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from .round_engine import SimulationTrace


@dataclass
class MetricSeries:
    """Per-round series of one run plus its stability period"""
    protocol: str
    seed: int
    node_count: int
    alive: np.ndarray
    stddev: np.ndarray
    sink_cumulative: np.ndarray
    delivered_cumulative: np.ndarray
    stability_period: int

    @property
    def rounds(self) -> int:
        return len(self.alive)

    def death_round(self, fraction: float) -> Optional[int]:
        return _first_death_fraction(self.alive, self.node_count, fraction)

    def stability_window(self) -> slice:
        return slice(0, self.stability_period)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "protocol": self.protocol,
                "round": np.arange(self.rounds),
                "alive": self.alive,
                "stddev_j": self.stddev,
                "sink_msgs_cum": self.sink_cumulative,
                "delivered_cum": self.delivered_cumulative,
            }
        )


def stability_period(trace: SimulationTrace) -> int:
    """Index of the first round that records a death; the trace length if none did."""
    if not trace.reports:
        raise ValueError("stability period of an empty trace is undefined")
    for i, report in enumerate(trace.reports):
        if report.deaths:
            return i
    return len(trace.reports)


def alive_series(trace: SimulationTrace) -> np.ndarray:
    return np.array([r.alive_count for r in trace.reports], dtype=int)


def residual_stddev_series(trace: SimulationTrace) -> np.ndarray:
    """Population standard deviation of residual energy over alive nodes, per round."""
    values = []
    for report in trace.reports:
        residual = report.residual_energy[report.alive]
        values.append(float(np.std(residual)) if residual.size > 1 else 0.0)
    return np.array(values, dtype=float)


def sink_message_series(trace: SimulationTrace) -> np.ndarray:
    return np.cumsum(np.array([r.sink_messages for r in trace.reports], dtype=np.int64))


def delivered_frame_series(trace: SimulationTrace) -> np.ndarray:
    """Cumulative node readings that reached the sink, whether sent directly or fused by a head."""
    return np.cumsum(np.array([r.delivered_frames for r in trace.reports], dtype=np.int64))


def _first_death_fraction(alive: np.ndarray, node_count: int, fraction: float) -> Optional[int]:
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    needed = math.ceil(fraction * node_count - 1e-9)
    hits = np.flatnonzero(node_count - alive >= needed)
    return int(hits[0]) if hits.size else None


def death_round(trace: SimulationTrace, fraction: float) -> Optional[int]:
    """First round by whose end at least `fraction` of the nodes are dead."""
    return _first_death_fraction(alive_series(trace), trace.node_count, fraction)


def trend_slope(values: np.ndarray) -> float:
    """Least-squares slope of values against their index."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    slope, _ = np.polyfit(np.arange(values.size, dtype=float), values, 1)
    return float(slope)


def metric_series(trace: SimulationTrace) -> MetricSeries:
    return MetricSeries(
        protocol=trace.config.protocol.value,
        seed=trace.seed,
        node_count=trace.node_count,
        alive=alive_series(trace),
        stddev=residual_stddev_series(trace),
        sink_cumulative=sink_message_series(trace),
        delivered_cumulative=delivered_frame_series(trace),
        stability_period=stability_period(trace) if trace.reports else 0,
    )
