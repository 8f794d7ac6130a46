"""
becc-sim - cluster-head election in heterogeneous-energy wireless sensor networks
"""

__version__ = "0.1.0"

from .radio_energy import RadioParams, agg_energy, crossover_distance, rx_energy, tx_energy
from .rng import SeededRNG
from .network_world import MultiLevelSpec, Node, Position, TwoLevelSpec, World, build_world
from .election_protocols import ElectionProtocol, ProtocolName, make_protocol
from .config import RadioConfig, ScenarioConfig, SweepConfig, load_config
from .round_engine import (
    ClusterAssignment,
    RoundReport,
    SimulationTrace,
    TerminationReason,
    run_round,
    run_setup_phase,
    run_simulation,
    run_steady_state,
)
from .metrics import MetricSeries, metric_series, stability_period
from .experiments import (
    MultilevelResult,
    export_csv,
    run_multilevel_experiment,
    run_sweep_alpha,
    run_sweep_lambda,
)

__all__ = [
    "__version__",
    "RadioParams",
    "agg_energy",
    "crossover_distance",
    "rx_energy",
    "tx_energy",
    "SeededRNG",
    "MultiLevelSpec",
    "Node",
    "Position",
    "TwoLevelSpec",
    "World",
    "build_world",
    "ElectionProtocol",
    "ProtocolName",
    "make_protocol",
    "RadioConfig",
    "ScenarioConfig",
    "SweepConfig",
    "load_config",
    "ClusterAssignment",
    "RoundReport",
    "SimulationTrace",
    "TerminationReason",
    "run_round",
    "run_setup_phase",
    "run_simulation",
    "run_steady_state",
    "MetricSeries",
    "metric_series",
    "stability_period",
    "MultilevelResult",
    "export_csv",
    "run_multilevel_experiment",
    "run_sweep_alpha",
    "run_sweep_lambda",
]
