"""
Round Engine - set-up and steady-state phases of one round, iterated into a run

Set-up phase:
- Every alive node draws its self-election against its protocol threshold
- Non-heads join the nearest head (Euclidean distance stands in for received
  signal strength); with no heads at all, every node sends straight to the sink
- The protocol's post-clustering hook runs (BECC stores polarized factors)

Steady-state phase:
- One k-bit frame per alive node; members send to their head, heads receive,
  aggregate their members' frames with their own and forward one frame to the sink
- Energy is drawn (floored at zero) and nodes at zero die at round end

Control traffic (advertisements, join requests, schedules, piggybacked
factors) is not charged.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from .config import ScenarioConfig
from .election_protocols import ElectionProtocol, elect, make_protocol
from .network_world import World, build_world, distance
from .radio_energy import RadioParams, agg_energy, rx_energy, tx_energy
from .rng import SeededRNG

logger = logging.getLogger(__name__)

DIRECT_TO_SINK = -1


class TerminationReason(str, Enum):
    BUDGET_EXHAUSTED = "budget exhausted"
    ALL_DEAD = "all nodes dead"
    FIRST_DEATH = "first death"


@dataclass
class ClusterAssignment:
    """Roles for one round: head ids, node -> head (or DIRECT_TO_SINK), head -> members"""
    heads: List[int]
    membership: Dict[int, int]
    clusters: Dict[int, List[int]] = field(default_factory=dict)  # head first, then members by id

    @property
    def direct(self) -> List[int]:
        return [i for i, h in self.membership.items() if h == DIRECT_TO_SINK]

    def validate(self, world: World) -> None:
        alive = {n.id for n in world.nodes if n.alive}
        if set(self.membership) != alive:
            raise ValueError("assignment does not cover exactly the alive nodes")
        for head in self.heads:
            if self.membership.get(head) != head or self.clusters.get(head, [None])[0] != head:
                raise ValueError(f"head {head} is not the first member of its own cluster")
        for node_id, head in self.membership.items():
            if head != DIRECT_TO_SINK and head not in alive:
                raise ValueError(f"node {node_id} joined dead or unknown head {head}")


@dataclass
class RoundReport:
    round: int
    head_count: int
    direct_count: int
    sink_messages: int
    energy_spent: np.ndarray
    residual_energy: np.ndarray
    alive: np.ndarray
    deaths: List[int] = field(default_factory=list)
    delivered_frames: int = 0  # node readings reaching the sink, directly or fused by a head

    @property
    def alive_count(self) -> int:
        return int(np.count_nonzero(self.alive))


@dataclass
class SimulationTrace:
    config: ScenarioConfig
    seed: int
    node_count: int
    initial_energy: np.ndarray
    reports: List[RoundReport] = field(default_factory=list)
    termination: Optional[TerminationReason] = None

    def __len__(self) -> int:
        return len(self.reports)


def run_setup_phase(world: World, protocol: ElectionProtocol, rng: SeededRNG, r: int = 0) -> ClusterAssignment:
    alive = world.alive_nodes()
    if not alive:
        raise ValueError("set-up phase needs at least one alive node")

    gv = protocol.global_view(world)
    heads = []
    for node in alive:  # ascending id: fixed draw order
        if elect(protocol.threshold(protocol.context(node, r, gv)), rng):
            heads.append(node.id)

    if not heads:
        logger.debug(f"Round {r}: no cluster head elected, {len(alive)} nodes send directly to the sink")
        return ClusterAssignment(heads=[], membership={n.id: DIRECT_TO_SINK for n in alive})

    for head in heads:
        world.nodes[head].rounds_since_ch = 0

    membership = {h: h for h in heads}
    clusters = {h: [h] for h in heads}
    head_set = set(heads)
    others = [n.id for n in alive if n.id not in head_set]
    if others:
        diff = world.coords[others][:, None, :] - world.coords[heads][None, :, :]
        nearest = np.argmin(np.hypot(diff[..., 0], diff[..., 1]), axis=1)
        for node_id, k in zip(others, nearest):
            head = heads[int(k)]
            membership[node_id] = head
            clusters[head].append(node_id)

    assignment = ClusterAssignment(heads=heads, membership=membership, clusters=clusters)
    protocol.on_clusters_formed(world, assignment.clusters)
    return assignment


def apply_death(world: World, report: RoundReport) -> None:
    """Mark alive nodes with no energy left as dead, recording each death once."""
    for node in world.nodes:
        if node.alive and node.e_res <= 0:
            node.alive = False
            node.e_res = 0.0
            report.deaths.append(node.id)


def run_steady_state(world: World, assignment: ClusterAssignment, radio: RadioParams, r: int = 0) -> RoundReport:
    k = radio.msg_bits
    cost = np.zeros(world.size)

    for head, members in assignment.clusters.items():
        head_node = world.nodes[head]
        for member in members[1:]:
            cost[member] = tx_energy(k, distance(world.nodes[member].pos, head_node.pos), radio)
        cost[head] = (
            (len(members) - 1) * rx_energy(k, radio)
            + agg_energy(len(members), k, radio)
            + tx_energy(k, distance(head_node.pos, world.sink), radio)
        )
    direct = assignment.direct
    for node_id in direct:
        cost[node_id] = tx_energy(k, world.distance_to_sink(node_id), radio)

    spent = np.zeros(world.size)
    for node_id in assignment.membership:
        node = world.nodes[node_id]
        before = node.e_res
        # a node that cannot afford the frame still sends it and is left empty
        node.e_res = 0.0 if cost[node_id] >= before else before - cost[node_id]
        spent[node_id] = before - node.e_res

    report = RoundReport(
        round=r,
        head_count=len(assignment.heads),
        direct_count=len(direct),
        sink_messages=len(assignment.heads) + len(direct),
        delivered_frames=len(assignment.membership),
        energy_spent=spent,
        residual_energy=np.empty(0),
        alive=np.empty(0, dtype=bool),
    )
    apply_death(world, report)
    report.residual_energy = world.residual_energies()
    report.alive = world.alive_mask()
    return report


def run_round(
    world: World, protocol: ElectionProtocol, radio: RadioParams, rng: SeededRNG, r: int
) -> RoundReport:
    assignment = run_setup_phase(world, protocol, rng, r)
    report = run_steady_state(world, assignment, radio, r)
    for node in world.nodes:
        if node.alive:
            node.rounds_since_ch += 1
    logger.debug(f"Round {r}: {report.head_count} heads, {report.alive_count} alive, deaths {report.deaths}")
    return report


def run_simulation(config: ScenarioConfig) -> SimulationTrace:
    """Build the world from `config` and run rounds until the budget or total death."""
    if not isinstance(config, ScenarioConfig):
        config = ScenarioConfig.model_validate(config)

    rng = SeededRNG(config.seed)
    world = build_world(config.nodes, config.side, config.heterogeneity, rng, sink=config.sink_position())
    protocol = make_protocol(config.protocol, config.p_opt, config.heterogeneity)
    radio = config.radio.to_params()

    trace = SimulationTrace(
        config=config,
        seed=config.seed,
        node_count=world.size,
        initial_energy=np.array([n.e_init for n in world.nodes]),
    )
    logger.info(f"Running {config.protocol.value} on {world.size} nodes, seed={config.seed}")

    r = 0
    fallback_rounds = 0
    while True:
        if world.alive_count() == 0:
            trace.termination = TerminationReason.ALL_DEAD
            break
        if config.rounds is not None and r >= config.rounds:
            trace.termination = TerminationReason.BUDGET_EXHAUSTED
            break
        report = run_round(world, protocol, radio, rng, r)
        trace.reports.append(report)
        if report.head_count == 0:
            fallback_rounds += 1
        r += 1
        if config.stop_on_first_death and report.deaths:
            trace.termination = TerminationReason.FIRST_DEATH
            break

    logger.info(
        f"Finished {config.protocol.value} seed={config.seed}: {len(trace)} rounds, "
        f"{trace.termination.value}, {fallback_rounds} direct-to-sink rounds"
    )
    return trace
