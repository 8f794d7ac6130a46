"""
Network World - sensor population and field geometry

This module provides:
- Uniform random deployment of static nodes over a square field
- Sink placement at the field centre
- Two-level (normal/advanced) and multi-level (interval) initial energies
- The `World` snapshot that the round engine mutates

Positions exist only for the simulator's energy accounting; no election rule
ever reads them (nodes are location-unaware).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .rng import SeededRNG

logger = logging.getLogger(__name__)

# rounds_since_ch value for a node that has never served as cluster head
NEVER_ELECTED = 1 << 30


@dataclass(frozen=True)
class Position:
    """Planar position in meters"""
    x: float
    y: float


@dataclass
class Node:
    """A sensor node and its per-protocol bookkeeping"""
    id: int
    pos: Position
    e_init: float = 0.0
    e_res: float = 0.0
    alive: bool = True
    rounds_since_ch: int = NEVER_ELECTED
    q_pol_carry: float = 1.0
    is_advanced: Optional[bool] = None  # set only in two-level worlds


class TwoLevelSpec(BaseModel):
    """A lam fraction of advanced nodes carries (1 + alpha) * e0 joules"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    variant: Literal["two-level"] = "two-level"
    e0: float = Field(default=1.0, gt=0)
    lam: float = Field(default=0.2, gt=0, lt=1)
    alpha: float = Field(default=3.0, ge=0)

    def advanced_count(self, n: int) -> int:
        return int(math.floor(self.lam * n + 0.5))


class MultiLevelSpec(BaseModel):
    """Initial energies drawn uniformly from [e_min, e_max]"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    variant: Literal["multi-level"] = "multi-level"
    e_min: float = Field(default=1.0, gt=0)
    e_max: float = Field(default=5.0, gt=0)
    total_target: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_interval(self) -> "MultiLevelSpec":
        if self.e_min > self.e_max:
            raise ValueError(f"e_min ({self.e_min}) must not exceed e_max ({self.e_max})")
        return self

    def check_total(self, n: int) -> None:
        if self.total_target is None:
            return
        low, high = n * self.e_min, n * self.e_max
        if not low <= self.total_target <= high:
            raise ValueError(
                f"total_target {self.total_target} J is outside [{low}, {high}] J for {n} nodes"
            )


HeterogeneitySpec = Union[TwoLevelSpec, MultiLevelSpec]


@dataclass
class World:
    """Deployed network: nodes, field side, sink, cached coordinate array"""
    nodes: List[Node]
    side: float
    sink: Position
    coords: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.coords = np.array([[n.pos.x, n.pos.y] for n in self.nodes], dtype=float).reshape(-1, 2)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def alive_nodes(self) -> List[Node]:
        return [n for n in self.nodes if n.alive]

    def alive_count(self) -> int:
        return sum(1 for n in self.nodes if n.alive)

    def total_residual(self) -> float:
        return math.fsum(n.e_res for n in self.nodes if n.alive)

    def total_initial(self) -> float:
        return math.fsum(n.e_init for n in self.nodes)

    def residual_energies(self) -> np.ndarray:
        return np.array([n.e_res for n in self.nodes], dtype=float)

    def alive_mask(self) -> np.ndarray:
        return np.array([n.alive for n in self.nodes], dtype=bool)

    def distance_to_sink(self, node_id: int) -> float:
        return distance(self.nodes[node_id].pos, self.sink)


def deploy_uniform(n: int, side: float, rng: SeededRNG) -> List[Position]:
    """n positions with coordinates i.i.d. uniform on [0, side]."""
    if n <= 0:
        raise ValueError(f"node count must be positive, got {n}")
    if side <= 0:
        raise ValueError(f"field side must be positive, got {side}")
    xy = rng.uniform(0.0, side, size=(n, 2))
    return [Position(float(x), float(y)) for x, y in xy]


def sink_position(side: float) -> Position:
    if side <= 0:
        raise ValueError(f"field side must be positive, got {side}")
    return Position(side / 2, side / 2)


def distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def assign_two_level(nodes: Sequence[Node], spec: TwoLevelSpec, rng: SeededRNG) -> None:
    """Give a uniformly random subset of round(lam * N) nodes (1 + alpha) * e0 joules."""
    n = len(nodes)
    k = spec.advanced_count(n)
    if k <= 0 or k >= n:
        raise ValueError(
            f"lam={spec.lam} with {n} nodes gives {k} advanced nodes; the network would be homogeneous"
        )
    advanced = set(rng.sample_without_replacement(n, k))
    e_adv = (1 + spec.alpha) * spec.e0
    for i, node in enumerate(nodes):
        node.is_advanced = i in advanced
        node.e_init = e_adv if node.is_advanced else spec.e0
        node.e_res = node.e_init
    logger.debug(f"Two-level energies: {k} advanced at {e_adv} J, {n - k} normal at {spec.e0} J")


def assign_multi_level(nodes: Sequence[Node], spec: MultiLevelSpec, rng: SeededRNG) -> None:
    """
    Draw initial energies uniformly from [e_min, e_max].

    When `total_target` is set, the draws are rescaled multiplicatively so the
    network total equals the target; individual values may then sit slightly
    outside the interval.
    """
    n = len(nodes)
    spec.check_total(n)
    draws = rng.uniform(spec.e_min, spec.e_max, size=n)
    if spec.total_target is not None:
        draws = draws * (spec.total_target / math.fsum(draws))
        outside = int(np.count_nonzero((draws < spec.e_min) | (draws > spec.e_max)))
        if outside:
            logger.debug(f"Rescaling to {spec.total_target} J left {outside} energies outside the interval")
    for node, e in zip(nodes, draws):
        node.is_advanced = None
        node.e_init = float(e)
        node.e_res = node.e_init


def build_world(
    n: int,
    side: float,
    heterogeneity: HeterogeneitySpec,
    rng: SeededRNG,
    sink: Optional[Position] = None,
) -> World:
    """Deploy nodes, then assign energies; the draw order is fixed (positions first)."""
    positions = deploy_uniform(n, side, rng)
    nodes = [Node(id=i, pos=p) for i, p in enumerate(positions)]
    if isinstance(heterogeneity, TwoLevelSpec):
        assign_two_level(nodes, heterogeneity, rng)
    else:
        assign_multi_level(nodes, heterogeneity, rng)
    world = World(nodes=nodes, side=side, sink=sink or sink_position(side))
    logger.debug(f"Built world: {n} nodes, {world.total_initial():.6g} J total, sink at {world.sink}")
    return world
