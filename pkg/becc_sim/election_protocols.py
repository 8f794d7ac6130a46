"""
Cluster-head election protocols

Five self-election rules behind one strategy interface:
- LEACH: rotating threshold over the eligible (G) set
- LEACH-E: residual energy relative to the network average (needs global energy)
- SEP: two-level weighted probabilities for normal and advanced nodes
- SEP-M: initial-energy weighted probabilities for multi-level networks
- BECC: polarized energy factor computed by each cluster head for its members

Every rule reduces to a probability threshold in [0, 1]; `elect` turns it into
a Bernoulli draw from the run's single random stream.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from .network_world import HeterogeneitySpec, Node, TwoLevelSpec, World
from .rng import SeededRNG

logger = logging.getLogger(__name__)


class ProtocolName(str, Enum):
    """Supported election protocols"""
    LEACH = "leach"
    LEACH_E = "leach-e"
    SEP = "sep"
    SEP_M = "sep-m"
    BECC = "becc"


@dataclass(frozen=True)
class NodeView:
    """What a node knows about itself"""
    e_res: float
    e_init: float
    rounds_since_ch: int
    q_pol_carry: float = 1.0
    is_advanced: Optional[bool] = None

    @classmethod
    def of(cls, node: Node) -> "NodeView":
        return cls(
            e_res=node.e_res,
            e_init=node.e_init,
            rounds_since_ch=node.rounds_since_ch,
            q_pol_carry=node.q_pol_carry,
            is_advanced=node.is_advanced,
        )


@dataclass(frozen=True)
class GlobalView:
    """Network-wide knowledge; only protocols that need it receive one"""
    total_residual: float
    alive_count: int
    total_initial: float = 0.0  # initial energy of the alive population


@dataclass(frozen=True)
class ElectionContext:
    round: int
    p_opt: float
    node_view: NodeView
    global_view: Optional[GlobalView] = None

    def __post_init__(self):
        if not 0 < self.p_opt < 1:
            raise ValueError(f"p_opt must lie in (0, 1), got {self.p_opt}")
        if self.round < 0:
            raise ValueError(f"round must be non-negative, got {self.round}")


@dataclass(frozen=True)
class BeccClusterStats:
    """Residual energies of every member of one cluster, head included"""
    energies: Tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.energies)


def _clamp(p: float) -> float:
    return min(1.0, max(0.0, p))


def epoch_length(p: float) -> int:
    """Rotation epoch ceil(1/p); 1/p is rounded to 9 decimals first so 1/0.05 stays 20."""
    return math.ceil(round(1.0 / p, 9))


def rotation_threshold(p: float, r: int, rounds_since_ch: int) -> float:
    """
    Rotating threshold p / (1 - p (r mod epoch)) for eligible nodes, 0 otherwise.

    A node is eligible (in G) when it has not been head in the last
    r mod epoch rounds, i.e. not since the current epoch began. The set
    refills at every epoch boundary and the threshold reaches 1 in the
    epoch's last round, so each alive node heads once per epoch.
    """
    if p <= 0:
        return 0.0
    if p >= 1:
        return 1.0
    epoch = epoch_length(p)
    if rounds_since_ch <= r % epoch:
        return 0.0
    denom = 1.0 - p * (r % epoch)
    if denom <= 0:
        return 1.0
    return _clamp(p / denom)


def leach_threshold(ctx: ElectionContext) -> float:
    return rotation_threshold(ctx.p_opt, ctx.round, ctx.node_view.rounds_since_ch)


def becc_relative_factor(stats: BeccClusterStats) -> np.ndarray:
    """q_rel for each member: its residual energy over the cluster mean."""
    if stats.n == 0:
        raise ValueError("cluster has no members")
    energies = np.asarray(stats.energies, dtype=float)
    total = math.fsum(stats.energies)
    if total <= 0:
        raise ValueError(f"cluster total energy must be positive, got {total}")
    return energies / total * stats.n


def becc_polarized_factors(stats: BeccClusterStats) -> np.ndarray:
    """
    Polarized energy factor q_pol for each member.

    Below-average members (q_rel < 1) get 0; their q_rel mass is handed to the
    above-average members in proportion to their own q_rel, so the factors
    still sum to n.
    """
    q_rel = becc_relative_factor(stats)
    above = q_rel >= 1.0
    # rounding can leave the maximum just below 1 when energies are equal
    above |= np.asarray(stats.energies) == max(stats.energies)
    mass_above = math.fsum(q_rel[above])
    mass_below = math.fsum(q_rel[~above])
    return np.where(above, q_rel + q_rel * mass_below / mass_above, 0.0)


def becc_threshold(q_pol: float, p_opt: float) -> float:
    if q_pol < 0:
        raise ValueError(f"polarized factor must be non-negative, got {q_pol}")
    return min(1.0, p_opt * q_pol)


def leach_e_threshold(ctx: ElectionContext) -> float:
    """p_opt * N_alive * E_res / E_total: the average node gets p_opt."""
    gv = ctx.global_view
    if gv is None:
        raise ValueError("LEACH-E needs the network's total residual energy (global_view)")
    if gv.total_residual <= 0:
        return 0.0
    return _clamp(ctx.p_opt * gv.alive_count * ctx.node_view.e_res / gv.total_residual)


def sep_class_probabilities(p_opt: float, lam: float, alpha: float) -> Tuple[float, float]:
    """(p_nrm, p_adv) with weighted mean (1 - lam) p_nrm + lam p_adv = p_opt."""
    p_nrm = p_opt / (1 + lam * alpha)
    p_adv = p_opt * (1 + alpha) / (1 + lam * alpha)
    return p_nrm, p_adv


def sep_thresholds(ctx: ElectionContext, lam: float, alpha: float) -> float:
    is_advanced = ctx.node_view.is_advanced
    if is_advanced is None:
        raise ValueError("SEP needs a two-level network; this node has no normal/advanced class")
    p_nrm, p_adv = sep_class_probabilities(ctx.p_opt, lam, alpha)
    p = p_adv if is_advanced else p_nrm
    return rotation_threshold(p, ctx.round, ctx.node_view.rounds_since_ch)


def sep_m_base_probability(ctx: ElectionContext) -> float:
    gv = ctx.global_view
    if gv is None or gv.total_initial <= 0:
        raise ValueError("SEP-M needs the alive population's initial energy (global_view.total_initial)")
    return _clamp(ctx.p_opt * gv.alive_count * ctx.node_view.e_init / gv.total_initial)


def sep_m_threshold(ctx: ElectionContext) -> float:
    """Initial-energy weighted probability fed through the rotating threshold."""
    base = sep_m_base_probability(ctx)
    return rotation_threshold(base, ctx.round, ctx.node_view.rounds_since_ch)


def elect(threshold: float, rng: SeededRNG) -> bool:
    """Bernoulli draw; always consumes exactly one number from the stream."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    return rng.random() < threshold


class ElectionProtocol(ABC):
    """Strategy interface shared by all election rules"""

    name: ProtocolName

    def __init__(self, p_opt: float):
        if not 0 < p_opt < 1:
            raise ValueError(f"p_opt must lie in (0, 1), got {p_opt}")
        self.p_opt = p_opt

    def global_view(self, world: World) -> Optional[GlobalView]:
        return None

    def context(self, node: Node, r: int, global_view: Optional[GlobalView] = None) -> ElectionContext:
        return ElectionContext(round=r, p_opt=self.p_opt, node_view=NodeView.of(node), global_view=global_view)

    @abstractmethod
    def threshold(self, ctx: ElectionContext) -> float:
        ...

    def on_clusters_formed(self, world: World, clusters: Mapping[int, Sequence[int]]) -> None:
        """Hook run at the end of set-up with head id -> member ids (head included)."""


class LeachProtocol(ElectionProtocol):
    name = ProtocolName.LEACH

    def threshold(self, ctx: ElectionContext) -> float:
        return leach_threshold(ctx)


class LeachEProtocol(ElectionProtocol):
    name = ProtocolName.LEACH_E

    def global_view(self, world: World) -> Optional[GlobalView]:
        return GlobalView(total_residual=world.total_residual(), alive_count=world.alive_count())

    def threshold(self, ctx: ElectionContext) -> float:
        return leach_e_threshold(ctx)


class SepProtocol(ElectionProtocol):
    name = ProtocolName.SEP

    def __init__(self, p_opt: float, lam: float, alpha: float):
        super().__init__(p_opt)
        self.lam = lam
        self.alpha = alpha

    def threshold(self, ctx: ElectionContext) -> float:
        return sep_thresholds(ctx, self.lam, self.alpha)


class SepMProtocol(ElectionProtocol):
    name = ProtocolName.SEP_M

    def global_view(self, world: World) -> Optional[GlobalView]:
        alive = world.alive_nodes()
        return GlobalView(
            total_residual=0.0,
            alive_count=len(alive),
            total_initial=math.fsum(n.e_init for n in alive),
        )

    def threshold(self, ctx: ElectionContext) -> float:
        return sep_m_threshold(ctx)


class BeccProtocol(ElectionProtocol):
    name = ProtocolName.BECC

    def threshold(self, ctx: ElectionContext) -> float:
        return becc_threshold(ctx.node_view.q_pol_carry, ctx.p_opt)

    def on_clusters_formed(self, world: World, clusters: Mapping[int, Sequence[int]]) -> None:
        # each head piggybacks the factors on its schedule; members keep them for next round
        for members in clusters.values():
            stats = BeccClusterStats(tuple(world.nodes[i].e_res for i in members))
            for node_id, q in zip(members, becc_polarized_factors(stats)):
                world.nodes[node_id].q_pol_carry = float(q)


def make_protocol(name: ProtocolName, p_opt: float, heterogeneity: HeterogeneitySpec) -> ElectionProtocol:
    name = ProtocolName(name)
    logger.debug(f"Creating {name.value} election protocol with p_opt={p_opt}")
    if name is ProtocolName.LEACH:
        return LeachProtocol(p_opt)
    if name is ProtocolName.LEACH_E:
        return LeachEProtocol(p_opt)
    if name is ProtocolName.SEP:
        if not isinstance(heterogeneity, TwoLevelSpec):
            raise ValueError("SEP is defined for two-level networks only; use sep-m for multi-level energies")
        return SepProtocol(p_opt, heterogeneity.lam, heterogeneity.alpha)
    if name is ProtocolName.SEP_M:
        return SepMProtocol(p_opt)
    return BeccProtocol(p_opt)
