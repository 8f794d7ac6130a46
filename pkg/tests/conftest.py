"""
Shared fixtures for the becc-sim test suite
"""

from typing import Callable, Sequence, Tuple

import pytest

from becc_sim.config import ScenarioConfig
from becc_sim.network_world import MultiLevelSpec, Node, Position, TwoLevelSpec, World
from becc_sim.radio_energy import RadioParams


@pytest.fixture
def radio() -> RadioParams:
    """Default first-order radio constants"""
    return RadioParams()


@pytest.fixture
def world_factory() -> Callable[..., World]:
    """Build a hand-placed world: one node per (point, energy) pair"""

    def build(
        points: Sequence[Tuple[float, float]],
        energies: Sequence[float],
        sink: Tuple[float, float] = (0.0, 0.0),
        side: float = 500.0,
    ) -> World:
        nodes = [
            Node(id=i, pos=Position(x, y), e_init=e, e_res=e)
            for i, ((x, y), e) in enumerate(zip(points, energies))
        ]
        return World(nodes=nodes, side=side, sink=Position(*sink))

    return build


@pytest.fixture
def small_multilevel() -> ScenarioConfig:
    """20 nodes with little energy: every run ends within a few hundred rounds"""
    return ScenarioConfig(
        nodes=20,
        side=100.0,
        heterogeneity=MultiLevelSpec(e_min=0.02, e_max=0.1),
        seed=11,
    )


@pytest.fixture
def small_two_level() -> ScenarioConfig:
    return ScenarioConfig(
        nodes=20,
        side=100.0,
        heterogeneity=TwoLevelSpec(e0=0.02, lam=0.2, alpha=3.0),
        seed=3,
    )
