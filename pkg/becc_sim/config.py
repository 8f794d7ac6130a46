"""
Scenario configuration

Validated run configuration with three layers, later ones winning:
- Built-in defaults (first-order radio constants, 200 nodes on a 500 m square)
- A TOML config file (`key = value` with [field], [heterogeneity], [radio], [sweep])
- Command-line flags and environment variables (BECC_OUT_DIR, BECC_WORKERS, BECC_LOG_LEVEL)

Radio constants are entered in nJ / pJ and converted to joules once, in
`RadioConfig.to_params()`.
"""

import json
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .election_protocols import ProtocolName
from .network_world import MultiLevelSpec, Position, TwoLevelSpec, sink_position
from .radio_energy import RadioParams
from .rng import MAX_SEED

logger = logging.getLogger(__name__)

NANO = 1e-9
PICO = 1e-12

DEFAULT_OUT_DIR = "results"

HeterogeneityField = Annotated[Union[TwoLevelSpec, MultiLevelSpec], Field(discriminator="variant")]


class RadioConfig(BaseModel):
    """Radio constants in the units they are usually published in"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    e_elec_nj: float = Field(default=50.0, gt=0)
    e_da_nj: float = Field(default=5.0, gt=0)
    eps_fs_pj: float = Field(default=10.0, gt=0)
    eps_mp_pj: float = Field(default=0.0013, gt=0)
    msg_bits: int = Field(default=4000, gt=0)

    def to_params(self) -> RadioParams:
        return RadioParams(
            e_elec=self.e_elec_nj * NANO,
            eps_fs=self.eps_fs_pj * PICO,
            eps_mp=self.eps_mp_pj * PICO,
            e_da=self.e_da_nj * NANO,
            msg_bits=self.msg_bits,
        )


class ScenarioConfig(BaseModel):
    """Everything that determines one simulation run"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    nodes: int = Field(default=200, gt=0)
    side: float = Field(default=500.0, gt=0)
    sink: Optional[Tuple[float, float]] = None
    heterogeneity: HeterogeneityField = MultiLevelSpec()
    protocol: ProtocolName = ProtocolName.BECC
    p_opt: float = Field(default=0.05, gt=0, lt=1)
    radio: RadioConfig = RadioConfig()
    rounds: Optional[int] = Field(default=None, ge=0)
    seed: int = Field(default=1, ge=0, le=MAX_SEED)
    replicates: int = Field(default=20, gt=0)
    stop_on_first_death: bool = False

    @model_validator(mode="after")
    def _cross_checks(self) -> "ScenarioConfig":
        spec = self.heterogeneity
        if self.protocol is ProtocolName.SEP and not isinstance(spec, TwoLevelSpec):
            raise ValueError("protocol 'sep' needs a two-level heterogeneity spec; use 'sep-m' for multi-level")
        if isinstance(spec, TwoLevelSpec):
            k = spec.advanced_count(self.nodes)
            if not 0 < k < self.nodes:
                raise ValueError(
                    f"lam={spec.lam} with {self.nodes} nodes gives {k} advanced nodes; need 0 < k < {self.nodes}"
                )
        else:
            spec.check_total(self.nodes)
        if self.sink is not None:
            x, y = self.sink
            if not (0 <= x <= self.side and 0 <= y <= self.side):
                raise ValueError(f"sink {self.sink} lies outside the {self.side} m field")
        return self

    def sink_position(self) -> Position:
        if self.sink is None:
            return sink_position(self.side)
        return Position(*self.sink)

    def with_overrides(self, **changes: Any) -> "ScenarioConfig":
        """Copy with fields replaced, re-running every validator."""
        data = self.model_dump()
        for key, value in changes.items():
            data[key] = value.model_dump() if isinstance(value, BaseModel) else value
        return ScenarioConfig.model_validate(data)

    def echo(self) -> str:
        """Resolved configuration as compact, key-sorted JSON."""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def _default_grid(start: float, stop: float, step: float) -> List[float]:
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 10) for i in range(count)]


class SweepConfig(BaseModel):
    """Grids and fixed values for the two-level stability sweeps"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    lambdas: List[float] = Field(default_factory=lambda: _default_grid(0.1, 0.9, 0.1))
    alphas: List[float] = Field(default_factory=lambda: _default_grid(0.5, 4.5, 0.5))
    fixed_alpha: float = Field(default=3.0, ge=0)
    fixed_lambda: float = Field(default=0.2, gt=0, lt=1)
    workers: int = Field(default=1, ge=1)

    @field_validator("lambdas")
    @classmethod
    def _check_lambdas(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("lambda grid is empty")
        for lam in values:
            if not 0 < lam < 1:
                raise ValueError(f"lambda values must lie in (0, 1), got {lam}")
        return values

    @field_validator("alphas")
    @classmethod
    def _check_alphas(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("alpha grid is empty")
        for alpha in values:
            if alpha < 0:
                raise ValueError(f"alpha values must be non-negative, got {alpha}")
        return values


def load_config(path: Union[str, Path, None] = None) -> Tuple[ScenarioConfig, SweepConfig]:
    """
    Read a TOML config file; with no path, return the defaults.

    Top-level keys and the [field] section feed ScenarioConfig, [sweep] feeds
    SweepConfig. Unknown keys are rejected.
    """
    if path is None:
        return ScenarioConfig(), SweepConfig()
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data: Dict[str, Any] = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ValueError(f"{path}: invalid TOML: {e}") from e
    field_section = data.pop("field", {})
    sweep_section = data.pop("sweep", {})
    overlap = set(field_section) & set(data)
    if overlap:
        raise ValueError(f"{path}: keys given both at top level and in [field]: {sorted(overlap)}")
    scenario = ScenarioConfig.model_validate({**data, **field_section})
    sweep = SweepConfig.model_validate(sweep_section)
    logger.info(f"Loaded config from {path}")
    return scenario, sweep


@dataclass(frozen=True)
class EnvSettings:
    """Process-level settings taken from the environment (.env supported)"""
    out_dir: Path
    workers: Optional[int] = None
    log_level: Optional[str] = None


def load_environment() -> EnvSettings:
    load_dotenv()
    workers = os.getenv("BECC_WORKERS")
    if workers is not None:
        try:
            workers = int(workers)
        except ValueError:
            raise ValueError(f"BECC_WORKERS must be an integer, got {workers!r}") from None
        if workers < 1:
            raise ValueError(f"BECC_WORKERS must be at least 1, got {workers}")
    return EnvSettings(
        out_dir=Path(os.getenv("BECC_OUT_DIR", DEFAULT_OUT_DIR)),
        workers=workers,
        log_level=os.getenv("BECC_LOG_LEVEL"),
    )
