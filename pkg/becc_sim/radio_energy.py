"""
First-order radio dissipation model

Energy accounting for one sensor radio:
- Transmission with a free-space (d^2) amplifier below the crossover distance
  and a multipath (d^4) amplifier at or above it
- Reception at a fixed per-bit circuit cost
- Data aggregation (fusion) at a fixed per-bit, per-signal cost

All quantities are SI: joules, bits, meters. Unit conversion from the
nJ/pJ figures used in configuration happens in `becc_sim.config`.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RadioParams:
    """Radio energy constants, all in joules per bit (amplifiers per m^2 / m^4)"""
    e_elec: float = 50e-9
    eps_fs: float = 10e-12
    eps_mp: float = 0.0013e-12
    e_da: float = 5e-9
    msg_bits: int = 4000

    def __post_init__(self):
        for name in ("e_elec", "eps_fs", "eps_mp", "e_da", "msg_bits"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise ValueError(f"RadioParams.{name} must be finite and positive, got {value!r}")

    @property
    def d0(self) -> float:
        return crossover_distance(self)


def crossover_distance(p: RadioParams) -> float:
    """Distance (m) at which the multipath amplifier takes over."""
    if p.eps_fs <= 0 or p.eps_mp <= 0:
        raise ValueError(f"amplifier coefficients must be positive, got eps_fs={p.eps_fs}, eps_mp={p.eps_mp}")
    return math.sqrt(p.eps_fs / p.eps_mp)


def tx_energy(k: int, d: float, p: RadioParams) -> float:
    """
    Energy (J) to transmit a k-bit message over d meters.

    Uses the free-space term when d < d0 and the multipath term when d >= d0.
    """
    if k <= 0:
        raise ValueError(f"message length must be positive, got k={k}")
    if d < 0:
        raise ValueError(f"distance must be non-negative, got d={d}")
    if d < p.d0:
        return k * p.e_elec + k * p.eps_fs * d * d
    return k * p.e_elec + k * p.eps_mp * d ** 4


def rx_energy(k: int, p: RadioParams) -> float:
    """Energy (J) to receive a k-bit message."""
    if k <= 0:
        raise ValueError(f"message length must be positive, got k={k}")
    return k * p.e_elec


def agg_energy(m: int, k: int, p: RadioParams) -> float:
    """Energy (J) to aggregate m packets of k bits each."""
    if m < 0:
        raise ValueError(f"packet count must be non-negative, got m={m}")
    if k <= 0:
        raise ValueError(f"message length must be positive, got k={k}")
    return m * k * p.e_da
