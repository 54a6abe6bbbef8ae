"""MTJ storage-element physics: stochastic switching, pulse selection, write energy.

The switching model is the thermally activated form

    P_sw = 1 - exp(-t_p / tau),   tau = tau_0 * exp(delta * (1 - v_p / v_c0))

which is strictly increasing in both pulse amplitude and duration.  The shipped
defaults are calibrated so that a 310 mV / 4 ns pulse switches with probability
0.7, the single quantitative anchor available for this device.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from scipy.optimize import brentq

__all__ = [
    "MtjParams",
    "PulseSpec",
    "DeviceError",
    "PulseRangeError",
    "default_params",
    "switching_probability",
    "pulse_for_probability",
    "switch_energy",
    "min_energy_pulse",
]

# Calibration anchor: (v_p, t_p) -> P_sw.
ANCHOR_VP = 0.310
ANCHOR_TP = 4e-9
ANCHOR_P = 0.7

DEFAULT_DELTA = 60.0       # typical thermal stability for a PMA junction
DEFAULT_TAU_0 = 1e-9       # attempt time at 0 K

# Default admissible voltage window for pulse solving.
DEFAULT_V_RANGE = (0.05, 1.0)
# Default duration grid, 3..10 ns.
DEFAULT_TP_GRID = tuple(t * 1e-9 for t in range(3, 11))

PROB_TOL = 1e-6


class DeviceError(ValueError):
    """Invalid device parameter or pulse."""


class PulseRangeError(DeviceError):
    """Target probability not attainable within the admissible pulse range."""


@dataclass(frozen=True)
class PulseSpec:
    """A write pulse: amplitude v_p (V) and duration t_p (s)."""

    v_p: float
    t_p: float

    def __post_init__(self):
        if not (self.v_p > 0 and self.t_p > 0):
            raise DeviceError(f"pulse fields must be positive: {self}")


@dataclass(frozen=True)
class MtjParams:
    """Physical parameters of the MTJ element (resistances in ohm, times in s)."""

    r_p: float = 12.7e3
    r_ap: float = 76.3e3
    tmr: float = 5.0
    j_c: float = 1e6          # A/cm^2
    i_c: float = 0.79e-6      # A
    t_switching: float = 1e-9
    delta: float = DEFAULT_DELTA
    v_c0: float = 0.0         # 0 -> calibrate from the anchor in default_params()
    tau_0: float = DEFAULT_TAU_0
    e_max: float = 1e15       # endurance, write cycles

    def __post_init__(self):
        if not (self.r_ap > self.r_p > 0):
            raise DeviceError("require r_ap > r_p > 0")
        derived_tmr = (self.r_ap - self.r_p) / self.r_p
        if abs(derived_tmr - self.tmr) > 0.01 * abs(self.tmr):
            raise DeviceError(
                f"tmr={self.tmr} inconsistent with resistances (derived {derived_tmr:.4f})"
            )
        if not (self.delta > 0 and self.tau_0 > 0 and self.e_max >= 1):
            raise DeviceError("require delta > 0, tau_0 > 0, e_max >= 1")
        if self.v_c0 < 0:
            raise DeviceError("v_c0 must be non-negative")


def calibrate_v_c0(
    delta: float = DEFAULT_DELTA,
    tau_0: float = DEFAULT_TAU_0,
    anchor: tuple[float, float, float] = (ANCHOR_VP, ANCHOR_TP, ANCHOR_P),
) -> float:
    """Critical voltage that puts the P_sw curve through the calibration anchor."""
    v_a, t_a, p_a = anchor
    tau = -t_a / math.log1p(-p_a)
    return v_a / (1.0 - math.log(tau / tau_0) / delta)


def default_params(**overrides) -> MtjParams:
    """Shipped defaults with v_c0 calibrated to the anchor point."""
    p = MtjParams(v_c0=calibrate_v_c0(), **{k: v for k, v in overrides.items() if k != "v_c0"})
    if "v_c0" in overrides:
        p = replace(p, v_c0=overrides["v_c0"])
    return p


def switching_probability(params: MtjParams, pulse: PulseSpec) -> float:
    """Probability that the junction switches under `pulse`; in (0, 1)."""
    if params.v_c0 <= 0:
        raise DeviceError("v_c0 not set; use default_params() or provide a value")
    tau = params.tau_0 * math.exp(params.delta * (1.0 - pulse.v_p / params.v_c0))
    return -math.expm1(-pulse.t_p / tau)


def pulse_for_probability(
    params: MtjParams,
    p_target: float,
    t_p: float,
    v_range: tuple[float, float] = DEFAULT_V_RANGE,
) -> PulseSpec:
    """Solve for the pulse amplitude that yields `p_target` at duration `t_p`.

    Bisection on the monotone P_sw(v_p) curve; the result round-trips through
    switching_probability within 1e-6.
    """
    if not 0.0 < p_target < 1.0:
        raise DeviceError(f"p_target must be in (0, 1), got {p_target}")
    if t_p <= 0:
        raise DeviceError("t_p must be positive")
    v_lo, v_hi = v_range
    if not (0 < v_lo < v_hi):
        raise DeviceError(f"invalid voltage range {v_range}")

    def err(v: float) -> float:
        return switching_probability(params, PulseSpec(v, t_p)) - p_target

    e_lo, e_hi = err(v_lo), err(v_hi)
    if e_lo > 0 or e_hi < 0:
        raise PulseRangeError(
            f"p_target={p_target} not attainable at t_p={t_p} within voltage range {v_range}"
        )
    v = brentq(err, v_lo, v_hi, xtol=1e-12, rtol=8.9e-16)
    return PulseSpec(v, t_p)


def switch_energy(params: MtjParams, pulse: PulseSpec, r_mtj: float | None = None) -> float:
    """Write energy v_p^2 * t_p / R in joules.

    Defaults to r_p: stochastic generation always starts from the preset
    low-resistance state.
    """
    r = params.r_p if r_mtj is None else r_mtj
    if r <= 0:
        raise DeviceError("resistance must be positive")
    return pulse.v_p ** 2 * pulse.t_p / r


def min_energy_pulse(
    params: MtjParams,
    p_target: float,
    t_p_grid: Sequence[float] = DEFAULT_TP_GRID,
    v_range: tuple[float, float] = DEFAULT_V_RANGE,
) -> PulseSpec:
    """Lowest-energy pulse over a duration grid that hits `p_target`.

    Ties break toward the shorter duration.
    """
    if not t_p_grid:
        raise DeviceError("empty duration grid")
    best: tuple[float, float, PulseSpec] | None = None
    for t_p in t_p_grid:
        try:
            pulse = pulse_for_probability(params, p_target, t_p, v_range)
        except PulseRangeError:
            continue
        e = switch_energy(params, pulse)
        key = (e, t_p)
        if best is None or key < best[:2]:
            best = (e, t_p, pulse)
    if best is None:
        raise PulseRangeError(
            f"p_target={p_target} not attainable at any grid duration within {v_range}"
        )
    return best[2]
