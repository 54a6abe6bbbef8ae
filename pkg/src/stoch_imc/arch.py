"""Bank-level execution model: [n, m] subarray assignment, cycle and energy
accounting, accumulation, write tracking, and the bit-serial baseline.

Bit-slices of a circuit's bitstreams are spread across subarrays group-first
(one q-row slice per subarray pass); when the bank is too small, the pipeline
policy reuses it over K passes while the parallel-banks policy reports the
bank count that a single pass would need.  Functional results are, by
construction, those of the golden gate-level simulation: the array only
accelerates them, it cannot change them.

Energy follows the closed form

    E_total = BL * E_computation + E_peripheral
    E_computation = N_preset*E_preset + N_SBG*E_SBG + sum_g N_g*E_g

with per-bit-slice counts, broken down into logic / preset / stochastic-init /
peripheral categories.  Every cell touched in a pass takes exactly two writes
(preset, then stochastic generation or logic result), which makes write
conservation an identity: total writes = N_preset + N_SBG + logic ops.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from .bitstream import Bitstream, RandomSource
from .mtj import default_params, min_energy_pulse, switch_energy
from .netlist import Kind, Netlist, simulate_functional
from .scheduler import (
    PartitionPlan,
    Schedule,
    SubarrayDims,
    schedule_and_map,
)

__all__ = [
    "ArchConfig",
    "ExecutionReport",
    "ArchError",
    "AccumulatorOverflowError",
    "execute_plan",
    "accumulate_outputs",
    "energy_total",
    "lifetime_score",
    "default_sbg_energy_aj",
    "DEFAULT_GATE_ENERGY_AJ",
    "E_PRESET_AJ",
]

# Per-operation logic energies in attojoules.  AND/OR are estimates (set equal
# to their inverting counterparts); STATE register writes are costed like a
# BUFF copy.  All overridable through ArchConfig.
DEFAULT_GATE_ENERGY_AJ = {
    Kind.NOT: 30.7,
    Kind.BUFF: 73.8,
    Kind.NAND: 28.7,
    Kind.NOR: 8.4,
    Kind.AND: 28.7,   # estimate: = NAND
    Kind.OR: 8.4,     # estimate: = NOR
    Kind.MAJ3B: 7.6,
    Kind.MAJ5B: 6.3,
    Kind.STATE: 73.8,  # estimate: = BUFF
}
E_PRESET_AJ = 26.1


class ArchError(ValueError):
    pass


class AccumulatorOverflowError(ArchError):
    pass


def default_sbg_energy_aj(params=None) -> float:
    """Energy of one stochastic bit generation: min-energy pulse at p=0.5."""
    if params is None:
        return _default_sbg_energy_aj_cached()
    return switch_energy(params, min_energy_pulse(params, 0.5)) * 1e18


@lru_cache(maxsize=1)
def _default_sbg_energy_aj_cached() -> float:
    params = default_params()
    return switch_energy(params, min_energy_pulse(params, 0.5)) * 1e18


@dataclass
class ArchConfig:
    """Bank geometry, energy table, and execution policy."""

    n: int = 16                    # groups
    m: int = 16                    # subarrays per group
    dims: SubarrayDims = field(default_factory=SubarrayDims)
    bitstream_length: int = 256
    resolution: int = 8
    gate_energy_aj: dict = field(default_factory=lambda: dict(DEFAULT_GATE_ENERGY_AJ))
    e_preset_aj: float = E_PRESET_AJ
    e_sbg_aj: float | None = None          # None -> derive from the device model
    # peripheral placeholders (drivers/BtoS/accumulators are board-level
    # estimates, not device-derived; breakdowns using them are qualitative)
    e_driver_aj: float = 1000.0
    e_btos_aj: float = 500.0
    e_local_acc_aj: float = 50.0
    e_global_acc_aj: float = 100.0
    cycle_time_s: float = 1e-9
    mode: str = "bit-parallel"             # or "bit-serial"
    overflow_policy: str = "pipeline"      # or "parallel-banks"
    square_layout: bool = True
    toggle_only_writes: bool = False
    transfer_cycles: int | None = None     # pass-boundary cost; None -> n + m
    e_max: float = 1e15

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ArchError("n and m must be >= 1")
        if self.square_layout and self.n != self.m:
            raise ArchError(f"square layout requires n == m, got [{self.n}, {self.m}]")
        if self.bitstream_length < 1:
            raise ArchError("bitstream length must be >= 1")
        if self.mode not in ("bit-parallel", "bit-serial"):
            raise ArchError(f"unknown mode {self.mode!r}")
        if self.overflow_policy not in ("pipeline", "parallel-banks"):
            raise ArchError(f"unknown overflow policy {self.overflow_policy!r}")
        for k, v in self.gate_energy_aj.items():
            if v < 0:
                raise ArchError(f"negative energy for {k}")
        for name in ("e_preset_aj", "e_driver_aj", "e_btos_aj",
                     "e_local_acc_aj", "e_global_acc_aj"):
            if getattr(self, name) < 0:
                raise ArchError(f"{name} must be >= 0")
        if self.e_sbg_aj is not None and self.e_sbg_aj < 0:
            raise ArchError("e_sbg_aj must be >= 0")

    @property
    def subarrays(self) -> int:
        return self.n * self.m

    def sbg_energy_aj(self) -> float:
        return default_sbg_energy_aj() if self.e_sbg_aj is None else self.e_sbg_aj

    def transfer_overhead(self) -> int:
        return (self.n + self.m) if self.transfer_cycles is None else self.transfer_cycles


@dataclass
class ExecutionReport:
    mode: str
    q: int
    pass_count: int                  # K
    slices: int
    subarrays_used: int
    required_banks: int
    logic_cycles: int                # per pass, incl. final-gate preset tail
    init_cycles: int                 # per pass
    accumulation_steps: int
    transfer_cycles: int             # total across pass boundaries
    total_cycles: int
    # per-bit-slice op census
    n_preset: int
    n_sbg: int
    gate_counts: dict[Kind, int]
    bitstream_length: int
    energy_aj: dict[str, float] = field(default_factory=dict)
    total_writes: int = 0
    max_per_cell_writes: int = 0
    utilized_cells: int = 0
    per_cell_writes: dict[tuple[int, int, int], int] | None = None
    outputs: dict[str, Bitstream] = field(default_factory=dict)
    binary_outputs: dict[str, int] = field(default_factory=dict)

    @property
    def total_energy_aj(self) -> float:
        return sum(self.energy_aj.values())

    @property
    def total_time_s(self) -> float:
        return self.total_cycles  # scaled by cycle_time at serialization sites

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "q": self.q,
            "pass_count": self.pass_count,
            "slices": self.slices,
            "subarrays_used": self.subarrays_used,
            "required_banks": self.required_banks,
            "logic_cycles": self.logic_cycles,
            "init_cycles": self.init_cycles,
            "accumulation_steps": self.accumulation_steps,
            "transfer_cycles": self.transfer_cycles,
            "total_cycles": self.total_cycles,
            "bitstream_length": self.bitstream_length,
            "census": {
                "n_preset": self.n_preset,
                "n_sbg": self.n_sbg,
                "gates": {k.value: v for k, v in sorted(
                    self.gate_counts.items(), key=lambda kv: kv[0].value)},
            },
            "energy_aj": dict(sorted(self.energy_aj.items())),
            "total_energy_aj": self.total_energy_aj,
            "writes": {
                "total": self.total_writes,
                "max_per_cell": self.max_per_cell_writes,
                "utilized_cells": self.utilized_cells,
            },
            "binary_outputs": dict(sorted(self.binary_outputs.items())),
            "decoded_outputs": {
                net: bs.value() for net, bs in sorted(self.outputs.items())
            },
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=False)

    CSV_FIELDS = (
        "mode", "q", "pass_count", "total_cycles", "total_energy_aj",
        "total_writes", "max_per_cell_writes", "utilized_cells",
    )

    def to_csv_row(self) -> dict:
        return {f: (self.total_energy_aj if f == "total_energy_aj" else getattr(self, f))
                for f in self.CSV_FIELDS}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(self.CSV_FIELDS))
        w.writeheader()
        row = {f: (self.total_energy_aj if f == "total_energy_aj" else getattr(self, f))
               for f in self.CSV_FIELDS}
        w.writerow(row)
        return buf.getvalue()

    def write_heatmap(self, dims: SubarrayDims, subarray: int = 0) -> np.ndarray:
        """Per-cell write counts of one subarray as a rows x cols matrix."""
        if self.per_cell_writes is None:
            raise ArchError("per-cell write map was not collected")
        mat = np.zeros((dims.rows, dims.cols), dtype=np.int64)
        for (sa, row, col), count in self.per_cell_writes.items():
            if sa == subarray:
                mat[row - 1, col - 1] = count
        return mat


# -- execution ---------------------------------------------------------------

def execute_plan(
    plan: PartitionPlan,
    inputs: Mapping[str, Bitstream],
    config: ArchConfig,
    source: RandomSource | None = None,
    track_cells: bool = True,
    schedules: list[Schedule] | None = None,
) -> ExecutionReport:
    """Run a partition plan on the configured bank.

    Values come from the golden gate-level simulation; the report adds the
    array's cycle, energy, and wear costs.  With `track_cells` a full
    (subarray,row,col) -> write-count map is collected; otherwise only the
    aggregate wear metrics (exact for single-part plans) are reported.
    """
    bl = config.bitstream_length
    if plan.bitstream_length != bl:
        raise ArchError(
            f"plan built for BL={plan.bitstream_length}, config has BL={bl}"
        )
    serial = config.mode == "bit-serial"
    q = 1 if serial else plan.q
    if schedules is None:
        schedules = [schedule_and_map(part, config.dims, q=q)
                     for part, _ in plan.parts]
    elif len(schedules) != len(plan.parts):
        raise ArchError("schedule list does not match plan parts")
    for s in schedules:
        if s.dims != config.dims:
            raise ArchError(f"schedule dims {s.dims} != config dims {config.dims}")

    # functional outputs (shared source so constants are identical per net)
    outputs: dict[str, Bitstream] = {}
    all_values: list[dict[str, Bitstream]] = []
    for part, _ in plan.parts:
        vals = simulate_functional(part, _bind(part, inputs), source,
                                   return_all=True)
        all_values.append(vals)
        for net in part.pos:
            outputs[net] = vals[net]

    # per-bit-slice census
    n_preset = n_sbg = 0
    gate_counts: dict[Kind, int] = {}
    for (part, _), sched in zip(plan.parts, schedules):
        ops = len(part.gates) + len(sched.copy_ops)
        n_preset += sched.p + ops
        n_sbg += sched.p
        for g in part.gates:
            gate_counts[g.kind] = gate_counts.get(g.kind, 0) + 1
        if sched.copy_ops:
            gate_counts[Kind.BUFF] = gate_counts.get(Kind.BUFF, 0) + len(sched.copy_ops)

    # cycles
    slices = -(-bl // q)
    logic = sum(s.logic_cycles + 1 for s in schedules)  # +1: final preset tail
    init = sum(s.init_cycles for s in schedules)
    acc = config.n + config.m
    if serial:
        k, banks = bl, 1
        transfer_total = 0
        total = bl * (init + logic) + acc
        subarrays_used = 1
    elif config.overflow_policy == "parallel-banks":
        k = 1
        banks = -(-slices // config.subarrays)
        transfer_total = 0
        total = init + logic + acc
        subarrays_used = min(slices, config.subarrays)
    else:
        k = -(-slices // config.subarrays)
        banks = 1
        transfer_total = (k - 1) * config.transfer_overhead()
        total = k * (init + logic) + acc + transfer_total
        subarrays_used = min(slices, config.subarrays)

    report = ExecutionReport(
        mode=config.mode,
        q=q,
        pass_count=k,
        slices=slices,
        subarrays_used=subarrays_used,
        required_banks=banks,
        logic_cycles=logic,
        init_cycles=init,
        accumulation_steps=acc,
        transfer_cycles=transfer_total,
        total_cycles=total,
        n_preset=n_preset,
        n_sbg=n_sbg,
        gate_counts=gate_counts,
        bitstream_length=bl,
        outputs=outputs,
    )
    _count_writes(report, plan, schedules, all_values, config, track_cells)
    report.energy_aj = energy_total(report, config)
    report.binary_outputs, _ = accumulate_outputs(report, config)
    return report


def _bind(part: Netlist, inputs: Mapping[str, Bitstream]) -> dict[str, Bitstream]:
    bound = {}
    for pi in part.pis:
        if pi.net in inputs:
            bound[pi.net] = inputs[pi.net]
    return bound


def _count_writes(report, plan, schedules, all_values, config, track_cells):
    bl = config.bitstream_length
    toggle = config.toggle_only_writes
    q = report.q
    slices = report.slices
    serial = config.mode == "bit-serial"

    if toggle:
        # preset always counted; the value write only when it flips the cell
        # out of the preset (0) state, i.e. per 1-bit.
        ones = sum(int(bs.bits.sum()) for vals in all_values for bs in vals.values())
        per_bit_cells = report.n_preset  # == p + ops per bit
        report.total_writes = bl * per_bit_cells + ones
    else:
        report.total_writes = bl * (report.n_preset + report.n_sbg
                                    + sum(report.gate_counts.values()))

    if track_cells:
        cells: dict[tuple[int, int, int], int] = {}
        for (part, _), sched, vals in zip(plan.parts, schedules, all_values):
            placements = sched.placements
            for s in range(slices):
                sa = 0 if serial else s % config.subarrays
                lo = s * q
                active = min(q, bl - lo)
                for pl in placements:
                    bits = vals[pl.net].bits if toggle else None
                    for r in range(active):
                        key = (sa, pl.row + (0 if serial else r), pl.col)
                        w = 1 + (int(bits[lo + r]) if toggle else 1)
                        cells[key] = cells.get(key, 0) + w
            # copy destinations are placements too (copied nets relocate), and
            # copy sources were already written; nothing extra to add.
        report.per_cell_writes = cells
        report.utilized_cells = len(cells)
        report.max_per_cell_writes = max(cells.values(), default=0)
        if not toggle:
            assert sum(cells.values()) == report.total_writes
    else:
        # closed-form aggregates; exact for single-part plans
        cells_per_slice = sum(len(s.placements) for s in schedules)
        if serial:
            report.utilized_cells = cells_per_slice
            report.max_per_cell_writes = 2 * bl
        else:
            report.utilized_cells = cells_per_slice * min(q, bl) * min(
                slices, config.subarrays)
            report.max_per_cell_writes = 2 * -(-slices // config.subarrays)
        if toggle:
            report.max_per_cell_writes = None  # not defined without the map


# -- accumulation ------------------------------------------------------------

def accumulate_outputs(report: ExecutionReport, config: ArchConfig):
    """Ones-count each output via the local-then-global accumulator tree.

    Takes n + m steps.  Local registers are floor(log2 m)+1 bits, the global
    one floor(log2 nm)+1, both widened by ceil(log2 q) when a subarray
    contributes q bits per step; a per-pass ones count beyond the global
    capacity is an overflow.
    """
    steps = config.n + config.m
    width = math.floor(math.log2(config.subarrays)) + 1
    if report.q > 1:
        width += math.ceil(math.log2(report.q))
    capacity = 2 ** width - 1
    bits_per_pass = report.q * min(report.slices, config.subarrays)
    binary: dict[str, int] = {}
    for net, bs in report.outputs.items():
        total = int(bs.bits.sum())
        for start in range(0, len(bs), max(bits_per_pass, 1)):
            pass_ones = int(bs.bits[start:start + bits_per_pass].sum())
            if pass_ones > capacity:
                raise AccumulatorOverflowError(
                    f"{pass_ones} ones in one pass of net {net} exceed the "
                    f"{width}-bit global register"
                )
        binary[net] = total
    return binary, steps


# -- energy ------------------------------------------------------------------

def energy_total(report: ExecutionReport, config: ArchConfig) -> dict[str, float]:
    """Four-way energy breakdown (aJ): logic, preset, init (stochastic
    generation), peripheral."""
    e_sbg = config.sbg_energy_aj()
    logic = 0.0
    for kind, count in report.gate_counts.items():
        if kind not in config.gate_energy_aj:
            raise ArchError(f"no energy entry for gate kind {kind.value}")
        logic += count * config.gate_energy_aj[kind]
    bl = report.bitstream_length
    breakdown = {
        "logic": bl * logic,
        "preset": bl * report.n_preset * config.e_preset_aj,
        "init": bl * report.n_sbg * e_sbg,
        "peripheral": (
            report.subarrays_used * report.pass_count * config.e_driver_aj
            + report.n_sbg * config.e_btos_aj
            + config.subarrays * config.e_local_acc_aj
            + config.n * config.e_global_acc_aj
        ),
    }
    return breakdown


# -- lifetime ----------------------------------------------------------------

def lifetime_score(report: ExecutionReport, e_max: float | None = None):
    """(endurance * utilized cells / total writes, max single-cell writes).

    The second value is a wear-concentration metric beyond the proportional
    score.
    """
    if report.total_writes <= 0:
        raise ArchError("lifetime undefined: report counts zero writes")
    e = 1e15 if e_max is None else e_max
    score = e * report.utilized_cells / report.total_writes
    return score, report.max_per_cell_writes
