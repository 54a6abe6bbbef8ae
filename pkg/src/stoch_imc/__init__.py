"""Deterministic simulator for bit-parallel stochastic computing in STT-MRAM.

Layers, bottom up: `mtj` (device physics), `bitstream` (stochastic numbers),
`netlist`/`circuits` (gate-level circuits and builders), `scheduler`
(subarray co-scheduling/mapping), `arch` (bank execution, energy, wear),
`apps` (benchmarks), `reliability` (fault injection and lifetime), `config`
and `cli` (experiment plumbing).
"""

from .mtj import (
    MtjParams,
    PulseSpec,
    DeviceError,
    PulseRangeError,
    default_params,
    switching_probability,
    pulse_for_probability,
    switch_energy,
    min_energy_pulse,
)
from .bitstream import (
    Bitstream,
    RandomSource,
    BtosTable,
    encode_unipolar,
    decode_unipolar,
    mtj_generate,
    build_btos_table,
)
from .netlist import (
    Kind,
    Gate,
    PrimaryInput,
    Netlist,
    NetlistError,
    ParseError,
    CycleError,
    parse_netlist,
    format_netlist,
    lower_to_primitives,
    simulate_functional,
)
from .circuits import (
    CircuitKind,
    build_circuit,
    build_binary_adder,
    simulate_adder,
)
from .scheduler import (
    SubarrayDims,
    Schedule,
    PartitionPlan,
    CapacityError,
    schedule_and_map,
    partition_circuit,
    validate_schedule,
    dump_schedule,
)
from .arch import (
    ArchConfig,
    ExecutionReport,
    ArchError,
    AccumulatorOverflowError,
    execute_plan,
    accumulate_outputs,
    energy_total,
    lifetime_score,
)
from .apps import (
    AppKind,
    ImageGrid,
    LitInput,
    OlInput,
    HdpInput,
    KdeInput,
    AppResult,
    golden_eval,
    stochastic_eval,
    load_inputs,
    synthetic_input,
)
from .reliability import (
    FaultSpec,
    SweepResult,
    inject_bitflips,
    error_sweep,
    lifetime_compare,
)
from .config import ConfigBundle, ConfigError, load_config

__version__ = "0.1.0"
