"""Co-scheduling and mapping of netlists onto a 2T-1MTJ subarray.

The general path follows the layer-by-layer heuristic: primary inputs map
vertically (q rows per column), each layer's gates are partitioned into
subsets of identical kind without shared fan-in, subsets are ordered by
descending mean distance-to-output, row-misaligned second inputs are fixed by
one-cycle BUFF copies, and input-column-aligned sub-subsets each consume one
cycle.  Gates operating on nets in different row blocks (stacked circuit
instances) are what the subset machinery parallelizes; a single instance
serializes gate by gate.

Ripple-carry adders carry metadata and take a dedicated path that reproduces
the alternating carry/transfer flow with batched duplicate and sum cycles,
costing 2*(n-1)+3 logic cycles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netlist import ARITY, Gate, Kind, Netlist, NetlistError, topo_layers

__all__ = [
    "SubarrayDims",
    "Placement",
    "ScheduledOp",
    "CopyOp",
    "Schedule",
    "PartitionPlan",
    "CapacityError",
    "UnschedulableError",
    "schedule_and_map",
    "partition_circuit",
    "replicate_netlist",
    "validate_schedule",
    "dump_schedule",
]


class CapacityError(NetlistError):
    def __init__(self, message, needed_rows=None, needed_cols=None, dims=None):
        super().__init__(message)
        self.needed_rows = needed_rows
        self.needed_cols = needed_cols
        self.dims = dims


class UnschedulableError(NetlistError):
    pass


@dataclass(frozen=True)
class SubarrayDims:
    rows: int = 256
    cols: int = 256

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise NetlistError("subarray dimensions must be >= 1")


@dataclass(frozen=True)
class Placement:
    """Location of a net: first row of its block and its column (1-based)."""

    net: str
    row: int
    col: int


@dataclass(frozen=True)
class CopyOp:
    cycle: int
    src: Placement
    dst: Placement


@dataclass(frozen=True)
class ScheduledOp:
    cycle: int
    kind: Kind
    gate_ids: tuple[int, ...]
    in_cols: tuple[int, ...]
    out_col: int
    rows: tuple[int, ...]  # first row of each participating block


@dataclass
class Schedule:
    cycle_of_gate: dict[int, int]
    placements: list[Placement]
    copy_ops: list[CopyOp]
    ops: list[ScheduledOp]
    logic_cycles: int
    init_cycles: int
    q: int
    p: int                     # primary-input column count
    dims: SubarrayDims
    rows_per_block: int = 1
    state_cone_cycles: int = 0

    def placement_of(self, net: str) -> Placement:
        for pl in self.placements:
            if pl.net == net:
                return pl
        raise KeyError(net)


INIT_CYCLES_PER_PI_COLUMN = 2  # preset + stochastic write, column-parallel


# -- general path -----------------------------------------------------------

def schedule_and_map(
    nl: Netlist,
    dims: SubarrayDims = SubarrayDims(),
    q: int = 256,
    pi_row_block: dict[str, int] | None = None,
    column_group: dict[str, str] | None = None,
    batch_copies: bool = False,
) -> Schedule:
    """Schedule and map `nl` onto one subarray with q-row primary inputs.

    `pi_row_block` assigns primary inputs to stacked instance blocks (block j
    occupies rows j*q+1 .. (j+1)*q); `column_group` lets equally-named inputs
    of different blocks share one column.  `batch_copies` merges copy
    operations with identical column pairs across blocks into one cycle.
    """
    if nl.carry_chain is not None:
        return _schedule_adder(nl, dims)
    if not nl.is_primitive():
        raise UnschedulableError("lower composite gates before scheduling")
    for g in nl.gates:
        if ARITY[g.kind] > 2 and g.kind is not Kind.STATE:
            raise UnschedulableError(
                f"gate {g.id}: {g.kind.value} exceeds the two-input limit of the "
                "mapping heuristic"
            )
    if q < 1:
        raise NetlistError("q must be >= 1")

    pi_row_block = pi_row_block or {}
    column_group = column_group or {}
    blocks = sorted({0} | set(pi_row_block.values()))
    n_blocks = max(blocks) + 1
    if n_blocks * q > dims.rows:
        raise CapacityError(
            f"need {n_blocks * q} rows, subarray has {dims.rows}",
            needed_rows=n_blocks * q, dims=dims,
        )

    def block_row(block: int) -> int:
        return block * q + 1

    # -- primary input mapping (vertical layout, one column per group)
    col_of_group: dict[str, int] = {}
    net_place: dict[str, tuple[int, int]] = {}  # net -> (block, col)
    count = 1
    for pi in nl.pis:
        key = column_group.get(pi.net, pi.net)
        if key not in col_of_group:
            col_of_group[key] = count
            count += 1
        net_place[pi.net] = (pi_row_block.get(pi.net, 0), col_of_group[key])
    p = count - 1

    next_free = {b: p + 1 for b in range(n_blocks)}

    # STATE registers hold a net; give each a column before logic starts.
    state_gates = [g for g in nl.gates if g.kind is Kind.STATE]
    for g in state_gates:
        b = _gate_block(g, net_place, for_state=True)
        net_place[g.output] = (b, next_free[b])
        next_free[b] += 1

    ordered, depth, layer, inv = topo_layers(nl)
    by_layer: dict[int, list[Gate]] = {}
    for g in ordered:
        by_layer.setdefault(layer[g.id], []).append(g)

    cycle = 0
    cycle_of_gate: dict[int, int] = {}
    copy_ops: list[CopyOp] = []
    ops: list[ScheduledOp] = []

    def alloc(block: int) -> int:
        col = next_free[block]
        if col > dims.cols:
            raise CapacityError(
                f"column demand exceeds subarray width {dims.cols}",
                needed_cols=col, dims=dims,
            )
        next_free[block] = col + 1
        return col

    for li in range(1, depth + 1):
        subsets = _make_subsets(by_layer.get(li, []))
        subsets.sort(key=lambda s: (-_mean_inv(s, inv), min(g.id for g in s)))
        for subset in subsets:
            # effective input placement per gate, fixing row misalignment
            eff_in: dict[int, list[tuple[int, int]]] = {}
            for g in subset:
                places = [net_place[n] for n in g.inputs]
                if len(places) == 2 and places[0][0] != places[1][0]:
                    dst_block = places[0][0]
                    new_col = alloc(dst_block)
                    src_b, src_c = places[1]
                    cycle += 1
                    copy_ops.append(CopyOp(
                        cycle=cycle,
                        src=Placement(g.inputs[1], block_row(src_b), src_c),
                        dst=Placement(g.inputs[1], block_row(dst_block), new_col),
                    ))
                    places[1] = (dst_block, new_col)
                eff_in[g.id] = places
            if batch_copies:
                copy_ops, cycle = _rebatch_copies(copy_ops, cycle, cycle_of_gate)
            # input-column-aligned sub-subsets, one cycle each
            groups: dict[tuple[int, ...], list[Gate]] = {}
            for g in subset:
                key = tuple(sorted(c for _, c in eff_in[g.id]))
                groups.setdefault(key, []).append(g)
            for key in sorted(groups):
                members = groups[key]
                cycle += 1
                out_col = max(next_free[eff_in[g.id][0][0]] for g in members)
                if out_col > dims.cols:
                    raise CapacityError(
                        f"column demand exceeds subarray width {dims.cols}",
                        needed_cols=out_col, dims=dims,
                    )
                rows = []
                for g in members:
                    b = eff_in[g.id][0][0]
                    net_place[g.output] = (b, out_col)
                    next_free[b] = out_col + 1
                    cycle_of_gate[g.id] = cycle
                    rows.append(block_row(b))
                ops.append(ScheduledOp(
                    cycle=cycle, kind=members[0].kind,
                    gate_ids=tuple(g.id for g in members),
                    in_cols=key, out_col=out_col, rows=tuple(rows),
                ))

    # Feedback cones execute row by row: expand their cycles q-fold.
    cone = _feedback_cone(nl)
    cone_cycles = sorted({cycle_of_gate[g.id] for g in nl.gates if g.id in cone})
    logic_cycles = cycle
    if cone_cycles and q > 1:
        remap = _expand_cycles(cone_cycles, cycle, q)
        cycle_of_gate = {gid: remap[c] for gid, c in cycle_of_gate.items()}
        copy_ops = [CopyOp(remap[c.cycle], c.src, c.dst) for c in copy_ops]
        ops = [ScheduledOp(remap[o.cycle], o.kind, o.gate_ids, o.in_cols,
                           o.out_col, o.rows) for o in ops]
        logic_cycles = cycle + (q - 1) * len(cone_cycles)

    placements = [
        Placement(net, block_row(b), c) for net, (b, c) in sorted(net_place.items())
    ]
    return Schedule(
        cycle_of_gate=cycle_of_gate,
        placements=placements,
        copy_ops=copy_ops,
        ops=ops,
        logic_cycles=logic_cycles,
        init_cycles=INIT_CYCLES_PER_PI_COLUMN * p,
        q=q,
        p=p,
        dims=dims,
        rows_per_block=q,
        state_cone_cycles=len(cone_cycles),
    )


def _gate_block(g: Gate, net_place, for_state=False) -> int:
    for net in g.inputs:
        if net in net_place:
            return net_place[net][0]
    return 0


def _make_subsets(gates: list[Gate]) -> list[list[Gate]]:
    """Greedy partition: identical kind, no shared fan-in net."""
    subsets: list[list[Gate]] = []
    for g in sorted(gates, key=lambda g: g.id):
        placed = False
        for s in subsets:
            if s[0].kind is not g.kind:
                continue
            if any(set(g.inputs) & set(h.inputs) for h in s):
                continue
            s.append(g)
            placed = True
            break
        if not placed:
            subsets.append([g])
    return subsets


def _mean_inv(subset: list[Gate], inv: dict[int, int]) -> float:
    return sum(inv[g.id] for g in subset) / len(subset)


def _rebatch_copies(copy_ops, cycle, cycle_of_gate):
    # Merge trailing copies with identical (src col, dst col) pairs into the
    # same cycle; only meaningful for sensitivity studies.
    if len(copy_ops) < 2:
        return copy_ops, cycle
    merged: list[CopyOp] = []
    seen: dict[tuple[int, int], int] = {}
    shift = 0
    for op in copy_ops:
        key = (op.src.col, op.dst.col)
        if key in seen:
            shift += 1
            merged.append(CopyOp(seen[key], op.src, op.dst))
        else:
            seen[key] = op.cycle - shift
            merged.append(CopyOp(op.cycle - shift, op.src, op.dst))
    return merged, cycle - shift


def _feedback_cone(nl: Netlist) -> set[int]:
    """Gates both reachable from a STATE output and reaching a STATE input."""
    state_gates = [g for g in nl.gates if g.kind is Kind.STATE]
    if not state_gates:
        return set()
    consumers: dict[str, list[Gate]] = {}
    driver = {g.output: g for g in nl.gates}
    for g in nl.gates:
        for net in g.inputs:
            consumers.setdefault(net, []).append(g)

    fwd: set[int] = set()
    stack = [c for sg in state_gates for c in consumers.get(sg.output, [])]
    while stack:
        g = stack.pop()
        if g.id in fwd or g.kind is Kind.STATE:
            continue
        fwd.add(g.id)
        stack.extend(consumers.get(g.output, []))

    back: set[int] = set()
    stack2 = [driver[sg.inputs[0]] for sg in state_gates if sg.inputs[0] in driver]
    while stack2:
        g = stack2.pop()
        if g.id in back or g.kind is Kind.STATE:
            continue
        back.add(g.id)
        for net in g.inputs:
            if net in driver:
                stack2.append(driver[net])
    return fwd & back


def _expand_cycles(cone_cycles: list[int], total: int, q: int) -> dict[int, int]:
    """Remap cycle numbers so each cone cycle occupies q consecutive slots."""
    remap = {}
    cone_set = set(cone_cycles)
    offset = 0
    for c in range(1, total + 1):
        if c in cone_set:
            offset += q - 1
        remap[c] = c + offset  # cone cycle maps to the last of its q slots
    return remap


# -- ripple-carry path ------------------------------------------------------

ADDER_COLS = {"na": 1, "nb": 2, "ncin": 3, "k": 4, "d": 5, "s": 6}


def _schedule_adder(nl: Netlist, dims: SubarrayDims) -> Schedule:
    cc = nl.carry_chain
    n = cc.n_bits
    if n > dims.rows or dims.cols < 6:
        raise CapacityError(
            f"{n}-bit adder needs {n} rows x 6 cols, subarray is "
            f"{dims.rows}x{dims.cols}",
            needed_rows=n, needed_cols=6, dims=dims,
        )

    def place(net: str) -> Placement:
        for prefix, col in ADDER_COLS.items():
            if net.startswith(prefix) and net[len(prefix):].isdigit():
                idx = int(net[len(prefix):])
                row = idx if prefix == "ncin" else idx
                return Placement(net, row + 1, col)
        raise NetlistError(f"unrecognized adder net {net}")

    gate = {g.id: g for g in nl.gates}
    cycle_of_gate: dict[int, int] = {}
    ops: list[ScheduledOp] = []
    cycle = 0
    for i in range(n):
        cycle += 1
        g = gate[cc.carry_gates[i]]
        cycle_of_gate[g.id] = cycle
        ops.append(ScheduledOp(cycle, Kind.MAJ3B, (g.id,),
                               (1, 2, 3), ADDER_COLS["k"], (i + 1,)))
        if i < n - 1:
            cycle += 1
            t = gate[cc.transfer_gates[i]]
            cycle_of_gate[t.id] = cycle
            ops.append(ScheduledOp(cycle, Kind.NOT, (t.id,),
                                   (ADDER_COLS["k"],), ADDER_COLS["ncin"], (i + 1,)))
    cycle += 1
    ops.append(ScheduledOp(cycle, Kind.BUFF, tuple(cc.copy_gates),
                           (ADDER_COLS["k"],), ADDER_COLS["d"],
                           tuple(range(1, n + 1))))
    for gid in cc.copy_gates:
        cycle_of_gate[gid] = cycle
    cycle += 1
    ops.append(ScheduledOp(cycle, Kind.MAJ5B, tuple(cc.sum_gates),
                           (1, 2, 3, 4, 5), ADDER_COLS["s"],
                           tuple(range(1, n + 1))))
    for gid in cc.sum_gates:
        cycle_of_gate[gid] = cycle

    placements = [place(pi.net) for pi in nl.pis]
    placements += [place(g.output) for g in nl.gates]
    return Schedule(
        cycle_of_gate=cycle_of_gate,
        placements=placements,
        copy_ops=[],
        ops=ops,
        logic_cycles=cycle,           # 2*(n-1) + 3
        init_cycles=INIT_CYCLES_PER_PI_COLUMN * 3,
        q=1,
        p=3,
        dims=dims,
        rows_per_block=1,
    )


# -- partitioning -----------------------------------------------------------

@dataclass
class PartitionPlan:
    parts: list[tuple[Netlist, int]]   # (sub-netlist, q)
    pass_count: int
    bitstream_length: int

    @property
    def q(self) -> int:
        return self.parts[0][1]


def partition_circuit(
    nl: Netlist,
    dims: SubarrayDims = SubarrayDims(),
    bitstream_length: int = 256,
    q_override: int | None = None,
) -> PartitionPlan:
    """Choose the largest fitting q (or honor an override) and split by PO
    cones when even q=1 cannot fit."""
    if bitstream_length < 1:
        raise NetlistError("bitstream length must be >= 1")
    if dims.cols < 3:
        raise UnschedulableError(
            f"subarray of width {dims.cols} cannot hold a single two-input gate"
        )
    if nl.carry_chain is not None:
        schedule_and_map(nl, dims)  # capacity check
        return PartitionPlan([(nl, 1)], pass_count=1,
                             bitstream_length=bitstream_length)

    def fits(sub: Netlist) -> bool:
        try:
            schedule_and_map(sub, dims, q=1)
            return True
        except CapacityError:
            return False

    if fits(nl):
        q = q_override if q_override else min(dims.rows, bitstream_length)
        if q > dims.rows:
            raise CapacityError(f"q={q} exceeds {dims.rows} rows", dims=dims)
        k = -(-bitstream_length // q)
        return PartitionPlan([(nl, q)], pass_count=k,
                             bitstream_length=bitstream_length)

    # split along PO cones, greedily packing POs while the union still fits
    parts: list[Netlist] = []
    current: list[str] = []
    for po in nl.pos:
        candidate = _po_cone(nl, current + [po])
        if current and not fits(candidate):
            parts.append(_po_cone(nl, current))
            current = [po]
        else:
            current = current + [po]
    if current:
        last = _po_cone(nl, current)
        if not fits(last):
            raise CapacityError(
                "a single output cone exceeds the subarray", dims=dims
            )
        parts.append(last)
    for part in parts:
        if not fits(part):
            raise CapacityError("partition does not fit the subarray", dims=dims)
    q = q_override if q_override else min(dims.rows, bitstream_length)
    k = -(-bitstream_length // q)
    return PartitionPlan([(part, q) for part in parts], pass_count=k,
                         bitstream_length=bitstream_length)


def _po_cone(nl: Netlist, pos: list[str]) -> Netlist:
    driver = {g.output: g for g in nl.gates}
    keep: dict[int, Gate] = {}
    nets: set[str] = set()
    stack = list(pos)
    while stack:
        net = stack.pop()
        if net in nets:
            continue
        nets.add(net)
        g = driver.get(net)
        if g is not None and g.id not in keep:
            keep[g.id] = g
            stack.extend(g.inputs)
    pis = [pi for pi in nl.pis if pi.net in nets]
    gates = [g for g in nl.gates if g.id in keep]
    return Netlist(gates=gates, pis=pis, pos=list(pos))


# -- replication ------------------------------------------------------------

def replicate_netlist(nl: Netlist, count: int):
    """Stack `count` instances of `nl` into one netlist with per-instance row
    blocks and shared columns.

    Returns (netlist, pi_row_block, column_group); instance j's nets carry an
    ``i<j>:`` prefix.
    """
    if count < 1:
        raise NetlistError("instance count must be >= 1")
    gates: list[Gate] = []
    pis = []
    pos: list[str] = []
    pi_row_block: dict[str, int] = {}
    column_group: dict[str, str] = {}
    gid = 1
    from .netlist import PrimaryInput
    for j in range(count):
        def rn(net: str, j=j) -> str:
            return f"i{j}:{net}"
        for pi in nl.pis:
            new = PrimaryInput(rn(pi.net), lineage=pi.lineage and f"i{j}:{pi.lineage}",
                               const_p=pi.const_p)
            pis.append(new)
            pi_row_block[new.net] = j
            column_group[new.net] = pi.net
        for g in nl.gates:
            gates.append(Gate(gid, g.kind, tuple(rn(n) for n in g.inputs), rn(g.output)))
            gid += 1
        pos.extend(rn(net) for net in nl.pos)
    return (
        Netlist(gates=gates, pis=pis, pos=pos),
        pi_row_block,
        column_group,
    )


# -- checking and dumping ---------------------------------------------------

def validate_schedule(nl: Netlist, sched: Schedule) -> None:
    """Constraint checker; raises NetlistError on any violation."""
    by_cycle: dict[int, list[ScheduledOp]] = {}
    for op in sched.ops:
        by_cycle.setdefault(op.cycle, []).append(op)
    gate = {g.id: g for g in nl.gates}
    transfer = set(nl.carry_chain.transfer_gates) if nl.carry_chain else set()

    for c, ops in by_cycle.items():
        kinds = {op.kind for op in ops}
        if len(kinds) > 1:
            raise NetlistError(f"cycle {c}: mixed gate kinds {kinds}")
        nets: list[str] = []
        cols = {op.in_cols for op in ops}
        if len(cols) > 1:
            raise NetlistError(f"cycle {c}: input columns not aligned: {cols}")
        for op in ops:
            for gid in op.gate_ids:
                nets.extend(gate[gid].inputs)
        if len(nets) != len(set(nets)):
            raise NetlistError(f"cycle {c}: shared fan-in within one cycle")

    driver_cycle = {g.output: sched.cycle_of_gate[g.id]
                    for g in nl.gates if g.id in sched.cycle_of_gate}
    copy_by_net = {}
    for cp in sched.copy_ops:
        copy_by_net.setdefault(cp.dst.net, []).append(cp.cycle)
    for g in nl.gates:
        if g.id not in sched.cycle_of_gate:
            continue
        c = sched.cycle_of_gate[g.id]
        for net in g.inputs:
            if net in driver_cycle and gate_kind_of(nl, net) is not Kind.STATE:
                if driver_cycle[net] >= c:
                    raise NetlistError(
                        f"gate {g.id} at cycle {c} reads net {net} produced at "
                        f"{driver_cycle[net]}"
                    )
    # placement bounds and unique cells
    seen_cells: dict[tuple[int, int], str] = {}
    for pl in sched.placements:
        if not (1 <= pl.row <= sched.dims.rows and 1 <= pl.col <= sched.dims.cols):
            raise NetlistError(f"placement out of bounds: {pl}")
        key = (pl.row, pl.col)
        if key in seen_cells and seen_cells[key] != pl.net:
            raise NetlistError(f"cell {key} assigned to {seen_cells[key]} and {pl.net}")
        seen_cells[key] = pl.net
    # output row equals first-input row (carry transfers excepted: they move
    # the carry into the next stage's row by design)
    place = {pl.net: pl for pl in sched.placements}
    for g in nl.gates:
        if g.kind is Kind.STATE or g.id in transfer:
            continue
        if g.output in place and g.inputs[0] in place:
            if place[g.output].row != place[g.inputs[0]].row:
                raise NetlistError(
                    f"gate {g.id}: output row {place[g.output].row} differs from "
                    f"input row {place[g.inputs[0]].row}"
                )


def gate_kind_of(nl: Netlist, net: str) -> Kind | None:
    g = nl.driver_of(net)
    return g.kind if g else None


def dump_schedule(nl: Netlist, sched: Schedule) -> str:
    """One line per cycle plus a placement table."""
    lines = [f"q={sched.q} p={sched.p} logic_cycles={sched.logic_cycles} "
             f"init_cycles={sched.init_cycles}"]
    events: list[tuple[int, str]] = []
    for op in sched.ops:
        events.append((op.cycle,
                       f"cycle {op.cycle}: {op.kind.value} gates={list(op.gate_ids)} "
                       f"in-cols={list(op.in_cols)} out-col={op.out_col} "
                       f"rows={list(op.rows)}"))
    for cp in sched.copy_ops:
        events.append((cp.cycle,
                       f"cycle {cp.cycle}: COPY {cp.src.net} "
                       f"({cp.src.row},{cp.src.col})->({cp.dst.row},{cp.dst.col})"))
    lines += [text for _, text in sorted(events, key=lambda e: e[0])]
    lines.append("placements:")
    for pl in sched.placements:
        lines.append(f"  {pl.net}: row {pl.row} col {pl.col}")
    return "\n".join(lines) + "\n"
