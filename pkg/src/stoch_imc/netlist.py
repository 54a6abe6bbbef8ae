"""Gate-level circuits over the 2T-1MTJ primitive set, plus a golden simulator.

The primitive kinds mirror what the memory array supports (BUFF/NOT/AND/NAND/
OR/NOR and the inverted 3- and 5-input majorities); XOR and MUX exist only as
composite markers that builders emit and `lower_to_primitives` removes.  STATE
is a one-bit feedback register (initial value 0) used by the scaled divider.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .bitstream import Bitstream, RandomSource, encode_unipolar

__all__ = [
    "Kind",
    "Gate",
    "PrimaryInput",
    "Netlist",
    "NetlistError",
    "ParseError",
    "CycleError",
    "parse_netlist",
    "format_netlist",
    "topo_layers",
    "lower_to_primitives",
    "simulate_functional",
]


class Kind(enum.Enum):
    BUFF = "BUFF"
    NOT = "NOT"
    AND = "AND"
    NAND = "NAND"
    OR = "OR"
    NOR = "NOR"
    MAJ3B = "MAJ3B"
    MAJ5B = "MAJ5B"
    STATE = "STATE"
    # composite markers, removed by lowering
    XOR = "XOR"
    MUX = "MUX"


ARITY = {
    Kind.BUFF: 1,
    Kind.NOT: 1,
    Kind.STATE: 1,
    Kind.AND: 2,
    Kind.NAND: 2,
    Kind.OR: 2,
    Kind.NOR: 2,
    Kind.XOR: 2,
    Kind.MAJ3B: 3,
    Kind.MUX: 3,  # (select, a, b) -> a if select else b
    Kind.MAJ5B: 5,
}

COMPOSITE = {Kind.XOR, Kind.MUX}
PRIMITIVE = set(Kind) - COMPOSITE


class NetlistError(ValueError):
    pass


class ParseError(NetlistError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, col {column}: {message}")
        self.line = line
        self.column = column


class CycleError(NetlistError):
    def __init__(self, cycle_nets):
        super().__init__(f"combinational cycle through nets: {' -> '.join(cycle_nets)}")
        self.cycle = list(cycle_nets)


@dataclass(frozen=True)
class Gate:
    id: int
    kind: Kind
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self):
        if len(self.inputs) != ARITY[self.kind]:
            raise NetlistError(
                f"gate {self.id}: {self.kind.value} expects {ARITY[self.kind]} inputs, "
                f"got {len(self.inputs)}"
            )


@dataclass(frozen=True)
class PrimaryInput:
    net: str
    lineage: str | None = None
    const_p: float | None = None   # None -> variable input

    def __post_init__(self):
        if self.const_p is not None and not 0.0 <= self.const_p <= 1.0:
            raise NetlistError(f"constant probability out of range on {self.net}: {self.const_p}")


@dataclass(frozen=True)
class CarryChain:
    """Ripple-carry metadata consumed by the scheduler's adder path."""

    n_bits: int
    carry_gates: tuple[int, ...]     # MAJ3B per stage
    transfer_gates: tuple[int, ...]  # inverting inter-row carry moves, stages 0..n-2
    copy_gates: tuple[int, ...]      # BUFF duplicate of the carry for the 5-input majority
    sum_gates: tuple[int, ...]       # MAJ5B per stage


@dataclass
class Netlist:
    gates: list[Gate]
    pis: list[PrimaryInput]
    pos: list[str]
    carry_chain: CarryChain | None = None

    def __post_init__(self):
        self.validate()

    # -- validation ---------------------------------------------------------

    def validate(self):
        drivers: dict[str, int] = {}
        pi_nets = {pi.net for pi in self.pis}
        if len(pi_nets) != len(self.pis):
            raise NetlistError("duplicate primary input declaration")
        for g in self.gates:
            if g.output in drivers:
                raise NetlistError(f"multiple drivers for net {g.output}")
            if g.output in pi_nets:
                raise NetlistError(f"net {g.output} is both a primary input and a gate output")
            drivers[g.output] = g.id
        for g in self.gates:
            for net in g.inputs:
                if net not in drivers and net not in pi_nets:
                    raise NetlistError(f"dangling net {net} (input of gate {g.id})")
        for net in self.pos:
            if net not in drivers and net not in pi_nets:
                raise NetlistError(f"dangling primary output {net}")
        # acyclicity modulo STATE feedback is enforced by topo_layers
        topo_layers(self, _validate_only=True)

    # -- convenience --------------------------------------------------------

    @property
    def pi_nets(self) -> list[str]:
        return [pi.net for pi in self.pis]

    def pi(self, net: str) -> PrimaryInput:
        for pi in self.pis:
            if pi.net == net:
                return pi
        raise KeyError(net)

    def driver_of(self, net: str) -> Gate | None:
        for g in self.gates:
            if g.output == net:
                return g
        return None

    def is_primitive(self) -> bool:
        return all(g.kind in PRIMITIVE for g in self.gates)

    def structurally_equal(self, other: "Netlist") -> bool:
        return (
            [(g.id, g.kind, g.inputs, g.output) for g in self.gates]
            == [(g.id, g.kind, g.inputs, g.output) for g in other.gates]
            and self.pis == other.pis
            and self.pos == other.pos
        )


# -- text format ------------------------------------------------------------

def parse_netlist(text: str) -> Netlist:
    """Parse the line format::

        PI <net> [lineage=<tag>]
        CONST <net> p=<value> [lineage=<tag>]
        PO <net>
        CARRYCHAIN n=<bits> carry=<ids> transfer=<ids> copy=<ids> sum=<ids>
        <id> <KIND> <in>[,<in>...] -> <out>

    Blank lines and ``#`` comments are ignored.
    """
    pis: list[PrimaryInput] = []
    pos: list[str] = []
    gates: list[Gate] = []
    seen_ids: set[int] = set()
    seen_outputs: dict[str, int] = {}
    carry_chain: CarryChain | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "PI":
            if len(tokens) < 2:
                raise ParseError("PI requires a net name", lineno)
            lineage = _kw(tokens[2:], "lineage", lineno)
            pis.append(PrimaryInput(tokens[1], lineage=lineage))
        elif head == "CONST":
            if len(tokens) < 3:
                raise ParseError("CONST requires a net name and p=<value>", lineno)
            p = _kw(tokens[2:], "p", lineno)
            if p is None:
                raise ParseError("CONST missing p=<value>", lineno)
            try:
                p_val = float(p)
            except ValueError:
                raise ParseError(f"bad probability literal {p!r}", lineno) from None
            lineage = _kw(tokens[2:], "lineage", lineno)
            pis.append(PrimaryInput(tokens[1], lineage=lineage, const_p=p_val))
        elif head == "PO":
            if len(tokens) != 2:
                raise ParseError("PO requires exactly one net name", lineno)
            pos.append(tokens[1])
        elif head == "CARRYCHAIN":
            if carry_chain is not None:
                raise ParseError("duplicate CARRYCHAIN directive", lineno)
            carry_chain = _parse_carry_chain(tokens[1:], lineno)
        else:
            gates.append(_parse_gate_line(tokens, raw, lineno, seen_ids, seen_outputs))

    if carry_chain is not None:
        chain_ids = (carry_chain.carry_gates + carry_chain.transfer_gates
                     + carry_chain.copy_gates + carry_chain.sum_gates)
        missing = sorted(set(chain_ids) - seen_ids)
        if missing:
            raise NetlistError(
                f"CARRYCHAIN references unknown gate id(s): {missing}"
            )
    return Netlist(gates=gates, pis=pis, pos=pos, carry_chain=carry_chain)


def _parse_carry_chain(tokens: list[str], lineno: int) -> CarryChain:
    fields = {}
    for key in ("n", "carry", "transfer", "copy", "sum"):
        val = _kw(tokens, key, lineno)
        if val is None:
            raise ParseError(f"CARRYCHAIN missing {key}=", lineno)
        fields[key] = val
    try:
        n_bits = int(fields["n"])
        ids = {key: tuple(int(i) for i in fields[key].split(",")) if fields[key]
               else () for key in ("carry", "transfer", "copy", "sum")}
    except ValueError:
        raise ParseError("bad integer in CARRYCHAIN directive", lineno) from None
    return CarryChain(n_bits=n_bits, carry_gates=ids["carry"],
                      transfer_gates=ids["transfer"], copy_gates=ids["copy"],
                      sum_gates=ids["sum"])


def _kw(tokens: Iterable[str], key: str, lineno: int) -> str | None:
    for tok in tokens:
        if tok.startswith(key + "="):
            return tok[len(key) + 1:]
    return None


def _parse_gate_line(tokens, raw, lineno, seen_ids, seen_outputs) -> Gate:
    if len(tokens) != 5 or tokens[3] != "->":
        raise ParseError(
            "expected `<id> <KIND> <in>[,<in>...] -> <out>`", lineno
        )
    try:
        gid = int(tokens[0])
    except ValueError:
        raise ParseError(f"bad gate id {tokens[0]!r}", lineno) from None
    if gid in seen_ids:
        raise ParseError(f"duplicate gate id {gid}", lineno)
    seen_ids.add(gid)
    kind_col = raw.index(tokens[1]) + 1
    try:
        kind = Kind[tokens[1]]
    except KeyError:
        raise ParseError(f"unknown gate kind {tokens[1]!r}", lineno, kind_col) from None
    inputs = tuple(tokens[2].split(","))
    if len(inputs) != ARITY[kind]:
        raise ParseError(
            f"{kind.value} expects {ARITY[kind]} inputs, got {len(inputs)}", lineno
        )
    out = tokens[4]
    if out in seen_outputs:
        raise ParseError(
            f"multiple drivers for net {out} (first at line {seen_outputs[out]})", lineno
        )
    seen_outputs[out] = lineno
    return Gate(id=gid, kind=kind, inputs=inputs, output=out)


def format_netlist(nl: Netlist) -> str:
    lines = []
    for pi in nl.pis:
        if pi.const_p is not None:
            suffix = f" lineage={pi.lineage}" if pi.lineage else ""
            lines.append(f"CONST {pi.net} p={pi.const_p!r}{suffix}")
        else:
            suffix = f" lineage={pi.lineage}" if pi.lineage else ""
            lines.append(f"PI {pi.net}{suffix}")
    for net in nl.pos:
        lines.append(f"PO {net}")
    if nl.carry_chain is not None:
        cc = nl.carry_chain
        lines.append(
            "CARRYCHAIN n={} carry={} transfer={} copy={} sum={}".format(
                cc.n_bits,
                ",".join(map(str, cc.carry_gates)),
                ",".join(map(str, cc.transfer_gates)),
                ",".join(map(str, cc.copy_gates)),
                ",".join(map(str, cc.sum_gates)),
            )
        )
    for g in nl.gates:
        lines.append(f"{g.id} {g.kind.value} {','.join(g.inputs)} -> {g.output}")
    return "\n".join(lines) + "\n"


# -- topology ---------------------------------------------------------------

def topo_layers(nl: Netlist, _validate_only: bool = False):
    """Topological layering excluding STATE feedback edges.

    Returns (ordered_gates, depth, layer_of_gate, inverse_topo_of_gate).
    Layer = 1 + max layer of combinational fan-in gates; STATE outputs count
    as sources.  Inverse topological order value = longest-path distance to a
    primary output (0 for PO drivers).
    """
    driver: dict[str, Gate] = {g.output: g for g in nl.gates}
    comb = [g for g in nl.gates if g.kind is not Kind.STATE]

    layer: dict[int, int] = {}
    visiting: dict[int, bool] = {}
    stack_nets: list[str] = []

    def visit(g: Gate) -> int:
        if g.id in layer:
            return layer[g.id]
        if visiting.get(g.id):
            i = stack_nets.index(g.output)
            raise CycleError(stack_nets[i:] + [g.output])
        visiting[g.id] = True
        stack_nets.append(g.output)
        depth_in = 0
        for net in g.inputs:
            d = driver.get(net)
            if d is not None and d.kind is not Kind.STATE:
                depth_in = max(depth_in, visit(d))
        stack_nets.pop()
        visiting[g.id] = False
        layer[g.id] = depth_in + 1
        return layer[g.id]

    for g in comb:
        visit(g)

    if _validate_only:
        return None

    depth = max(layer.values(), default=0)
    ordered = sorted(comb, key=lambda g: (layer[g.id], g.id))

    # longest path to a PO, feedback edges (inputs of STATE gates) included so
    # feedback-cone gates still get a distance; edges INTO the graph from STATE
    # outputs are sources as above.
    consumers: dict[str, list[Gate]] = {}
    for g in nl.gates:
        for net in g.inputs:
            consumers.setdefault(net, []).append(g)
    po_set = set(nl.pos)
    inv: dict[int, int] = {}

    def inv_visit(g: Gate) -> int:
        if g.id in inv:
            return inv[g.id]
        inv[g.id] = 0  # breaks feedback loops; refined below for DAG part
        best = 0 if g.output in po_set else None
        for c in consumers.get(g.output, []):
            if c.kind is Kind.STATE:
                continue  # feedback edge
            cand = inv_visit(c) + 1
            best = cand if best is None else max(best, cand)
        inv[g.id] = 0 if best is None else best
        return inv[g.id]

    for g in comb:
        inv_visit(g)
    for g in nl.gates:
        if g.kind is Kind.STATE:
            layer[g.id] = 0
            inv.setdefault(g.id, 0)

    return ordered, depth, layer, inv


# -- lowering ---------------------------------------------------------------

def lower_to_primitives(nl: Netlist) -> Netlist:
    """Expand XOR and MUX markers into the primitive set.

    XOR(a,b) -> OR(AND(a, NOT b), AND(NOT a, b));
    MUX(s,a,b) -> OR(AND(a, s), AND(b, NOT s)).  Idempotent on primitive nets.
    """
    if nl.is_primitive():
        return nl
    gates: list[Gate] = []
    next_id = max((g.id for g in nl.gates), default=0) + 1
    used = {g.output for g in nl.gates} | {pi.net for pi in nl.pis}

    def fresh(base: str) -> str:
        nonlocal next_id
        name = f"{base}${next_id}"
        while name in used:
            next_id += 1
            name = f"{base}${next_id}"
        used.add(name)
        return name

    def emit(kind: Kind, inputs: tuple[str, ...], output: str) -> None:
        nonlocal next_id
        gates.append(Gate(id=next_id, kind=kind, inputs=inputs, output=output))
        next_id += 1

    for g in nl.gates:
        if g.kind is Kind.XOR:
            a, b = g.inputs
            nb, na = fresh("nb"), fresh("na")
            t1, t2 = fresh("t"), fresh("t")
            emit(Kind.NOT, (b,), nb)
            emit(Kind.NOT, (a,), na)
            emit(Kind.AND, (a, nb), t1)
            emit(Kind.AND, (na, b), t2)
            emit(Kind.OR, (t1, t2), g.output)
        elif g.kind is Kind.MUX:
            s, a, b = g.inputs
            ns = fresh("ns")
            t1, t2 = fresh("t"), fresh("t")
            emit(Kind.NOT, (s,), ns)
            emit(Kind.AND, (a, s), t1)
            emit(Kind.AND, (b, ns), t2)
            emit(Kind.OR, (t1, t2), g.output)
        else:
            gates.append(g)
    return Netlist(gates=gates, pis=list(nl.pis), pos=list(nl.pos),
                   carry_chain=nl.carry_chain)


# -- functional simulation --------------------------------------------------

def _eval(kind: Kind, args):
    if kind is Kind.BUFF:
        return args[0]
    if kind is Kind.NOT:
        return 1 - args[0]
    if kind is Kind.AND:
        return args[0] & args[1]
    if kind is Kind.NAND:
        return 1 - (args[0] & args[1])
    if kind is Kind.OR:
        return args[0] | args[1]
    if kind is Kind.NOR:
        return 1 - (args[0] | args[1])
    if kind is Kind.XOR:
        return args[0] ^ args[1]
    if kind is Kind.MUX:
        s, a, b = args
        return (s & a) | ((1 - s) & b)
    if kind is Kind.MAJ3B:
        s = args[0] + args[1] + args[2]
        return (np.asarray(s) < 2).astype(np.uint8) if isinstance(s, np.ndarray) else int(s < 2)
    if kind is Kind.MAJ5B:
        s = sum(args[:5])
        return (np.asarray(s) < 3).astype(np.uint8) if isinstance(s, np.ndarray) else int(s < 3)
    raise NetlistError(f"cannot evaluate kind {kind}")


def materialize_constants(
    nl: Netlist,
    pi_streams: Mapping[str, Bitstream],
    length: int,
    source: RandomSource | None,
) -> dict[str, Bitstream]:
    """Bind all PI nets, generating declared constants from `source`."""
    bound: dict[str, Bitstream] = dict(pi_streams)
    for pi in nl.pis:
        if pi.net in bound:
            continue
        if pi.const_p is None:
            raise NetlistError(f"unbound primary input {pi.net}")
        if pi.const_p in (0.0, 1.0):
            bits = np.full(length, int(pi.const_p), dtype=np.uint8)
            bound[pi.net] = Bitstream(bits, lineage=pi.lineage)
        else:
            if source is None:
                raise NetlistError(
                    f"constant {pi.net} needs a RandomSource to materialize"
                )
            bound[pi.net] = encode_unipolar(
                pi.const_p, length, source.child("const", pi.net), lineage=pi.lineage
            )
    return bound


def simulate_functional(
    nl: Netlist,
    pi_streams: Mapping[str, Bitstream],
    source: RandomSource | None = None,
    state_reset_every: int | None = None,
    return_all: bool = False,
) -> dict[str, Bitstream]:
    """Golden bit-level simulation.

    STATE gates output their stored value at each bit position and latch their
    input afterwards (initial value 0); `state_reset_every` re-initializes the
    registers every that-many positions, mirroring sliced execution.
    """
    lengths = {len(bs) for bs in pi_streams.values()}
    if len(lengths) > 1:
        raise NetlistError(f"primary input streams have differing lengths: {sorted(lengths)}")
    if not lengths:
        raise NetlistError("no primary input streams bound")
    length = lengths.pop()

    bound = materialize_constants(nl, pi_streams, length, source)
    ordered, _, _, _ = topo_layers(nl)
    state_gates = [g for g in nl.gates if g.kind is Kind.STATE]

    values: dict[str, np.ndarray]
    if not state_gates:
        values = {net: bs.bits.astype(np.uint8) for net, bs in bound.items()}
        for g in ordered:
            values[g.output] = np.asarray(
                _eval(g.kind, [values[n] for n in g.inputs]), dtype=np.uint8
            )
    else:
        pi_bits = {net: bs.bits for net, bs in bound.items()}
        out_arrays: dict[str, np.ndarray] = {
            g.output: np.zeros(length, dtype=np.uint8) for g in nl.gates
        }
        state = {g.id: 0 for g in state_gates}
        for i in range(length):
            if state_reset_every and i % state_reset_every == 0:
                state = {g.id: 0 for g in state_gates}
            vals: dict[str, int] = {net: int(bits[i]) for net, bits in pi_bits.items()}
            for g in state_gates:
                vals[g.output] = state[g.id]
                out_arrays[g.output][i] = state[g.id]
            for g in ordered:
                v = int(_eval(g.kind, [vals[n] for n in g.inputs]))
                vals[g.output] = v
                out_arrays[g.output][i] = v
            for g in state_gates:
                state[g.id] = vals[g.inputs[0]]
        values = dict(pi_bits)
        values.update(out_arrays)

    if return_all:
        return {net: Bitstream(arr) for net, arr in values.items()}
    return {net: Bitstream(values[net]) for net in nl.pos}
