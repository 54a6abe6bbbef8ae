"""Builders for the stochastic arithmetic circuits and the ripple-carry adder.

Every builder returns a primitive-only netlist with conventional input names:

* multiply:      a, b                       independent
* scaled add:    a, b  (+ constant s=0.5)   independent
* abs subtract:  a, b                       correlated (shared lineage "w")
* scaled divide: a, b                       correlated, converges to a/b
* square root:   a1, a2                     independent copies of one value
* exponential:   a1..a5                     independent copies of one value

The square root is a quadratic Bernstein form routed by a two-level mux tree;
its two constant coefficients are fitted to sqrt(x) by minimax on a dense grid
(max error 0.072 on [0,1], documented bound SQRT_MAX_ERROR).  The exponential
is the 5-term-past-unity Maclaurin truncation of exp(-c*a) in Horner form, one
NAND stage per order.
"""

from __future__ import annotations

import enum

import numpy as np

from .bitstream import Bitstream
from .netlist import (
    CarryChain,
    Gate,
    Kind,
    Netlist,
    NetlistError,
    PrimaryInput,
    lower_to_primitives,
    simulate_functional,
)

__all__ = [
    "CircuitKind",
    "build_circuit",
    "build_mult",
    "build_scaled_add",
    "build_abs_sub",
    "build_scaled_div",
    "build_sqrt",
    "build_exp",
    "build_binary_adder",
    "adder_input_streams",
    "adder_output_value",
    "simulate_adder",
    "sqrt_poly",
    "exp_truncated",
    "SQRT_B0",
    "SQRT_B1",
    "SQRT_MAX_ERROR",
    "CORRELATED_LINEAGE",
]

# Minimax fit of b0*(1-x)^2 + 2*b1*x*(1-x) + x^2 to sqrt(x) on [0, 1].
SQRT_B0 = 0.0718
SQRT_B1 = 0.9804
SQRT_MAX_ERROR = 0.075

# Lineage tag used by builders whose inputs must be maximally correlated.
CORRELATED_LINEAGE = "w"


class CircuitKind(enum.Enum):
    MULT = "mult"
    SCALED_ADD = "scaled-add"
    ABS_SUB = "abs-sub"
    SCALED_DIV = "scaled-div"
    SQRT = "sqrt"
    EXP = "exp"


def sqrt_poly(x):
    """Analytic value realized by the square-root circuit."""
    x = np.asarray(x, dtype=float)
    return SQRT_B0 * (1 - x) ** 2 + 2 * SQRT_B1 * x * (1 - x) + x ** 2


def exp_truncated(a, c: float):
    """5th-order Maclaurin truncation of exp(-c*a), the exponential's target."""
    y = np.asarray(a, dtype=float) * c
    acc = np.ones_like(y)
    for k in range(5, 0, -1):
        acc = 1.0 - (y / k) * acc
    return acc


def build_circuit(kind: CircuitKind, c: float = 0.8) -> Netlist:
    if kind is CircuitKind.MULT:
        return build_mult()
    if kind is CircuitKind.SCALED_ADD:
        return build_scaled_add()
    if kind is CircuitKind.ABS_SUB:
        return build_abs_sub()
    if kind is CircuitKind.SCALED_DIV:
        return build_scaled_div()
    if kind is CircuitKind.SQRT:
        return build_sqrt()
    if kind is CircuitKind.EXP:
        return build_exp(c)
    raise NetlistError(f"unknown circuit kind {kind}")


def build_mult() -> Netlist:
    """a * b: a single AND over independent inputs."""
    return Netlist(
        gates=[Gate(1, Kind.AND, ("a", "b"), "y")],
        pis=[PrimaryInput("a"), PrimaryInput("b")],
        pos=["y"],
    )


def build_scaled_add() -> Netlist:
    """(a + b) / 2: mux with a constant 0.5 select."""
    nl = Netlist(
        gates=[Gate(1, Kind.MUX, ("s", "a", "b"), "y")],
        pis=[PrimaryInput("a"), PrimaryInput("b"), PrimaryInput("s", const_p=0.5)],
        pos=["y"],
    )
    return lower_to_primitives(nl)


def build_abs_sub() -> Netlist:
    """|a - b| for maximally correlated inputs: lowered XOR."""
    nl = Netlist(
        gates=[Gate(1, Kind.XOR, ("a", "b"), "y")],
        pis=[
            PrimaryInput("a", lineage=CORRELATED_LINEAGE),
            PrimaryInput("b", lineage=CORRELATED_LINEAGE),
        ],
        pos=["y"],
    )
    return lower_to_primitives(nl)


def build_scaled_div() -> Netlist:
    """a / b (clipped to [0,1]) for correlated inputs with a <= b.

    One-register feedback: y_i = b_i ? a_i : Q, with Q latching y.  Q starts
    at zero.
    """
    nl = Netlist(
        gates=[
            Gate(1, Kind.MUX, ("b", "a", "q"), "y"),
            Gate(2, Kind.STATE, ("y",), "q"),
        ],
        pis=[
            PrimaryInput("a", lineage=CORRELATED_LINEAGE),
            PrimaryInput("b", lineage=CORRELATED_LINEAGE),
        ],
        pos=["y"],
    )
    return lower_to_primitives(nl)


def build_sqrt() -> Netlist:
    """sqrt(a) approximation: Bernstein coefficients routed by (a1, a2).

    Leaves: (1,1)->1 (all-ones constant), mixed->b1, (0,0)->b0; two fitted
    constant streams plus two independently generated copies of the input.
    """
    nl = Netlist(
        gates=[
            Gate(1, Kind.MUX, ("a2", "one", "c1"), "hi"),
            Gate(2, Kind.MUX, ("a2", "c1", "c0"), "lo"),
            Gate(3, Kind.MUX, ("a1", "hi", "lo"), "y"),
        ],
        pis=[
            PrimaryInput("a1"),
            PrimaryInput("a2"),
            PrimaryInput("one", const_p=1.0),
            PrimaryInput("c1", const_p=SQRT_B1),
            PrimaryInput("c0", const_p=SQRT_B0),
        ],
        pos=["y"],
    )
    return lower_to_primitives(nl)


def build_exp(c: float) -> Netlist:
    """exp(-c * a) as the 5th-order Maclaurin truncation, Horner NAND cascade.

    Stage k computes 1 - (c/k) * a * prev; requires five independent copies of
    the input and one constant stream per stage.
    """
    if not 0.0 < c <= 1.0:
        raise NetlistError(f"exponential constant must satisfy 0 < c <= 1, got {c}")
    gates: list[Gate] = []
    pis: list[PrimaryInput] = []
    gid = 1
    prev: str | None = None
    for k in range(5, 0, -1):
        pis.append(PrimaryInput(f"a{k}"))
        pis.append(PrimaryInput(f"c{k}", const_p=c / k))
        term = f"t{k}"
        gates.append(Gate(gid, Kind.AND, (f"c{k}", f"a{k}"), term))
        gid += 1
        out = f"s{k}"
        if prev is None:
            gates.append(Gate(gid, Kind.NOT, (term,), out))
        else:
            gates.append(Gate(gid, Kind.NAND, (term, prev), out))
        gid += 1
        prev = out
    pis.sort(key=lambda pi: pi.net)
    return Netlist(gates=gates, pis=pis, pos=["s1"])


# -- binary ripple-carry adder ----------------------------------------------

def build_binary_adder(n_bits: int) -> Netlist:
    """n-bit ripple-carry adder from inverted majorities.

    The carry chain runs in complemented form: every stage receives the
    inverted carry and complemented operands, so its MAJ3B emits the true
    carry-out and its MAJ5B emits the true sum directly; an inverting copy
    moves the carry to the next stage's row.  Primary inputs are therefore the
    complemented operand bits (na*/nb*) plus the complemented carry-in, which
    initialization writes for free.
    """
    if n_bits < 1:
        raise NetlistError("adder width must be >= 1")
    gates: list[Gate] = []
    pis: list[PrimaryInput] = [PrimaryInput("ncin0", const_p=1.0)]  # carry-in 0
    carry, transfer, copies, sums = [], [], [], []
    gid = 1
    for i in range(n_bits):
        pis.append(PrimaryInput(f"na{i}"))
        pis.append(PrimaryInput(f"nb{i}"))
        k = f"k{i}"      # true carry-out of stage i
        gates.append(Gate(gid, Kind.MAJ3B, (f"na{i}", f"nb{i}", f"ncin{i}"), k))
        carry.append(gid)
        gid += 1
        d = f"d{i}"      # duplicate for the 5-input majority
        gates.append(Gate(gid, Kind.BUFF, (k,), d))
        copies.append(gid)
        gid += 1
        gates.append(
            Gate(gid, Kind.MAJ5B, (f"na{i}", f"nb{i}", f"ncin{i}", k, d), f"s{i}")
        )
        sums.append(gid)
        gid += 1
        if i < n_bits - 1:
            gates.append(Gate(gid, Kind.NOT, (k,), f"ncin{i + 1}"))
            transfer.append(gid)
            gid += 1
    pos = [f"s{i}" for i in range(n_bits)] + [f"k{n_bits - 1}"]
    return Netlist(
        gates=gates,
        pis=pis,
        pos=pos,
        carry_chain=CarryChain(
            n_bits=n_bits,
            carry_gates=tuple(carry),
            transfer_gates=tuple(transfer),
            copy_gates=tuple(copies),
            sum_gates=tuple(sums),
        ),
    )


def adder_input_streams(n_bits: int, x: int, y: int, length: int = 1) -> dict[str, Bitstream]:
    """Bind the adder's complemented-operand inputs for integers x, y."""
    if not (0 <= x < 2 ** n_bits and 0 <= y < 2 ** n_bits):
        raise ValueError("operand out of range")
    streams = {}
    for i in range(n_bits):
        streams[f"na{i}"] = Bitstream(np.full(length, 1 - ((x >> i) & 1), dtype=np.uint8))
        streams[f"nb{i}"] = Bitstream(np.full(length, 1 - ((y >> i) & 1), dtype=np.uint8))
    return streams


def adder_output_value(n_bits: int, outputs: dict[str, Bitstream], position: int = 0) -> int:
    """Decode sum bits (modulo 2^n) from a functional-simulation result."""
    total = 0
    for i in range(n_bits):
        total |= int(outputs[f"s{i}"].bits[position]) << i
    return total


def simulate_adder(n_bits: int, x: int, y: int) -> int:
    nl = build_binary_adder(n_bits)
    out = simulate_functional(nl, adder_input_streams(n_bits, x, y))
    return adder_output_value(n_bits, out)
