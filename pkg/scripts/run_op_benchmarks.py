#!/usr/bin/env python3
"""Benchmark every arithmetic circuit: cycles, energy, writes, accuracy.

Prints one table row per op and optionally dumps the rows as CSV.
"""

import argparse
import csv
import sys

from stoch_imc.arch import execute_plan
from stoch_imc.bitstream import RandomSource, encode_unipolar
from stoch_imc.circuits import CORRELATED_LINEAGE, CircuitKind, build_circuit
from stoch_imc.config import load_config
from stoch_imc.scheduler import partition_circuit

OPERANDS = {"a": 0.4, "b": 0.7}


def op_streams(kind, bl, source):
    a, b = OPERANDS["a"], OPERANDS["b"]
    if kind in (CircuitKind.ABS_SUB, CircuitKind.SCALED_DIV):
        return {"a": encode_unipolar(a, bl, source, lineage=CORRELATED_LINEAGE),
                "b": encode_unipolar(b, bl, source, lineage=CORRELATED_LINEAGE)}
    if kind in (CircuitKind.MULT, CircuitKind.SCALED_ADD):
        return {"a": encode_unipolar(a, bl, source.child("a")),
                "b": encode_unipolar(b, bl, source.child("b"))}
    if kind is CircuitKind.SQRT:
        return {n: encode_unipolar(a, bl, source.child(n)) for n in ("a1", "a2")}
    return {f"a{k}": encode_unipolar(a, bl, source.child(f"a{k}"))
            for k in range(1, 6)}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="also write rows to this CSV file")
    args = ap.parse_args(argv)

    cfg = load_config(args.config).arch
    source = RandomSource(args.seed)
    rows = []
    for kind in CircuitKind:
        nl = build_circuit(kind)
        plan = partition_circuit(nl, cfg.dims, cfg.bitstream_length)
        streams = op_streams(kind, cfg.bitstream_length, source.child(kind.value))
        rep = execute_plan(plan, streams, cfg, source.child("c", kind.value),
                           track_cells=False)
        rows.append({
            "op": kind.value,
            "q": rep.q,
            "passes": rep.pass_count,
            "cycles": rep.total_cycles,
            "energy_aj": round(rep.total_energy_aj, 1),
            "writes": rep.total_writes,
            "out": round(rep.outputs[nl.pos[0]].value(), 4),
        })

    cols = list(rows[0])
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
    print("  ".join(c.ljust(widths[c]) for c in cols))
    for r in rows:
        print("  ".join(str(r[c]).ljust(widths[c]) for c in cols))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            w.writerows(rows)
        print(f"wrote {args.csv}", file=sys.stderr)


if __name__ == "__main__":
    main()
