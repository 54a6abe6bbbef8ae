"""Batch experiment runner: operation benchmarks, application runs, schedule
dumps, sweeps, and report regeneration.

Every run is reproducible from (config file, seed) alone; artifacts land in an
append-only run directory named by timestamp and seed, and the files
themselves carry no timestamps, so identical seeds produce byte-identical
reports.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .apps import (
    AppKind,
    app_result_csv,
    load_inputs,
    stochastic_eval,
    synthetic_input,
)
from .arch import ArchConfig, execute_plan
from .bitstream import RandomSource, encode_unipolar
from .circuits import CORRELATED_LINEAGE, CircuitKind, build_circuit
from .config import ConfigBundle, ConfigError, config_schema, load_config
from .netlist import NetlistError, lower_to_primitives, parse_netlist
from .reliability import error_sweep, sweep_csv
from .scheduler import (
    Schedule,
    SubarrayDims,
    dump_schedule,
    partition_circuit,
    schedule_and_map,
    validate_schedule,
)

__all__ = ["main", "emit_occupancy_map"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3

REPORT_SCHEMA = {
    "summary.csv": [
        "mode", "q", "pass_count", "total_cycles", "total_energy_aj",
        "total_writes", "max_per_cell_writes", "utilized_cells",
    ],
    "results.csv": ["input-id", "golden", "stochastic", "abs-error"],
    "sweep.csv": ["app", "rate", "mean_error", "stderr", "trials"],
}


def emit_occupancy_map(sched: Schedule) -> str:
    """ASCII per-cycle occupancy rendering of a schedule."""
    if not sched.placements:
        return "(empty schedule: no cells occupied)\n"
    lines = [f"logic cycles: {sched.logic_cycles}  "
             f"init cycles: {sched.init_cycles}  q={sched.q}"]
    for op in sched.ops:
        lines.append(
            f"  cycle {op.cycle}: {op.kind.value} "
            f"cols {list(op.in_cols)} -> {op.out_col}"
        )
    for cp in sched.copy_ops:
        lines.append(f"  cycle {cp.cycle}: COPY col {cp.src.col} -> {cp.dst.col}")
    max_col = max(pl.col for pl in sched.placements)
    max_row = max(pl.row for pl in sched.placements)
    occupied = {(pl.row, pl.col) for pl in sched.placements}
    lines.append(f"occupied columns: {len({c for _, c in occupied})}")
    header = "     " + "".join(str(c % 10) for c in range(1, max_col + 1))
    lines.append(header)
    for row in range(1, max_row + 1):
        cells = "".join("#" if (row, col) in occupied else "."
                        for col in range(1, max_col + 1))
        lines.append(f"r{row:<4}{cells}")
    if sched.rows_per_block > 1:
        lines.append(f"(each occupied row extends over {sched.rows_per_block} "
                     "bit-slice rows)")
    return "\n".join(lines) + "\n"


def _run_dir(base: str, seed: int) -> Path:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    d = Path(base) / f"{stamp}-seed{seed}"
    suffix = 0
    while d.exists():
        suffix += 1
        d = Path(base) / f"{stamp}-seed{seed}.{suffix}"
    d.mkdir(parents=True)
    return d


def _op_streams(kind: CircuitKind, args, bl: int, source: RandomSource):
    a, b = args.a, args.b
    if kind in (CircuitKind.ABS_SUB, CircuitKind.SCALED_DIV):
        return {
            "a": encode_unipolar(a, bl, source, lineage=CORRELATED_LINEAGE),
            "b": encode_unipolar(b, bl, source, lineage=CORRELATED_LINEAGE),
        }
    if kind in (CircuitKind.MULT, CircuitKind.SCALED_ADD):
        return {
            "a": encode_unipolar(a, bl, source.child("a")),
            "b": encode_unipolar(b, bl, source.child("b")),
        }
    if kind is CircuitKind.SQRT:
        return {net: encode_unipolar(a, bl, source.child(net))
                for net in ("a1", "a2")}
    if kind is CircuitKind.EXP:
        return {f"a{k}": encode_unipolar(a, bl, source.child(f"a{k}"))
                for k in range(1, 6)}
    raise NetlistError(f"unsupported op {kind}")


def _cmd_op(args, bundle: ConfigBundle) -> int:
    cfg = bundle.arch
    if args.bl:
        cfg = ArchConfig(**{**cfg.__dict__, "bitstream_length": args.bl})
    kind = CircuitKind(args.kind)
    source = RandomSource(args.seed)
    nl = build_circuit(kind, c=args.c)
    plan = partition_circuit(nl, cfg.dims, cfg.bitstream_length)
    streams = _op_streams(kind, args, cfg.bitstream_length, source.child("in"))
    report = execute_plan(plan, streams, cfg, source.child("const"))
    out = _run_dir(args.out, args.seed)
    (out / "report.json").write_text(report.to_json() + "\n")
    (out / "summary.csv").write_text(report.to_csv())
    sched = schedule_and_map(plan.parts[0][0], cfg.dims, q=plan.q)
    (out / "schedule.txt").write_text(dump_schedule(plan.parts[0][0], sched))
    print(out)
    return EXIT_OK


def _app_input(args):
    kind = AppKind(args.name)
    if args.input:
        return kind, load_inputs(args.input, kind, window=args.window)
    return kind, synthetic_input(kind, seed=args.seed, size=args.size,
                                 window=args.window, n_history=args.n_history)


def _cmd_app(args, bundle: ConfigBundle) -> int:
    cfg = bundle.arch
    if args.bl:
        cfg = ArchConfig(**{**cfg.__dict__, "bitstream_length": args.bl})
    kind, app = _app_input(args)
    source = RandomSource(args.seed)
    result = stochastic_eval(app, cfg, source, with_arch=not args.no_arch)
    out = _run_dir(args.out, args.seed)
    (out / "app.json").write_text(json.dumps({
        "app": kind.value,
        "mae_percent": result.mae_percent,
        "outputs": int(result.golden.size),
        "trace_nodes": len(result.trace),
        "totals": result.totals,
    }, indent=2) + "\n")
    (out / "results.csv").write_text(app_result_csv(result))
    print(out)
    return EXIT_OK


def _cmd_schedule(args, bundle: ConfigBundle) -> int:
    text = Path(args.netlist).read_text()
    nl = lower_to_primitives(parse_netlist(text))
    dims = bundle.arch.dims
    sched = schedule_and_map(nl, dims, q=args.q)
    validate_schedule(nl, sched)
    dump = dump_schedule(nl, sched)
    occupancy = emit_occupancy_map(sched)
    sys.stdout.write(dump)
    sys.stdout.write(occupancy)
    if args.out:
        out = _run_dir(args.out, args.seed)
        (out / "schedule.txt").write_text(dump)
        (out / "occupancy.txt").write_text(occupancy)
    return EXIT_OK


def _cmd_sweep(args, bundle: ConfigBundle) -> int:
    cfg = bundle.arch
    source = RandomSource(args.seed)
    out = _run_dir(args.out, args.seed)
    rows = []
    if args.axis == "flip-rate":
        kind, app = _app_input(args)
        rates = [float(r) / 100.0 for r in args.rates.split(",")]
        res = error_sweep(app, cfg, source, rates=tuple(rates),
                          trials=args.trials)
        (out / "sweep.csv").write_text(sweep_csv([res]))
    elif args.axis == "bitstream-length":
        kind, app = _app_input(args)
        for bl in (int(b) for b in args.bls.split(",")):
            cfg_bl = ArchConfig(**{**cfg.__dict__, "bitstream_length": bl})
            maes = [stochastic_eval(app, cfg_bl, source.child("bl", bl, t),
                                    with_arch=False).mae_percent
                    for t in range(args.trials)]
            rows.append({"app": kind.value, "axis": "bitstream-length",
                         "value": bl, "mean_error": float(np.mean(maes)),
                         "stderr": float(np.std(maes, ddof=1) / np.sqrt(len(maes))),
                         "trials": args.trials})
        _write_long_csv(out / "sweep.csv", rows)
    else:  # subarray-size
        nl = build_circuit(CircuitKind(args.op))
        for size in (int(s) for s in args.sizes.split(",")):
            dims = SubarrayDims(rows=size, cols=size)
            cfg_sz = ArchConfig(**{**cfg.__dict__, "dims": dims})
            plan = partition_circuit(nl, dims, cfg.bitstream_length)
            streams = _op_streams(CircuitKind(args.op), args,
                                  cfg.bitstream_length, source.child("in"))
            rep = execute_plan(plan, streams, cfg_sz, source.child("const"))
            rows.append({"app": args.op, "axis": "subarray-size", "value": size,
                         "total_cycles": rep.total_cycles,
                         "total_energy_aj": rep.total_energy_aj,
                         "pass_count": rep.pass_count})
        _write_long_csv(out / "sweep.csv", rows)
    print(out)
    return EXIT_OK


def _write_long_csv(path: Path, rows: list[dict]) -> None:
    if not rows:
        path.write_text("")
        return
    cols = list(rows[0])
    lines = [",".join(cols)]
    lines += [",".join(str(r[c]) for c in cols) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def _cmd_report(args, bundle: ConfigBundle) -> int:
    if args.schema:
        for fname, cols in REPORT_SCHEMA.items():
            print(f"{fname}: {','.join(cols)}")
        print("config keys:")
        for key, typ in config_schema().items():
            print(f"  {key}: {typ}")
        return EXIT_OK
    run = Path(args.run_dir)
    report_file = run / "report.json"
    if not report_file.exists():
        print(f"error: no report.json under {run}", file=sys.stderr)
        return EXIT_FAILURE
    doc = json.loads(report_file.read_text())
    cols = REPORT_SCHEMA["summary.csv"]
    values = {
        "mode": doc["mode"], "q": doc["q"], "pass_count": doc["pass_count"],
        "total_cycles": doc["total_cycles"],
        "total_energy_aj": doc["total_energy_aj"],
        "total_writes": doc["writes"]["total"],
        "max_per_cell_writes": doc["writes"]["max_per_cell"],
        "utilized_cells": doc["writes"]["utilized_cells"],
    }
    (run / "summary.csv").write_text(
        ",".join(cols) + "\r\n" + ",".join(str(values[c]) for c in cols) + "\r\n"
    )
    print(run / "summary.csv")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stoch-imc",
        description="stochastic in-memory computing simulator",
    )
    p.add_argument("--config", help="JSON config file (or set STOCH_IMC_CONFIG)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   dest="overrides", help="config override, repeatable")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="runs", help="run-directory root")
    sub = p.add_subparsers(dest="command", required=True)

    op = sub.add_parser("op", help="run one arithmetic operation")
    op.add_argument("kind", choices=[k.value for k in CircuitKind])
    op.add_argument("--a", type=float, default=0.5)
    op.add_argument("--b", type=float, default=0.5)
    op.add_argument("--c", type=float, default=0.8)
    op.add_argument("--bl", type=int, default=0)
    op.set_defaults(func=_cmd_op)

    app = sub.add_parser("app", help="run one application")
    app.add_argument("name", choices=[k.value for k in AppKind])
    app.add_argument("--input", help="PGM or JSON input file")
    app.add_argument("--size", "--grid", type=int, default=16, dest="size")
    app.add_argument("--window", type=int, default=9)
    app.add_argument("--n-history", type=int, default=8)
    app.add_argument("--bl", type=int, default=0)
    app.add_argument("--no-arch", action="store_true",
                     help="skip bank cost accounting")
    app.set_defaults(func=_cmd_app)

    sch = sub.add_parser("schedule", help="schedule a netlist file")
    sch.add_argument("netlist")
    sch.add_argument("--q", type=int, default=1)
    sch.set_defaults(func=_cmd_schedule, out=None)

    sw = sub.add_parser("sweep", help="run a parameter sweep")
    sw.add_argument("axis", choices=["bitstream-length", "flip-rate",
                                     "subarray-size"])
    sw.add_argument("--app", dest="name", default="lit",
                    choices=[k.value for k in AppKind])
    sw.add_argument("--op", default="mult", choices=[k.value for k in CircuitKind])
    sw.add_argument("--rates", default="0,5,10,15,20",
                    help="flip rates in percent")
    sw.add_argument("--bls", default="64,256,1024")
    sw.add_argument("--sizes", default="16,64,256")
    sw.add_argument("--trials", type=int, default=50)
    sw.add_argument("--input")
    sw.add_argument("--size", "--grid", type=int, default=16, dest="size")
    sw.add_argument("--window", type=int, default=9)
    sw.add_argument("--n-history", type=int, default=8)
    sw.add_argument("--a", type=float, default=0.5)
    sw.add_argument("--b", type=float, default=0.5)
    sw.set_defaults(func=_cmd_sweep)

    rep = sub.add_parser("report", help="regenerate summaries from a run dir")
    rep.add_argument("run_dir", nargs="?", default=".")
    rep.add_argument("--schema", action="store_true",
                     help="print CSV columns and config keys")
    rep.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        bundle = load_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args, bundle)
    except (NetlistError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
