#!/usr/bin/env python3
"""Bitflip fault-rate sweep over the four applications; emits plot-ready CSV."""

import argparse
import sys

from stoch_imc.apps import AppKind, synthetic_input
from stoch_imc.bitstream import RandomSource
from stoch_imc.config import load_config
from stoch_imc.reliability import DEFAULT_RATES, error_sweep, sweep_csv

REDUCED = {
    AppKind.HDP: dict(),
    AppKind.OL: dict(size=16),
    AppKind.LIT: dict(size=16, window=9),
    AppKind.KDE: dict(size=6, n_history=8),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--apps", default="hdp,ol,lit,kde")
    ap.add_argument("--out", default="flip_rate_sweep.csv")
    args = ap.parse_args(argv)

    cfg = load_config(args.config).arch
    results = []
    for name in args.apps.split(","):
        kind = AppKind(name)
        app = synthetic_input(kind, seed=args.seed, **REDUCED[kind])
        res = error_sweep(app, cfg, RandomSource(args.seed, 110),
                          rates=DEFAULT_RATES, trials=args.trials)
        results.append(res)
        print(f"{kind.value}: " + "  ".join(
            f"{r:.0%}->{m:.2f}%" for r, m in zip(res.rates, res.mean_error)),
            file=sys.stderr)
    with open(args.out, "w", newline="") as fh:
        fh.write(sweep_csv(results))
    print(f"wrote {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
