#!/usr/bin/env python3
"""Lifetime and wear comparison of bit-parallel vs bit-serial execution,
per application."""

import argparse
from dataclasses import replace

from stoch_imc.apps import AppKind, synthetic_input
from stoch_imc.bitstream import RandomSource
from stoch_imc.config import load_config
from stoch_imc.reliability import lifetime_compare

REDUCED = {
    AppKind.HDP: dict(),
    AppKind.OL: dict(size=8),
    AppKind.LIT: dict(size=8, window=3),
    AppKind.KDE: dict(size=4, n_history=4),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    cfg = load_config(args.config).arch
    serial = replace(cfg, mode="bit-serial")
    print(f"{'app':5} {'lifetime-ratio':>14} {'wear-ratio':>11}")
    for kind, kw in REDUCED.items():
        app = synthetic_input(kind, seed=args.seed, **kw)
        score, wear = lifetime_compare(app, cfg, serial,
                                       RandomSource(args.seed, 112))
        print(f"{kind.value:5} {score:14.1f} {wear:11.1f}")


if __name__ == "__main__":
    main()
