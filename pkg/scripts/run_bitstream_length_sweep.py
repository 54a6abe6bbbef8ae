#!/usr/bin/env python3
"""Accuracy vs bitstream length for one application; emits plot-ready CSV."""

import argparse
import sys
from dataclasses import replace

import numpy as np

from stoch_imc.apps import AppKind, stochastic_eval, synthetic_input
from stoch_imc.bitstream import RandomSource
from stoch_imc.config import load_config

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
    ap.add_argument("--app", default="hdp", choices=[k.value for k in AppKind])
    ap.add_argument("--bls", default="32,64,128,256,512,1024")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--out", default="bitstream_length_sweep.csv")
    args = ap.parse_args(argv)

    cfg = load_config(args.config).arch
    kind = AppKind(args.app)
    app = synthetic_input(kind, seed=args.seed, **REDUCED[kind])
    src = RandomSource(args.seed, 111)
    lines = ["app,bitstream_length,mean_error,stderr,trials"]
    for bl in (int(b) for b in args.bls.split(",")):
        cfg_bl = replace(cfg, bitstream_length=bl)
        maes = [stochastic_eval(app, cfg_bl, src.child("bl", bl, t),
                                with_arch=False).mae_percent
                for t in range(args.trials)]
        mean = float(np.mean(maes))
        se = float(np.std(maes, ddof=1) / np.sqrt(len(maes)))
        lines.append(f"{kind.value},{bl},{mean},{se},{args.trials}")
        print(f"BL={bl:5d}  mae={mean:.3f}% +/- {se:.3f}", file=sys.stderr)
    with open(args.out, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
