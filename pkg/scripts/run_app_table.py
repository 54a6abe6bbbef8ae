#!/usr/bin/env python3
"""Run the four benchmark applications on seeded synthetic inputs and print
golden-vs-stochastic accuracy plus bank cost totals."""

import argparse

from stoch_imc.apps import AppKind, stochastic_eval, synthetic_input
from stoch_imc.bitstream import RandomSource
from stoch_imc.config import load_config

REDUCED = {
    AppKind.LIT: dict(size=16, window=9),
    AppKind.OL: dict(size=16),
    AppKind.HDP: dict(),
    AppKind.KDE: dict(size=8, n_history=8),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-arch", action="store_true",
                    help="skip bank cost accounting (faster)")
    args = ap.parse_args(argv)

    cfg = load_config(args.config).arch
    print(f"{'app':5} {'outputs':>7} {'mae%':>7} {'ops':>6} "
          f"{'energy_nJ':>10} {'cycles':>9}")
    for kind, kw in REDUCED.items():
        app = synthetic_input(kind, seed=args.seed, **kw)
        res = stochastic_eval(app, cfg, RandomSource(args.seed, 7),
                              with_arch=not args.no_arch)
        print(f"{kind.value:5} {res.golden.size:7d} {res.mae_percent:7.2f} "
              f"{res.totals['ops']:6d} {res.totals['energy_aj'] / 1e9:10.3f} "
              f"{res.totals['cycles']:9d}")


if __name__ == "__main__":
    main()
