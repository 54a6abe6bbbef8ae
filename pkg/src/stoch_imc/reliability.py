"""Bitflip fault injection at arithmetic-op boundaries, error-rate sweeps,
and lifetime comparison between execution modes.

Injection happens post-generation at op I/O nodes (never inside gates).  A
sweep trial draws one boundary node uniformly at random and flips its bits
i.i.d. at the configured rate; flipping every node of a deep composition
simultaneously compounds multiplicatively and swamps any output, which is
inconsistent with the small reported degradations this model targets (e.g. an
output-node flip alone shifts a decoded value v by rate*(1-2v)).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .apps import AppInput, AppKind, AppResult, stochastic_eval
from .arch import ArchConfig, lifetime_score
from .bitstream import Bitstream, RandomSource

__all__ = [
    "FaultSpec",
    "SweepResult",
    "ReliabilityError",
    "DEFAULT_RATES",
    "inject_bitflips",
    "error_sweep",
    "lifetime_compare",
    "sweep_csv",
]

DEFAULT_RATES = (0.0, 0.05, 0.10, 0.15, 0.20)


class ReliabilityError(ValueError):
    pass


@dataclass(frozen=True)
class FaultSpec:
    """Bit-level fault model: each targeted bit flips independently.

    `targets` of None means every boundary node is eligible; otherwise only
    the named nodes are perturbed.
    """

    rate: float
    source: RandomSource
    targets: frozenset[str] | None = None

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ReliabilityError(f"flip rate out of range: {self.rate}")


def inject_bitflips(
    streams: dict[str, Bitstream],
    spec: FaultSpec,
) -> dict[str, Bitstream]:
    """Flip each targeted bit with probability `spec.rate`, deterministically."""
    if spec.targets is not None:
        unknown = spec.targets - set(streams)
        if unknown:
            raise ReliabilityError(f"unknown fault target(s): {sorted(unknown)}")
    out = {}
    for name, bs in streams.items():
        if spec.targets is not None and name not in spec.targets:
            out[name] = bs
            continue
        u = spec.source.child("flip", name).uniforms(len(bs))
        flipped = (bs.bits ^ (u < spec.rate)).astype(np.uint8)
        out[name] = Bitstream(flipped, lineage=bs.lineage)
    return out


@dataclass
class SweepResult:
    app: AppKind
    rates: tuple[float, ...]
    mean_error: tuple[float, ...]     # percent of full scale
    std_error: tuple[float, ...]      # standard error of the mean
    trials: int

    def __post_init__(self):
        if self.trials < 30:
            raise ReliabilityError("sweep needs at least 30 trials per point")

    def rows(self):
        for r, m, s in zip(self.rates, self.mean_error, self.std_error):
            yield {"app": self.app.value, "rate": r, "mean_error": m,
                   "stderr": s, "trials": self.trials}


def error_sweep(
    app: AppInput,
    cfg: ArchConfig,
    source: RandomSource,
    rates=DEFAULT_RATES,
    trials: int = 50,
    with_arch: bool = False,
) -> SweepResult:
    """Mean absolute output error (percent of [0,1] full scale) per flip rate.

    Each trial perturbs one uniformly chosen arithmetic-op boundary node; the
    fault propagates through every downstream decode-regenerate stage.  A
    trial reuses the same data streams and the same targeted node at every
    rate (common random numbers), so the per-rate means differ only through
    the fault strength.
    """
    # the node set is a property of the composition, not of the trial
    probe = stochastic_eval(app, cfg, source.child("probe"), with_arch=False)
    nodes = probe.trace_names()
    if not nodes:
        raise ReliabilityError("application exposes no fault-injection nodes")

    means, stderrs = [], []
    kind = probe.kind
    for rate in rates:
        errors = np.empty(trials)
        for t in range(trials):
            fault = None
            if rate > 0.0:
                pick = int(source.child("pick", t).generator()
                           .integers(0, len(nodes)))
                fault = FaultSpec(rate=rate,
                                  source=source.child("fault", t, rate),
                                  targets=frozenset([nodes[pick]]))
            res = stochastic_eval(app, cfg, source.child("data", t),
                                  fault=fault, with_arch=with_arch)
            errors[t] = res.mae_percent
        means.append(float(errors.mean()))
        stderrs.append(float(errors.std(ddof=1) / np.sqrt(trials)))
    return SweepResult(app=kind, rates=tuple(rates), mean_error=tuple(means),
                       std_error=tuple(stderrs), trials=trials)


def sweep_csv(results: list[SweepResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["app", "rate", "mean_error", "stderr",
                                        "trials"])
    w.writeheader()
    for res in results:
        for row in res.rows():
            w.writerow(row)
    return buf.getvalue()


def lifetime_compare(
    app: AppInput,
    cfg_parallel: ArchConfig,
    cfg_serial: ArchConfig,
    source: RandomSource,
):
    """(lifetime-score ratio, max-per-cell write ratio), parallel over serial."""
    res_p = stochastic_eval(app, cfg_parallel, source, with_arch=True)
    res_s = stochastic_eval(app, cfg_serial, source, with_arch=True)
    score_p = cfg_parallel.e_max * res_p.totals["utilized_cells"] / res_p.totals["writes"]
    score_s = cfg_serial.e_max * res_s.totals["utilized_cells"] / res_s.totals["writes"]
    wear_ratio = (res_s.totals["max_per_cell_writes"]
                  / max(res_p.totals["max_per_cell_writes"], 1))
    return score_p / score_s, wear_ratio
