"""Stochastic-number core: unipolar bitstreams and their generation/decoding.

All randomness flows through counter-based `RandomSource` streams keyed by
(seed, stream-id), so every experiment replays exactly.  Correlated streams
are produced comparator-style from one shared uniform sequence per lineage
tag; independent streams each get their own derived sub-stream.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mtj import DeviceError, MtjParams, PulseSpec, min_energy_pulse, switching_probability

__all__ = [
    "Bitstream",
    "RandomSource",
    "BtosTable",
    "encode_unipolar",
    "decode_unipolar",
    "mtj_generate",
    "build_btos_table",
]


def _mix(seed: int, *keys) -> int:
    """Stable 64-bit mix of a seed and arbitrary string/int keys."""
    h = hashlib.sha256()
    h.update(str(seed).encode())
    for k in keys:
        h.update(b"\x1f")
        h.update(str(k).encode())
    return int.from_bytes(h.digest()[:8], "little")


@dataclass(frozen=True)
class RandomSource:
    """Deterministic uniform source; identical (seed, stream_id) -> identical draws."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.seed & (2**64 - 1), self.stream_id & (2**64 - 1)])
        return np.random.Generator(np.random.Philox(ss))

    def uniforms(self, n: int) -> np.ndarray:
        return self.generator().random(n)

    def child(self, *keys) -> "RandomSource":
        """Derived independent sub-stream, stable under replay."""
        return RandomSource(self.seed, _mix(self.stream_id, *keys))


class Bitstream:
    """Fixed-length 0/1 sequence with unipolar value semantics.

    `lineage` records the shared uniform source of comparator-generated
    streams; equal-lineage equal-length streams are maximally correlated.
    """

    __slots__ = ("bits", "lineage")

    def __init__(self, bits, lineage: str | None = None):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("bitstream must be a non-empty 1-D sequence")
        if arr.size and arr.max(initial=0) > 1:
            raise ValueError("bitstream entries must be 0/1")
        arr.setflags(write=False)
        self.bits = arr
        self.lineage = lineage

    def __len__(self) -> int:
        return int(self.bits.size)

    @property
    def length(self) -> int:
        return len(self)

    def value(self) -> float:
        return float(self.bits.sum()) / len(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, Bitstream) and np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"Bitstream(len={len(self)}, value={self.value():.4f}, lineage={self.lineage!r})"

    def to_bytes(self) -> bytes:
        """Packed binary with an 8-byte little-endian length header."""
        return struct.pack("<Q", len(self)) + np.packbits(self.bits).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, lineage: str | None = None) -> "Bitstream":
        if len(data) < 8:
            raise ValueError("truncated bitstream blob")
        (n,) = struct.unpack("<Q", data[:8])
        payload = np.frombuffer(data[8:], dtype=np.uint8)
        if payload.size * 8 < n:
            raise ValueError("bitstream blob shorter than header length")
        return cls(np.unpackbits(payload)[:n], lineage=lineage)


def _lineage_uniforms(source: RandomSource, lineage: str, length: int) -> np.ndarray:
    # One uniform sequence per lineage tag: correlation by construction.
    return source.child("lineage", lineage).uniforms(length)


def encode_unipolar(
    p: float,
    length: int,
    source: RandomSource,
    lineage: str | None = None,
) -> Bitstream:
    """Comparator encoding: bit_i = [u_i < p].

    With `lineage` set, the uniforms are shared by every stream of that
    lineage, making equal-lineage streams maximally correlated.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    if length < 1:
        raise ValueError("length must be >= 1")
    if lineage is None:
        u = source.uniforms(length)
    else:
        u = _lineage_uniforms(source, lineage, length)
    return Bitstream((u < p).astype(np.uint8), lineage=lineage)


def decode_unipolar(bs: Bitstream) -> float:
    """Fraction of ones."""
    return bs.value()


@dataclass(frozen=True)
class BtosTable:
    """Binary-to-stochastic lookup: entry k targets probability k / 2^resolution.

    Entry 0 emits no pulse (probability exactly 0).
    """

    resolution: int
    entries: tuple[PulseSpec | None, ...]

    def __post_init__(self):
        if not 1 <= self.resolution <= 16:
            raise ValueError("resolution must be in [1, 16]")
        if len(self.entries) != 2 ** self.resolution:
            raise ValueError("table must have 2^resolution entries")

    def target(self, k: int) -> float:
        return k / 2 ** self.resolution

    def __len__(self) -> int:
        return len(self.entries)


def build_btos_table(
    params: MtjParams,
    resolution: int = 8,
    t_p_grid=None,
) -> BtosTable:
    """Min-energy pulse for every representable probability k / 2^resolution."""
    if not 1 <= resolution <= 16:
        raise ValueError("resolution must be in [1, 16]")
    kwargs = {} if t_p_grid is None else {"t_p_grid": tuple(t_p_grid)}
    entries: list[PulseSpec | None] = [None]
    n = 2 ** resolution
    for k in range(1, n):
        entries.append(min_energy_pulse(params, k / n, **kwargs))
    return BtosTable(resolution=resolution, entries=tuple(entries))


@lru_cache(maxsize=4)
def cached_btos_table(params: MtjParams, resolution: int = 8) -> BtosTable:
    return build_btos_table(params, resolution)


def mtj_generate(
    params: MtjParams,
    table: BtosTable,
    binary_value: int,
    length: int,
    source: RandomSource,
) -> Bitstream:
    """Bernoulli stream drawn through the device model at the table entry's pulse."""
    if not 0 <= binary_value < len(table):
        raise DeviceError(
            f"binary value {binary_value} out of range for resolution {table.resolution}"
        )
    pulse = table.entries[binary_value]
    if pulse is None:
        return Bitstream(np.zeros(length, dtype=np.uint8))
    p = switching_probability(params, pulse)
    u = source.uniforms(length)
    return Bitstream((u < p).astype(np.uint8))
