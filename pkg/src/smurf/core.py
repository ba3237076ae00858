"""Stochastic-computing primitives: random sources, comparator gates, bitstreams.

A stochastic number (SN) is a value in [0, 1] carried as the mean of a random
binary bitstream.  Every random draw in this package comes from one 64-bit
shift/mix generator addressed by a (key, draw index) pair instead of by
mutable hidden state.  Because any draw can be recomputed from its address,
the accelerated kernels (kernels.py) replay exactly the sequences the pure
Python paths produce, and a bank of gates can be sampled at cycle c without
ever advancing the gates that were not selected.

Draws lie in [0, 1) and comparator gates use strict ``draw < threshold``, so
threshold 1 always fires and threshold 0 never does.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MASK64 = (1 << 64) - 1

# Odd increments for the counter and for separating streams under one seed.
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
STREAM_GAMMA = 0xD1B54A32D192ED03

_MIX_MUL_1 = 0xBF58476D1CE4E5B9
_MIX_MUL_2 = 0x94D049BB133111EB

# Scale for turning the top 53 bits of a word into a float in [0, 1).
_INV_2_53 = 1.0 / 9007199254740992.0

RNG_KINDS = ("independent", "lagged", "lowdisc")

# Draw-address modes shared with kernels.py.
MODE_COUNTER = 0
MODE_LOWDISC = 1

DEFAULT_SEED = 0x5EED0F5EED0F5EED


def check_probability(value, name="probability"):
    """Validate ``value`` in [0, 1] and return it as a float."""
    v = float(value)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return v


def mix64(x: int) -> int:
    """64-bit shift/mix finalizer (SplitMix64 constants)."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * _MIX_MUL_1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_MUL_2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64` over a uint64 array."""
    z = np.asarray(x, dtype=np.uint64).copy()
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX_MUL_1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX_MUL_2)
    z ^= z >> np.uint64(31)
    return z


def bitrev64(x: int) -> int:
    """Reverse the 64 bits of ``x``."""
    x &= MASK64
    x = ((x >> 1) & 0x5555555555555555) | ((x & 0x5555555555555555) << 1)
    x = ((x >> 2) & 0x3333333333333333) | ((x & 0x3333333333333333) << 2)
    x = ((x >> 4) & 0x0F0F0F0F0F0F0F0F) | ((x & 0x0F0F0F0F0F0F0F0F) << 4)
    x = ((x >> 8) & 0x00FF00FF00FF00FF) | ((x & 0x00FF00FF00FF00FF) << 8)
    x = ((x >> 16) & 0x0000FFFF0000FFFF) | ((x & 0x0000FFFF0000FFFF) << 16)
    return ((x >> 32) | (x << 32)) & MASK64


def bitrev64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`bitrev64` over a uint64 array."""
    z = np.asarray(x, dtype=np.uint64).copy()
    m1 = np.uint64(0x5555555555555555)
    m2 = np.uint64(0x3333333333333333)
    m4 = np.uint64(0x0F0F0F0F0F0F0F0F)
    m8 = np.uint64(0x00FF00FF00FF00FF)
    m16 = np.uint64(0x0000FFFF0000FFFF)
    z = ((z >> np.uint64(1)) & m1) | ((z & m1) << np.uint64(1))
    z = ((z >> np.uint64(2)) & m2) | ((z & m2) << np.uint64(2))
    z = ((z >> np.uint64(4)) & m4) | ((z & m4) << np.uint64(4))
    z = ((z >> np.uint64(8)) & m8) | ((z & m8) << np.uint64(8))
    z = ((z >> np.uint64(16)) & m16) | ((z & m16) << np.uint64(16))
    return (z >> np.uint64(32)) | (z << np.uint64(32))


def stream_key(master_seed: int, stream: int) -> int:
    """Key of the ``stream``-th independent draw sequence under one seed."""
    return mix64((master_seed + (stream + 1) * STREAM_GAMMA) & MASK64)


def lagged_key(master_seed: int, lag: int) -> int:
    """Key whose draw k equals draw (k - lag) of the shared master sequence."""
    return (mix64(master_seed) - lag * GOLDEN_GAMMA) & MASK64


def derive_seed(master_seed: int, *parts: int) -> int:
    """Fold integers into a fresh 64-bit sub-seed (order-sensitive).

    Used to give every (grid point, bitstream length) pair of a sweep its own
    reproducible seed, so runs are order-independent and parallelizable.
    """
    s = mix64(master_seed)
    for p in parts:
        s = mix64((s + GOLDEN_GAMMA) ^ ((int(p) * STREAM_GAMMA) & MASK64))
    return s


def counter_draw(key: int, index: int) -> float:
    """Draw ``index`` (0-based) of the counter sequence under ``key``."""
    z = mix64((key + (index + 1) * GOLDEN_GAMMA) & MASK64)
    return (z >> 11) * _INV_2_53


def lowdisc_draw(key: int, index: int) -> float:
    """Draw ``index`` of the bit-reversed low-discrepancy sequence under ``key``.

    The base sequence is the radix-2 digit reversal of the counter (the
    one-dimensional case of direction-number constructions); ``key`` applies a
    digital XOR scramble that preserves equidistribution.
    """
    z = bitrev64((index + 1) & MASK64) ^ key
    return (z >> 11) * _INV_2_53


def counter_draw_block(key: int, start: int, count: int) -> np.ndarray:
    """Draws ``start .. start+count-1`` of a counter sequence, vectorized."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = mix64_array(np.uint64(key & MASK64) + idx * np.uint64(GOLDEN_GAMMA))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


def lowdisc_draw_block(key: int, start: int, count: int) -> np.ndarray:
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = bitrev64_array(idx) ^ np.uint64(key & MASK64)
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


@dataclass
class RngSource:
    """A reproducible uniform source over [0, 1).

    kind
        ``independent``: its own sequence, selected by ``stream``.
        ``lagged``: the shared master sequence delayed by ``lag`` draws, so a
        bank of sources emulates one generator branched into delayed taps.
        ``lowdisc``: XOR-scrambled bit-reversed counter (equidistributed;
        one-dimensional direction numbers only).

    Same (kind, master_seed, stream, lag) always reproduces the same draws.
    A source is value-like but must not be advanced from two threads at once.
    """

    kind: str
    master_seed: int = DEFAULT_SEED
    stream: int = 0
    lag: int = 0
    _key: int = field(init=False, repr=False)
    _index: int = field(init=False, repr=False, default=0)

    def __post_init__(self):
        if self.kind not in RNG_KINDS:
            raise ValueError(f"unknown rng kind {self.kind!r}; expected one of {RNG_KINDS}")
        if self.lag < 0:
            raise ValueError("lag must be nonnegative")
        if self.kind == "lagged":
            self._key = lagged_key(self.master_seed, self.lag)
        else:
            self._key = stream_key(self.master_seed, self.stream)
        self._index = 0

    @classmethod
    def independent(cls, master_seed=DEFAULT_SEED, stream=0):
        return cls("independent", master_seed, stream=stream)

    @classmethod
    def lagged(cls, master_seed=DEFAULT_SEED, lag=0):
        return cls("lagged", master_seed, lag=lag)

    @classmethod
    def lowdisc(cls, master_seed=DEFAULT_SEED, stream=0):
        return cls("lowdisc", master_seed, stream=stream)

    def draw_at(self, index: int) -> float:
        """Draw at an absolute position without touching the cursor."""
        if self.kind == "lowdisc":
            return lowdisc_draw(self._key, index)
        return counter_draw(self._key, index)

    def next(self) -> float:
        """Next draw in [0, 1); advances the cursor by one."""
        u = self.draw_at(self._index)
        self._index += 1
        return u

    def draw_block(self, count: int) -> np.ndarray:
        """Next ``count`` draws as a float64 array; advances the cursor."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        if self.kind == "lowdisc":
            block = lowdisc_draw_block(self._key, self._index, count)
        else:
            block = counter_draw_block(self._key, self._index, count)
        self._index += count
        return block


def rng_next(source: RngSource) -> float:
    """Functional alias for :meth:`RngSource.next`."""
    return source.next()


def theta_bit(draw: float, threshold: float) -> int:
    """Comparator: 1 iff ``draw < threshold``."""
    return 1 if draw < threshold else 0


@dataclass
class ThetaGate:
    """A comparator gate emitting Bernoulli(threshold) bits, one per draw."""

    threshold: float
    source: RngSource

    def __post_init__(self):
        self.threshold = check_probability(self.threshold, "threshold")

    def sample(self) -> int:
        return theta_bit(self.source.next(), self.threshold)


def theta_sample(gate: ThetaGate) -> int:
    """Sample one bit from a gate; consumes exactly one draw."""
    return gate.sample()


def generate_bitstream(threshold, source: RngSource, length: int) -> np.ndarray:
    """``length`` comparator samples as a uint8 0/1 array.

    The stream mean converges to ``threshold`` as the length grows.
    """
    threshold = check_probability(threshold, "threshold")
    if length < 1:
        raise ValueError("bitstream length must be >= 1")
    return (source.draw_block(length) < threshold).astype(np.uint8)


def bitstream_mean(bits) -> float:
    """Fraction of ones in a bitstream."""
    arr = np.asarray(bits)
    if arr.size < 1:
        raise ValueError("bitstream must contain at least one bit")
    return float(np.count_nonzero(arr)) / arr.size


def _check_same_length(x, y):
    if x.shape != y.shape:
        raise ValueError(f"bitstream lengths differ: {x.shape} vs {y.shape}")


def sc_multiply(x, y) -> np.ndarray:
    """Bitwise AND; multiplies the SN values of independent streams."""
    x = np.asarray(x, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    _check_same_length(x, y)
    return x & y


def sc_scaled_add(x, y, select) -> np.ndarray:
    """Per-bit MUX: take x where select=1 else y.

    With a half-rate select stream independent of both inputs, the output SN
    is (P_x + P_y) / 2; the halving is undone downstream by a left shift.
    """
    x = np.asarray(x, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    s = np.asarray(select, dtype=np.uint8)
    _check_same_length(x, y)
    _check_same_length(x, s)
    return np.where(s != 0, x, y).astype(np.uint8)


@dataclass(frozen=True)
class AffineMap:
    """Bijective linear map between [lo, hi] and the unit interval."""

    lo: float
    hi: float

    def __post_init__(self):
        lo = float(self.lo)
        hi = float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError("map endpoints must be finite")
        if not lo < hi:
            raise ValueError(f"map requires lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def forward(self, x):
        """Map x in [lo, hi] to [0, 1]. Out-of-range input is an error."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lo) or np.any(x > self.hi):
            raise ValueError(f"value outside domain [{self.lo}, {self.hi}]")
        out = (x - self.lo) / self.span
        return float(out) if out.ndim == 0 else out

    def backward(self, p):
        """Map p in [0, 1] back to [lo, hi]. Out-of-range input is an error."""
        p = np.asarray(p, dtype=float)
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("unit value outside [0, 1]")
        out = self.lo + p * self.span
        return float(out) if out.ndim == 0 else out

    def forward_unchecked(self, x):
        """Forward map without the domain check.

        For wrapping targets whose sampled output box can be overshot between
        sample points by curvature-of-grid error.
        """
        x = np.asarray(x, dtype=float)
        out = (x - self.lo) / self.span
        return float(out) if out.ndim == 0 else out


UNIT_MAP = AffineMap(0.0, 1.0)


def map_to_unit(x, m: AffineMap):
    """Functional alias for :meth:`AffineMap.forward`."""
    return m.forward(x)


def map_from_unit(p, m: AffineMap):
    """Functional alias for :meth:`AffineMap.backward`."""
    return m.backward(p)


def gate_keys(kind: str, master_seed: int, n_inputs: int, n_outputs: int):
    """Draw keys for a machine's gate bank: input gates first, then outputs.

    independent: gate g uses stream g.  lagged: gate g uses lag g, i.e. the
    master sequence delayed by one extra draw per gate position.  lowdisc:
    gate g uses scramble stream g over the bit-reversed counter.

    Returns (mode, input_keys, output_keys) with uint64 key arrays.
    """
    if kind not in RNG_KINDS:
        raise ValueError(f"unknown rng kind {kind!r}; expected one of {RNG_KINDS}")
    total = n_inputs + n_outputs
    if kind == "lagged":
        keys = [lagged_key(master_seed, g) for g in range(total)]
        mode = MODE_COUNTER
    else:
        keys = [stream_key(master_seed, g) for g in range(total)]
        mode = MODE_COUNTER if kind == "independent" else MODE_LOWDISC
    keys = np.array(keys, dtype=np.uint64)
    return mode, keys[:n_inputs].copy(), keys[n_inputs:].copy()
