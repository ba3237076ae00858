"""The multivariate radix-coded generator.

M input gates drive M saturating chains; the concatenated chain states form a
radix-N codeword t that selects one of N**M output gates, whose bit is the
machine output for that clock.  Because the chains are independent, the
stationary codeword distribution is the outer product of the per-chain
distributions, which gives the machine's exact expected output for any input
tuple: the weight table averaged under the joint stationary law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    DEFAULT_SEED,
    MODE_LOWDISC,
    AffineMap,
    check_probability,
    counter_draw,
    gate_keys,
    lowdisc_draw,
)
from .fsm import chain_steady_probs

MAX_TABLE_SIZE = 4096


def _radices(n_states, arity=None):
    """Normalize an int or per-chain sequence of state counts."""
    if np.isscalar(n_states):
        if arity is None:
            raise ValueError("arity required with a scalar state count")
        radices = (int(n_states),) * arity
    else:
        radices = tuple(int(n) for n in n_states)
        if arity is not None and len(radices) != arity:
            raise ValueError(f"got {len(radices)} state counts for arity {arity}")
    if not radices:
        raise ValueError("need at least one chain")
    for n in radices:
        if n < 2:
            raise ValueError("every chain needs at least 2 states")
    return radices


def codeword_index(digits, n_states) -> int:
    """Flat index of a codeword; digit 1 (the first) is least significant.

    For uniform N this is sum_j digit_j * N**(j-1); per-chain radices follow
    the same mixed-radix rule.
    """
    digits = list(digits)
    radices = _radices(n_states, len(digits))
    t = 0
    for j in range(len(digits) - 1, -1, -1):
        d = int(digits[j])
        if not 0 <= d < radices[j]:
            raise ValueError(f"digit {j + 1} = {d} outside [0, {radices[j] - 1}]")
        t = t * radices[j] + d
    return t


def codeword_digits(index: int, n_states, arity=None):
    """Inverse of :func:`codeword_index`; returns the digit tuple."""
    radices = _radices(n_states, arity)
    size = math.prod(radices)
    if not 0 <= index < size:
        raise ValueError(f"codeword index {index} outside [0, {size - 1}]")
    digits = []
    for n in radices:
        digits.append(index % n)
        index //= n
    return tuple(digits)


def joint_steady_probs(n_states, pxs) -> np.ndarray:
    """Stationary codeword distribution, laid out by :func:`codeword_index`.

    The chains are independent, so this is the outer product of the
    univariate stationary vectors; it sums to 1.
    """
    pxs = list(pxs)
    radices = _radices(n_states, len(pxs))
    vecs = [chain_steady_probs(n, p) for n, p in zip(radices, pxs)]
    flat = vecs[-1]
    for v in reversed(vecs[:-1]):
        flat = np.kron(flat, v)
    return flat


@dataclass(eq=False)
class WeightTable:
    """The synthesized artifact: output-gate thresholds in codeword order.

    Thresholds are probabilities; the table length is exactly the codeword
    count.  Metadata records how the table was produced and which affine
    maps connect machine units to the target's native units.
    """

    n_states: int
    arity: int
    weights: np.ndarray
    target_name: str = ""
    expression: str | None = None
    input_maps: list[AffineMap] | None = None
    output_map: AffineMap | None = None
    grid_resolution: int | None = None
    solver_info: dict | None = None
    master_seed: int | None = None

    def __post_init__(self):
        self.n_states = int(self.n_states)
        self.arity = int(self.arity)
        if self.n_states < 2:
            raise ValueError("n_states must be >= 2")
        if self.arity < 1:
            raise ValueError("arity must be >= 1")
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 1:
            raise ValueError("weights must be a flat vector")
        expected = self.n_states ** self.arity
        if self.weights.size != expected:
            raise ValueError(
                f"weight table must have {expected} entries, got {self.weights.size}")
        if np.any(self.weights < 0.0) or np.any(self.weights > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        if self.input_maps is not None and len(self.input_maps) != self.arity:
            raise ValueError("need one input map per variable")

    @property
    def n_codewords(self) -> int:
        return self.weights.size

    def radices(self):
        return (self.n_states,) * self.arity


def smurf_expected_output(table: WeightTable, pxs) -> float:
    """Analytic (infinite-bitstream) output at an input tuple."""
    pxs = list(pxs)
    if len(pxs) != table.arity:
        raise ValueError(f"expected {table.arity} inputs, got {len(pxs)}")
    probs = joint_steady_probs(table.radices(), pxs)
    return float(probs @ table.weights)


class SmurfMachine:
    """Cycle-steppable generator: chains, weight table, and gate wiring.

    One instance is single-owner while stepping; distinct machines never
    share draw state.  ``run`` is a pure function of its arguments: it
    restarts from the initial states and replays the gate sequences for the
    given (or stored) seed.

    rng_kind "lowdisc" wires every gate to the scrambled bit-reversed
    counter; that stratifies each gate's marginal stream but makes the chain
    inputs quasi-periodic, so it is a tool for studying single gates rather
    than a default machine driver.  rng_kind "lagged" shares one sequence
    across gates with one extra delay per gate position, faithfully modeling
    a single generator branched into delay taps; neighboring chains then see
    serially correlated bits (with equal thresholds, identical bits one
    cycle apart), which biases long-run output slightly away from the
    independent-chain analytics of :func:`smurf_expected_output`.
    """

    def __init__(self, weights, n_states, arity=None, rng_kind="independent",
                 master_seed=DEFAULT_SEED, burn_in=0, initial_states=None):
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if np.any(weights < 0.0) or np.any(weights > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        radices = _radices(n_states, arity)
        size = math.prod(radices)
        if size > MAX_TABLE_SIZE:
            raise ValueError(f"codeword count {size} exceeds {MAX_TABLE_SIZE}")
        if weights.size != size:
            raise ValueError(f"weight table must have {size} entries, got {weights.size}")
        if burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        if initial_states is None:
            initial_states = (0,) * len(radices)
        initial_states = tuple(int(s) for s in initial_states)
        if len(initial_states) != len(radices):
            raise ValueError("need one initial state per chain")
        for s, n in zip(initial_states, radices):
            if not 0 <= s < n:
                raise ValueError(f"initial state {s} outside [0, {n - 1}]")
        self.weights = weights
        self.radices = radices
        self.arity = len(radices)
        self.rng_kind = rng_kind
        self.master_seed = int(master_seed)
        self.burn_in = int(burn_in)
        self.initial_states = initial_states
        self._mode, self._input_keys, self._output_keys = gate_keys(
            rng_kind, self.master_seed, self.arity, size)
        self._input_key_ints = [int(k) for k in self._input_keys]
        self._output_key_ints = [int(k) for k in self._output_keys]
        self.reset()

    @classmethod
    def from_table(cls, table: WeightTable, **kwargs):
        kwargs.setdefault("master_seed", table.master_seed or DEFAULT_SEED)
        return cls(table.weights, table.radices(), **kwargs)

    def reset(self, states=None):
        """Return every chain to its initial (or given) state, cycle 0."""
        if states is None:
            states = self.initial_states
        states = [int(s) for s in states]
        for s, n in zip(states, self.radices):
            if not 0 <= s < n:
                raise ValueError(f"state {s} outside [0, {n - 1}]")
        self.states = states
        self._cycle = 0

    def _draw(self, key: int, index: int) -> float:
        if self._mode == MODE_LOWDISC:
            return lowdisc_draw(key, index)
        return counter_draw(key, index)

    def step(self, pxs) -> int:
        """Advance one clock: sample inputs, step chains, emit one bit."""
        pxs = [check_probability(p, "input") for p in pxs]
        if len(pxs) != self.arity:
            raise ValueError(f"expected {self.arity} inputs, got {len(pxs)}")
        c = self._cycle
        for j in range(self.arity):
            u = self._draw(self._input_key_ints[j], c)
            if u < pxs[j]:
                if self.states[j] + 1 < self.radices[j]:
                    self.states[j] += 1
            elif self.states[j] > 0:
                self.states[j] -= 1
        t = 0
        for j in range(self.arity - 1, -1, -1):
            t = t * self.radices[j] + self.states[j]
        u = self._draw(self._output_key_ints[t], c)
        self._cycle += 1
        return 1 if u < self.weights[t] else 0

    def _run_counts(self, pxs, length, seed=None, burn_in=None, impl=None):
        pxs = np.array([check_probability(p, "input") for p in pxs])
        if pxs.size != self.arity:
            raise ValueError(f"expected {self.arity} inputs, got {pxs.size}")
        if length < 1:
            raise ValueError("bitstream length must be >= 1")
        if seed is None:
            mode, ikeys, okeys = self._mode, self._input_keys, self._output_keys
        else:
            mode, ikeys, okeys = gate_keys(
                self.rng_kind, int(seed), self.arity, self.weights.size)
        ones, counts, _ = kernels.simulate(
            mode, ikeys, okeys, pxs, self.weights,
            np.array(self.radices), np.array(self.initial_states),
            self.burn_in if burn_in is None else int(burn_in),
            int(length), impl=impl)
        return ones, counts

    def run(self, pxs, length, seed=None, burn_in=None, impl=None) -> float:
        """Mean of ``length`` recorded output bits after the burn-in.

        Starts from the initial states; deterministic for a fixed seed.
        """
        ones, _ = self._run_counts(pxs, length, seed, burn_in, impl)
        return ones / int(length)

    def run_with_counts(self, pxs, length, seed=None, burn_in=None, impl=None):
        """Like :meth:`run` but also returns recorded codeword visit counts."""
        ones, counts = self._run_counts(pxs, length, seed, burn_in, impl)
        return ones / int(length), counts

    def expected_output(self, pxs) -> float:
        """Analytic stationary output at an input tuple."""
        pxs = list(pxs)
        if len(pxs) != self.arity:
            raise ValueError(f"expected {self.arity} inputs, got {len(pxs)}")
        probs = joint_steady_probs(self.radices, pxs)
        return float(probs @ self.weights)


def smurf_step(machine: SmurfMachine, pxs) -> int:
    """Functional alias for :meth:`SmurfMachine.step`."""
    return machine.step(pxs)


def smurf_run(machine: SmurfMachine, pxs, length, seed=None) -> float:
    """Functional alias for :meth:`SmurfMachine.run`."""
    return machine.run(pxs, length, seed=seed)
