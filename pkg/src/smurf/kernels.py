"""Cycle-accurate simulation kernels.

The hot loop steps M saturating chains, forms the radix codeword, and samples
the selected output gate, one output bit per clock.  Two interchangeable
implementations are provided:

* a numba ``@njit`` kernel (default when numba imports), and
* a pure-numpy path that bulk-generates all draws and reconstructs the chain
  trajectories with a logarithmic scan over clamp-and-add maps.

Both consume draws at identical (key, cycle) addresses, so their outputs are
bit-identical.  Set ``SMURF_NO_NUMBA=1`` to force the numpy path; it is also
used automatically when numba is unavailable.  ``benchmarks/bench_kernels.py``
times the two side by side.
"""

from __future__ import annotations

import os

import numpy as np

from .core import GOLDEN_GAMMA, MODE_COUNTER, bitrev64_array, mix64_array

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


_ENV_FLAG = "SMURF_NO_NUMBA"

_U = np.uint64
_GAMMA = _U(GOLDEN_GAMMA)
_MUL1 = _U(0xBF58476D1CE4E5B9)
_MUL2 = _U(0x94D049BB133111EB)
_S30 = _U(30)
_S27 = _U(27)
_S31 = _U(31)
_S11 = _U(11)
_INV53 = 1.0 / 9007199254740992.0

_RM1 = _U(0x5555555555555555)
_RM2 = _U(0x3333333333333333)
_RM4 = _U(0x0F0F0F0F0F0F0F0F)
_RM8 = _U(0x00FF00FF00FF00FF)
_RM16 = _U(0x0000FFFF0000FFFF)
_S1 = _U(1)
_S2 = _U(2)
_S4 = _U(4)
_S8 = _U(8)
_S16 = _U(16)
_S32 = _U(32)


def active_impl() -> str:
    """Which kernel the dispatcher will pick right now: 'numba' or 'numpy'."""
    if os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on"):
        return "numpy"
    return "numba" if HAVE_NUMBA else "numpy"


@njit(cache=True)
def _mix64_nb(z):
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


@njit(cache=True)
def _bitrev64_nb(z):
    z = ((z >> _S1) & _RM1) | ((z & _RM1) << _S1)
    z = ((z >> _S2) & _RM2) | ((z & _RM2) << _S2)
    z = ((z >> _S4) & _RM4) | ((z & _RM4) << _S4)
    z = ((z >> _S8) & _RM8) | ((z & _RM8) << _S8)
    z = ((z >> _S16) & _RM16) | ((z & _RM16) << _S16)
    return (z >> _S32) | (z << _S32)


@njit(cache=True)
def _simulate_nb(mode, input_keys, output_keys, thresholds, weights, radices,
                 init_states, burn_in, length):
    m = input_keys.shape[0]
    n_out = weights.shape[0]
    states = init_states.copy()
    counts = np.zeros(n_out, dtype=np.int64)
    ones = 0
    total = burn_in + length
    for c in range(total):
        k1 = _U(c + 1)
        for j in range(m):
            if mode == 0:
                z = _mix64_nb(input_keys[j] + k1 * _GAMMA)
            else:
                z = _bitrev64_nb(k1) ^ input_keys[j]
            u = np.float64(z >> _S11) * _INV53
            if u < thresholds[j]:
                if states[j] + 1 < radices[j]:
                    states[j] += 1
            else:
                if states[j] > 0:
                    states[j] -= 1
        t = 0
        for j in range(m - 1, -1, -1):
            t = t * radices[j] + states[j]
        if mode == 0:
            z = _mix64_nb(output_keys[t] + k1 * _GAMMA)
        else:
            z = _bitrev64_nb(k1) ^ output_keys[t]
        u = np.float64(z >> _S11) * _INV53
        if c >= burn_in:
            counts[t] += 1
            if u < weights[t]:
                ones += 1
    return ones, counts, states


def _clamped_walk(steps: np.ndarray, start: int, hi: int) -> np.ndarray:
    """State after each +/-1 step of a counter saturating at 0 and ``hi``.

    Each step is the map s -> min(hi, max(0, s + a)).  Such clamp-and-add
    maps compose into maps of the same three-parameter shape, so all state
    prefixes are recovered with a log2(n)-pass doubling scan instead of a
    sequential loop.
    """
    a = steps.astype(np.int64, copy=True)
    lo_arr = np.zeros_like(a)
    hi_arr = np.full_like(a, hi)
    n = a.size
    d = 1
    while d < n:
        a_head = a[:-d]
        a_tail = a[d:]
        lo_head = lo_arr[:-d]
        lo_tail = lo_arr[d:]
        hi_head = hi_arr[:-d]
        hi_tail = hi_arr[d:]
        new_a = a_head + a_tail
        new_lo = np.maximum(lo_tail, lo_head + a_tail)
        new_hi = np.minimum(hi_tail, np.maximum(lo_tail, hi_head + a_tail))
        a[d:] = new_a
        lo_arr[d:] = new_lo
        hi_arr[d:] = new_hi
        d *= 2
    return np.minimum(hi_arr, np.maximum(lo_arr, start + a))


def _draws_np(mode, key, idx1):
    if mode == MODE_COUNTER:
        z = mix64_array(key + idx1 * _GAMMA)
    else:
        z = bitrev64_array(idx1) ^ key
    return (z >> _S11).astype(np.float64) * _INV53


def _simulate_np(mode, input_keys, output_keys, thresholds, weights, radices,
                 init_states, burn_in, length):
    m = input_keys.shape[0]
    total = burn_in + length
    idx1 = np.arange(1, total + 1, dtype=np.uint64)
    t = np.zeros(total, dtype=np.int64)
    final_states = np.empty(m, dtype=np.int64)
    for j in range(m - 1, -1, -1):
        u = _draws_np(mode, input_keys[j], idx1)
        steps = np.where(u < thresholds[j], 1, -1)
        traj = _clamped_walk(steps, int(init_states[j]), int(radices[j]) - 1)
        final_states[j] = traj[-1]
        t *= int(radices[j])
        t += traj
    if mode == MODE_COUNTER:
        z = mix64_array(output_keys[t] + idx1 * _GAMMA)
    else:
        z = bitrev64_array(idx1) ^ output_keys[t]
    u = (z >> _S11).astype(np.float64) * _INV53
    bits = u < weights[t]
    rec_t = t[burn_in:]
    ones = int(np.count_nonzero(bits[burn_in:]))
    counts = np.bincount(rec_t, minlength=weights.shape[0]).astype(np.int64)
    return ones, counts, final_states


def simulate(mode, input_keys, output_keys, thresholds, weights, radices,
             init_states, burn_in, length, impl=None):
    """Run ``burn_in`` unrecorded plus ``length`` recorded cycles.

    Returns (ones, counts, final_states): the number of recorded output ones,
    per-codeword visit counts over the recorded cycles, and the chain states
    after the last cycle.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    input_keys = np.ascontiguousarray(input_keys, dtype=np.uint64)
    output_keys = np.ascontiguousarray(output_keys, dtype=np.uint64)
    thresholds = np.ascontiguousarray(thresholds, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    radices = np.ascontiguousarray(radices, dtype=np.int64)
    init_states = np.ascontiguousarray(init_states, dtype=np.int64)
    if impl is None:
        impl = active_impl()
    if impl == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba kernel requested but numba is not importable")
        ones, counts, states = _simulate_nb(
            mode, input_keys, output_keys, thresholds, weights, radices,
            init_states, burn_in, length)
    elif impl == "numpy":
        ones, counts, states = _simulate_np(
            mode, input_keys, output_keys, thresholds, weights, radices,
            init_states, burn_in, length)
    else:
        raise ValueError(f"unknown kernel implementation {impl!r}")
    return int(ones), np.asarray(counts, dtype=np.int64), np.asarray(states, dtype=np.int64)
