"""Saturating chain state machines and their stationary behavior.

A chain holds N states in a line; an input 1 moves right, a 0 moves left,
saturating at both ends.  Driven by a Bernoulli(px) bitstream the chain is an
ergodic birth-death Markov process whose stationary distribution has the
closed form  P_i proportional to px**i * (1-px)**(N-1-i)  -- the numerically
stable equivalent of powers of the right-to-left transit ratio
t = px / (1 - px).  A power-iteration oracle on the explicit transition
matrix is provided as an independent cross-check.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .core import check_probability, gate_keys


class ChainFsm:
    """Saturating N-state chain with a current state index."""

    __slots__ = ("n_states", "state")

    def __init__(self, n_states: int, state: int = 0):
        if n_states < 2:
            raise ValueError("a chain needs at least 2 states")
        if not 0 <= state < n_states:
            raise ValueError(f"state {state} outside [0, {n_states - 1}]")
        self.n_states = int(n_states)
        self.state = int(state)

    def step(self, bit: int) -> int:
        """Advance one transition; returns the new state index."""
        if bit:
            if self.state + 1 < self.n_states:
                self.state += 1
        elif self.state > 0:
            self.state -= 1
        return self.state

    def reset(self, state: int = 0):
        if not 0 <= state < self.n_states:
            raise ValueError(f"state {state} outside [0, {self.n_states - 1}]")
        self.state = int(state)

    def __repr__(self):
        return f"ChainFsm(n_states={self.n_states}, state={self.state})"


def fsm_step(chain: ChainFsm, bit: int) -> ChainFsm:
    """Functional alias for :meth:`ChainFsm.step`; returns the chain."""
    chain.step(bit)
    return chain


def transition_matrix(n_states: int, px) -> np.ndarray:
    """Row-stochastic transition matrix of the driven chain."""
    if n_states < 2:
        raise ValueError("a chain needs at least 2 states")
    px = check_probability(px, "px")
    t = np.zeros((n_states, n_states))
    for i in range(n_states):
        right = min(i + 1, n_states - 1)
        left = max(i - 1, 0)
        t[i, right] += px
        t[i, left] += 1.0 - px
    return t


def chain_steady_probs(n_states: int, px) -> np.ndarray:
    """Stationary state probabilities in closed form.

    Valid on the closed interval: px = 0 or 1 yields the limiting point mass
    on the corresponding end state, with no ratio singularity.
    """
    if n_states < 2:
        raise ValueError("a chain needs at least 2 states")
    px = check_probability(px, "px")
    i = np.arange(n_states)
    w = np.power(px, i) * np.power(1.0 - px, n_states - 1 - i)
    return w / w.sum()


def steady_probs_oracle(n_states: int, px, tol: float = 1e-13,
                        max_iter: int = 10**6) -> np.ndarray:
    """Stationary distribution by power iteration on the transition matrix.

    Independent of the closed form; iterates until successive vectors differ
    by less than ``tol`` in max norm.
    """
    px = float(px)
    if not 0.0 < px < 1.0:
        raise ValueError("the power-iteration oracle requires 0 < px < 1")
    t = transition_matrix(n_states, px)
    v = np.full(n_states, 1.0 / n_states)
    for _ in range(max_iter):
        nxt = v @ t
        if np.abs(nxt - v).max() < tol:
            return nxt / nxt.sum()
        v = nxt
    raise RuntimeError(f"power iteration did not converge in {max_iter} iterations")


def tanh_fsm_output(n_states: int, px) -> float:
    """Stationary output of a chain emitting 1 on its upper half of states.

    Requires an even state count.  For n_states = 2 this reduces to the
    identity: the output equals px.
    """
    if n_states % 2 != 0:
        raise ValueError("the half-split output needs an even state count")
    probs = chain_steady_probs(n_states, px)
    return float(probs[n_states // 2:].sum())


def simulate_occupancy(n_states: int, px, steps: int, burn_in: int = 0,
                       master_seed: int = 0, rng_kind: str = "independent",
                       initial_state: int = 0, impl=None) -> np.ndarray:
    """Per-state visit counts over ``steps`` recorded transitions."""
    px = check_probability(px, "px")
    mode, input_keys, output_keys = gate_keys(rng_kind, master_seed, 1, n_states)
    _, counts, _ = kernels.simulate(
        mode, input_keys, output_keys,
        np.array([px]), np.zeros(n_states),
        np.array([n_states]), np.array([initial_state]),
        burn_in, steps, impl=impl)
    return counts
