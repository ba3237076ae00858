"""Least-squares synthesis of output-gate thresholds.

The machine's analytic output is linear in its weight vector b, with the
stationary codeword probabilities as basis functions.  Minimizing the squared
L2 distance between the target surface and the machine surface over the unit
hypercube therefore reduces to the quadratic program

    minimize  phi(b) = b' H b + 2 c b,   0 <= b <= 1,

where H is the Gram matrix of the basis under tensor Gauss-Legendre
quadrature and c holds the (negated) target-basis inner products.  The box
constraint reflects that every entry is a gate threshold.  H inherits the
basis' tensor-product structure, so it is assembled exactly as a Kronecker
power of the univariate Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import UNIT_MAP
from .errors import SolverError
from .machine import MAX_TABLE_SIZE, WeightTable

DEFAULT_MAX_ITER = 200_000
DEFAULT_TOL = 1e-10
_POLISH_EVERY = 250
_RESIDUAL_LIMIT = 1e-8


def default_resolution(dims: int) -> int:
    """Quadrature nodes per dimension: 33 up to 2-D, 17 at 3-D, 9 beyond."""
    if dims <= 2:
        return 33
    if dims == 3:
        return 17
    return 9


def gauss_legendre_unit(resolution: int):
    """Gauss-Legendre nodes and weights on [0, 1]; weights sum to 1."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    x, w = np.polynomial.legendre.leggauss(resolution)
    return (x + 1.0) / 2.0, w / 2.0


@dataclass(eq=False, frozen=True)
class QuadratureGrid:
    """Tensor Gauss-Legendre rule on the unit hypercube.

    The same 1-D rule is used along every axis; it integrates per-dimension
    polynomials exactly up to degree 2*resolution - 1.
    """

    dims: int
    resolution: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def for_dims(cls, dims: int, resolution: int | None = None):
        if dims < 1:
            raise ValueError("dims must be >= 1")
        if resolution is None:
            resolution = default_resolution(dims)
        nodes, weights = gauss_legendre_unit(resolution)
        return cls(dims, resolution, nodes, weights)

    def tensor_points(self):
        """All tensor nodes as an (R**M, M) array plus combined weights.

        Flat ordering puts the first variable's node index least significant,
        i.e. flat = q_M * R**(M-1) + ... + q_1, matching ``reshape((R,)*M)``
        with axes ordered (q_M, ..., q_1).
        """
        r = self.resolution
        m = self.dims
        total = r ** m
        pts = np.empty((total, m))
        for j in range(1, m + 1):
            block = np.repeat(self.nodes, r ** (j - 1))
            pts[:, j - 1] = np.tile(block, r ** (m - j))
        wts = self.weights
        for _ in range(m - 1):
            wts = np.kron(wts, self.weights)
        return pts, wts


def steady_basis_1d(n_states: int, pts) -> np.ndarray:
    """Univariate stationary basis evaluated at points in [0, 1].

    Row q holds the N stationary probabilities of the chain at input pts[q],
    computed in the overflow-free polynomial form.
    """
    p = np.asarray(pts, dtype=float).reshape(-1, 1)
    i = np.arange(n_states).reshape(1, -1)
    raw = np.power(p, i) * np.power(1.0 - p, n_states - 1 - i)
    return raw / raw.sum(axis=1, keepdims=True)


def assemble_H(n_states: int, arity: int, grid: QuadratureGrid) -> np.ndarray:
    """Gram matrix of the joint stationary basis under the grid.

    Built as the Kronecker power of the univariate Gram matrix, which equals
    the dense double integral because both the basis and the quadrature
    factor across dimensions.  Symmetric positive semidefinite.
    """
    if grid.dims != arity:
        raise ValueError("grid dimensionality must match the arity")
    s = steady_basis_1d(n_states, grid.nodes)
    g = s.T @ (grid.weights[:, None] * s)
    h = g
    for _ in range(arity - 1):
        h = np.kron(h, g)
    return 0.5 * (h + h.T)


def assemble_c(target, n_states: int, arity: int, grid: QuadratureGrid) -> np.ndarray:
    """Negated inner products of the target with every basis function."""
    if grid.dims != arity:
        raise ValueError("grid dimensionality must match the arity")
    pts, wts = grid.tensor_points()
    vals = np.asarray(target(pts), dtype=float).reshape(-1)
    if vals.shape[0] != pts.shape[0]:
        raise ValueError("target evaluator returned the wrong number of values")
    if not np.all(np.isfinite(vals)):
        raise ValueError("target evaluated to a non-finite value at a quadrature node")
    s = steady_basis_1d(n_states, grid.nodes)
    tens = (wts * vals).reshape((grid.resolution,) * arity)
    for _ in range(arity):
        tens = np.tensordot(tens, s, axes=([0], [0]))
    return -tens.reshape(-1)


def expected_output_grid(weights, n_states: int, arity: int, nodes) -> np.ndarray:
    """Machine surface on a tensor grid, flat in tensor_points order."""
    s = steady_basis_1d(n_states, nodes)
    tens = np.asarray(weights, dtype=float).reshape((n_states,) * arity)
    for _ in range(arity):
        tens = np.tensordot(tens, s, axes=([0], [1]))
    return tens.reshape(-1)


@dataclass(eq=False)
class SynthesisProblem:
    """Assembled quadratic program for one target."""

    n_states: int
    arity: int
    H: np.ndarray
    c: np.ndarray
    grid: QuadratureGrid
    target: object


def build_problem(target, n_states: int, arity: int | None = None,
                  grid_resolution: int | None = None) -> SynthesisProblem:
    if arity is None:
        arity = target.arity
    _check_size(n_states, arity)
    grid = QuadratureGrid.for_dims(arity, grid_resolution)
    h = assemble_H(n_states, arity, grid)
    c = assemble_c(target, n_states, arity, grid)
    return SynthesisProblem(n_states, arity, h, c, grid, target)


def _check_size(n_states, arity):
    if int(n_states) < 2:
        raise ValueError("n_states must be >= 2")
    if int(arity) < 1:
        raise ValueError("arity must be >= 1")
    if int(n_states) ** int(arity) > MAX_TABLE_SIZE:
        raise ValueError(
            f"codeword count {int(n_states) ** int(arity)} exceeds {MAX_TABLE_SIZE}")


@dataclass
class SolverResult:
    weights: np.ndarray
    iterations: int
    phi: float
    residual: float
    regularization: float
    phi_history: list | None = None


def _phi(H, c, b):
    return float(b @ H @ b + 2.0 * (c @ b))


def _projected_gradient_inf(g, b):
    """Max magnitude of the gradient projected onto the feasible directions."""
    pg = g.copy()
    at_lo = b <= 0.0
    at_hi = b >= 1.0
    pg[at_lo] = np.minimum(g[at_lo], 0.0)
    pg[at_hi] = np.maximum(g[at_hi], 0.0)
    return float(np.abs(pg).max())


def _lambda_max(H, iters: int = 200, tol: float = 1e-12) -> float:
    rng = np.random.RandomState(0x5EED)
    v = rng.uniform(-1.0, 1.0, H.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = H @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        new_lam = float(v @ H @ v)
        if abs(new_lam - lam) <= tol * max(1.0, abs(new_lam)):
            return new_lam
        lam = new_lam
    return lam


def _polish_active_set(Hreg, c, b, max_rounds: int = 400):
    """Primal active-set refinement from the current iterate.

    Plain projected gradient crawls on badly conditioned Gram matrices, so
    at checkpoints we run the textbook box-QP active-set method: solve the
    reduced system on the free coordinates exactly, step toward that
    minimizer until the first bound blocks, and release bound variables
    whose multiplier has the wrong sign.  Every step is a descent move; on
    success the returned point satisfies the KKT conditions to roundoff.
    The caller keeps iterating if we bail out early (singular subsystem or
    round cap).
    """
    n = b.size
    b = b.copy()
    at_lo = b <= 1e-12
    at_hi = b >= 1.0 - 1e-12
    for _ in range(max_rounds):
        free = ~(at_lo | at_hi)
        if free.any():
            rhs = -(c[free] + Hreg[np.ix_(free, at_hi)].sum(axis=1))
            try:
                x = np.linalg.solve(Hreg[np.ix_(free, free)], rhs)
            except np.linalg.LinAlgError:
                return b
            d = x - b[free]
        else:
            d = np.zeros(0)
        if d.size and np.abs(d).max() > 1e-14:
            # Largest feasible fraction of the step to the face minimizer.
            bf = b[free]
            with np.errstate(divide="ignore"):
                alpha_lo = np.where(d < 0, -bf / d, np.inf)
                alpha_hi = np.where(d > 0, (1.0 - bf) / d, np.inf)
            alpha = min(1.0, float(np.minimum(alpha_lo, alpha_hi).min()))
            bf = np.clip(bf + alpha * d, 0.0, 1.0)
            b[free] = bf
            if alpha < 1.0:
                idx = np.flatnonzero(free)
                at_lo[idx[bf <= 1e-12]] = True
                at_hi[idx[bf >= 1.0 - 1e-12]] = True
            continue
        # Free face is optimal; check bound multipliers and release the
        # worst violator, if any.
        g = Hreg @ b + c
        viol_lo = np.where(at_lo, np.maximum(-g, 0.0), 0.0)
        viol_hi = np.where(at_hi, np.maximum(g, 0.0), 0.0)
        worst = int(np.argmax(viol_lo + viol_hi))
        if viol_lo[worst] + viol_hi[worst] <= 1e-14:
            return b
        at_lo[worst] = False
        at_hi[worst] = False
    return b


def solve_box_qp(H, c, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 track_history: bool = False) -> SolverResult:
    """Minimize b'Hb + 2cb over the unit box.

    Tries the unconstrained solution first; if it violates the box, runs
    projected gradient descent with step 1/lambda_max, with periodic
    active-set polishing (accepted only when it does not increase phi, so the
    iterate objective is non-increasing).  H must be positive semidefinite; a
    small Tikhonov term proportional to trace(H) guards near-singular grids.
    """
    H = np.asarray(H, dtype=float)
    c = np.asarray(c, dtype=float).reshape(-1)
    n = H.shape[0]
    if H.shape != (n, n) or c.shape[0] != n:
        raise ValueError("H and c dimensions disagree")
    reg = 1e-10 * float(np.trace(H)) / n
    Hreg = H + reg * np.eye(n)
    try:
        np.linalg.cholesky(Hreg)
    except np.linalg.LinAlgError:
        min_eig = float(np.linalg.eigvalsh(H).min())
        if min_eig < -1e-8:
            raise SolverError(
                f"H has a negative eigenvalue ({min_eig:.3e}); not a valid Gram matrix")
    b_unc = None
    try:
        b_unc = np.linalg.solve(Hreg, -c)
    except np.linalg.LinAlgError:
        pass
    if b_unc is not None:
        clipped = np.clip(b_unc, 0.0, 1.0)
        if np.abs(clipped - b_unc).max() <= 1e-12:
            g = Hreg @ clipped + c
            result = SolverResult(
                weights=clipped,
                iterations=0,
                phi=_phi(H, c, clipped),
                residual=_projected_gradient_inf(g, clipped),
                regularization=reg,
                phi_history=[_phi(H, c, clipped)] if track_history else None,
            )
            return result
        b = clipped
    else:
        b = np.full(n, 0.5)
    lam = _lambda_max(Hreg)
    if lam <= 0.0:
        raise SolverError("could not estimate a positive largest eigenvalue")
    step = 1.0 / (1.01 * lam)
    history = [_phi(H, c, b)] if track_history else None
    it = 0
    while True:
        if it >= max_iter:
            raise SolverError(f"projected gradient did not converge in {max_iter} iterations")
        g = Hreg @ b + c
        nxt = np.clip(b - step * g, 0.0, 1.0)
        it += 1
        delta = float(np.abs(nxt - b).max())
        b = nxt
        if track_history:
            history.append(_phi(H, c, b))
        if delta < tol or it % _POLISH_EVERY == 0:
            cand = _polish_active_set(Hreg, c, b)
            if (not np.array_equal(cand, b)
                    and _phi(Hreg, c, cand) <= _phi(Hreg, c, b)):
                b = cand
                if track_history:
                    history.append(_phi(H, c, b))
            g = Hreg @ b + c
            if _projected_gradient_inf(g, b) <= _RESIDUAL_LIMIT:
                break
            # Stalled or mid-flight without optimality: keep iterating.
    g = Hreg @ b + c
    residual = _projected_gradient_inf(g, b)
    if residual > _RESIDUAL_LIMIT:
        raise SolverError(
            f"first-order optimality not reached: projected gradient {residual:.3e}")
    return SolverResult(
        weights=b,
        iterations=it,
        phi=_phi(H, c, b),
        residual=residual,
        regularization=reg,
        phi_history=history,
    )


def solve_weights(problem: SynthesisProblem, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER, master_seed=None) -> WeightTable:
    """Solve the assembled program and package the thresholds as a table."""
    res = solve_box_qp(problem.H, problem.c, tol=tol, max_iter=max_iter)
    target = problem.target
    input_maps = list(getattr(target, "input_maps", None) or
                      [UNIT_MAP] * problem.arity)
    output_map = getattr(target, "output_map", None) or UNIT_MAP
    return WeightTable(
        n_states=problem.n_states,
        arity=problem.arity,
        weights=res.weights,
        target_name=getattr(target, "name", "") or "",
        expression=getattr(target, "expression", None),
        input_maps=input_maps,
        output_map=output_map,
        grid_resolution=problem.grid.resolution,
        solver_info={
            "iterations": res.iterations,
            "phi": res.phi,
            "residual": res.residual,
        },
        master_seed=master_seed,
    )


def synthesize(target, n_states: int, arity: int | None = None,
               grid_resolution: int | None = None, tol: float = DEFAULT_TOL,
               max_iter: int = DEFAULT_MAX_ITER, master_seed=None) -> WeightTable:
    """End-to-end synthesis: assemble the program, solve, attach metadata."""
    problem = build_problem(target, n_states, arity, grid_resolution)
    return solve_weights(problem, tol=tol, max_iter=max_iter, master_seed=master_seed)


def fit_l2_error(table: WeightTable, target, grid_resolution: int | None = None) -> float:
    """Quadrature L2 distance between the fitted surface and the target."""
    grid = QuadratureGrid.for_dims(table.arity, grid_resolution)
    pts, wts = grid.tensor_points()
    fitted = expected_output_grid(table.weights, table.n_states, table.arity, grid.nodes)
    vals = np.asarray(target(pts), dtype=float).reshape(-1)
    return float(np.sqrt(np.sum(wts * (fitted - vals) ** 2)))
