"""Grid evaluation of weight tables and error-versus-length sweeps.

The error metric throughout is the average absolute error: the mean over a
uniform grid spanning the input box of |simulated output - target value|, in
normalized [0, 1] units.  Reports carry the simulated-versus-analytic error
alongside, since the infinite-length machine surface is available in closed
form.  Every (grid point, length) pair gets its own sub-seed derived from the
master seed, so sweeps are reproducible point by point and safe to fan out
over workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_SEED, UNIT_MAP, derive_seed
from .errors import ConfigError
from .expr import expression_target
from .machine import SmurfMachine, WeightTable, joint_steady_probs
from .synthesis import synthesize
from .targets import TargetFunction, builtin

_LITERAL_BUILTINS = {"euclidean2", "euclidean2_scaled", "ht_kernel",
                     "softmax2_c1", "softmax3_c1"}


def default_eval_density(arity: int) -> int:
    """Evaluation grid points per dimension: 21 up to 2-D, 9 at 3-D, 5 beyond."""
    if arity <= 2:
        return 21
    if arity == 3:
        return 9
    return 5


def reconstruct_target(table: WeightTable) -> TargetFunction:
    """Rebuild the target a table was synthesized for, from its metadata."""
    name = table.target_name or ""
    if name in _LITERAL_BUILTINS:
        return builtin(name)
    if name in ("tanh_act", "swish_act"):
        in_map = (table.input_maps or [UNIT_MAP])[0]
        out_map = table.output_map or UNIT_MAP
        return builtin(name, input_box=(in_map.lo, in_map.hi),
                       output_box=(out_map.lo, out_map.hi))
    if table.expression:
        boxes = [(m.lo, m.hi) for m in (table.input_maps or [UNIT_MAP] * table.arity)]
        literal = all(b == (0.0, 1.0) for b in boxes) and (
            table.output_map is None or (table.output_map.lo, table.output_map.hi) == (0.0, 1.0))
        if literal:
            return expression_target(table.expression, arity=table.arity)
        out_map = table.output_map or UNIT_MAP
        return expression_target(table.expression, arity=table.arity,
                                 input_boxes=boxes,
                                 output_box=(out_map.lo, out_map.hi))
    raise ConfigError(
        f"cannot reconstruct the target for this table (target_name={name!r}, "
        "no expression recorded)")


def eval_grid(table_or_target, density: int | None = None):
    """Uniform evaluation grid over the input box.

    Returns (raw_pts, unit_pts) with shape (n, arity); the first variable's
    index varies fastest.  For unit-box targets the two are identical.
    """
    obj = table_or_target
    arity = obj.arity
    maps = list(obj.input_maps or [UNIT_MAP] * arity)
    if density is None:
        density = default_eval_density(arity)
    if density < 2:
        raise ConfigError("evaluation grid density must be >= 2")
    axes_raw = [np.linspace(m.lo, m.hi, density) for m in maps]
    total = density ** arity
    raw = np.empty((total, arity))
    unit = np.empty((total, arity))
    for j in range(arity):
        block = np.repeat(axes_raw[j], density ** j)
        col = np.tile(block, density ** (arity - 1 - j))
        raw[:, j] = col
        unit[:, j] = maps[j].forward(col)
    return raw, unit


@dataclass
class EvalRow:
    length: int
    index: int
    raw_inputs: tuple
    unit_inputs: tuple
    target: float
    analytic: float
    simulated: float
    abs_err: float
    abs_err_analytic: float


@dataclass
class EvalAggregate:
    length: int
    avg_abs_err: float
    max_abs_err: float
    avg_abs_err_analytic: float


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def aggregate_for(self, length: int) -> EvalAggregate:
        for agg in self.aggregates:
            if agg.length == length:
                return agg
        raise KeyError(f"no aggregate for length {length}")


def evaluate_table(table: WeightTable, target: TargetFunction | None = None,
                   lengths=(64,), master_seed: int | None = None,
                   rng_kind: str = "independent", burn_in: int = 0,
                   density: int | None = None, impl=None) -> EvalReport:
    """Simulate the machine over the evaluation grid at each length."""
    if target is None:
        target = reconstruct_target(table)
    if target.arity != table.arity:
        raise ConfigError(
            f"target arity {target.arity} does not match table arity {table.arity}")
    lengths = [int(length) for length in lengths]
    if not lengths:
        raise ConfigError("need at least one bitstream length")
    if master_seed is None:
        master_seed = table.master_seed if table.master_seed is not None else DEFAULT_SEED
    raw_pts, unit_pts = eval_grid(table, density)
    machine = SmurfMachine(table.weights, table.radices(), rng_kind=rng_kind,
                           master_seed=master_seed, burn_in=burn_in)
    target_vals = np.asarray(target(unit_pts), dtype=float).reshape(-1)
    analytic_vals = np.array([
        float(joint_steady_probs(table.radices(), unit_pts[i]) @ table.weights)
        for i in range(unit_pts.shape[0])])
    report = EvalReport(metadata={
        "metric": "average absolute error = mean over grid of |simulated - target|, normalized units",
        "master_seed": master_seed,
        "rng": rng_kind,
        "burn_in": burn_in,
        "density": density if density is not None else default_eval_density(table.arity),
        "target": target.name,
    })
    for length in lengths:
        errs = np.empty(unit_pts.shape[0])
        errs_analytic = np.empty(unit_pts.shape[0])
        for i in range(unit_pts.shape[0]):
            seed = derive_seed(master_seed, i, length)
            sim = machine.run(unit_pts[i], length, seed=seed, impl=impl)
            errs[i] = abs(sim - target_vals[i])
            errs_analytic[i] = abs(sim - analytic_vals[i])
            report.rows.append(EvalRow(
                length=length, index=i,
                raw_inputs=tuple(raw_pts[i]), unit_inputs=tuple(unit_pts[i]),
                target=float(target_vals[i]), analytic=float(analytic_vals[i]),
                simulated=sim, abs_err=float(errs[i]),
                abs_err_analytic=float(errs_analytic[i])))
        report.aggregates.append(EvalAggregate(
            length=length,
            avg_abs_err=float(errs.mean()),
            max_abs_err=float(errs.max()),
            avg_abs_err_analytic=float(errs_analytic.mean())))
    return report


@dataclass
class SweepRow:
    n_states: int
    length: int
    avg_abs_err: float
    max_abs_err: float
    avg_abs_err_analytic: float


@dataclass
class SweepReport:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def row_for(self, n_states: int, length: int) -> SweepRow:
        for row in self.rows:
            if row.n_states == n_states and row.length == length:
                return row
        raise KeyError(f"no sweep row for N={n_states}, L={length}")


def sweep_target(target: TargetFunction, n_states_list, lengths,
                 master_seed: int = DEFAULT_SEED, rng_kind: str = "independent",
                 burn_in: int = 0, density: int | None = None,
                 grid_resolution: int | None = None, tables: dict | None = None,
                 impl=None) -> SweepReport:
    """Synthesize (or reuse) a table per state count and sweep the lengths."""
    lengths = [int(length) for length in lengths]
    if sorted(lengths) != lengths:
        raise ConfigError("lengths must be sorted ascending")
    report = SweepReport(metadata={
        "target": target.name,
        "master_seed": master_seed,
        "rng": rng_kind,
        "burn_in": burn_in,
    })
    for n in n_states_list:
        table = tables.get(n) if tables else None
        if table is None:
            table = synthesize(target, n, master_seed=master_seed,
                               grid_resolution=grid_resolution)
        sub = evaluate_table(table, target, lengths=lengths, master_seed=master_seed,
                             rng_kind=rng_kind, burn_in=burn_in, density=density,
                             impl=impl)
        for agg in sub.aggregates:
            report.rows.append(SweepRow(
                n_states=int(n), length=agg.length,
                avg_abs_err=agg.avg_abs_err, max_abs_err=agg.max_abs_err,
                avg_abs_err_analytic=agg.avg_abs_err_analytic))
    return report


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _header_lines(metadata: dict):
    return [f"# {key}: {metadata[key]}" for key in sorted(metadata)]


def write_eval_csv(report: EvalReport, path) -> None:
    arity = len(report.rows[0].raw_inputs) if report.rows else 0
    cols = (["length", "point"]
            + [f"x{j + 1}" for j in range(arity)]
            + [f"p{j + 1}" for j in range(arity)]
            + ["target", "analytic", "simulated", "abs_err", "abs_err_analytic"])
    lines = _header_lines(report.metadata)
    lines.append(",".join(cols))
    for row in report.rows:
        vals = ([row.length, row.index]
                + [*row.raw_inputs] + [*row.unit_inputs]
                + [row.target, row.analytic, row.simulated,
                   row.abs_err, row.abs_err_analytic])
        lines.append(",".join(_fmt(v) for v in vals))
    lines.append("")
    lines.append("# aggregates")
    lines.append("length,avg_abs_err,max_abs_err,avg_abs_err_analytic")
    for agg in report.aggregates:
        lines.append(",".join(_fmt(v) for v in (
            agg.length, agg.avg_abs_err, agg.max_abs_err, agg.avg_abs_err_analytic)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_csv(report: SweepReport, path) -> None:
    lines = _header_lines(report.metadata)
    lines.append("n_states,length,avg_abs_err,max_abs_err,avg_abs_err_analytic")
    for row in report.rows:
        lines.append(",".join(_fmt(v) for v in (
            row.n_states, row.length, row.avg_abs_err, row.max_abs_err,
            row.avg_abs_err_analytic)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_gnuplot(report: SweepReport, csv_path, script_path) -> None:
    """A minimal gnuplot companion for the sweep CSV."""
    ns = sorted({row.n_states for row in report.rows})
    plots = ", ".join(
        f"'{csv_path}' using 2:($1=={n}?$3:1/0) with linespoints title 'N={n}'"
        for n in ns)
    script = "\n".join([
        "set datafile separator ','",
        "set logscale x 2",
        "set xlabel 'bitstream length'",
        "set ylabel 'average absolute error'",
        f"plot {plots}",
        "",
    ])
    with open(script_path, "w", encoding="utf-8") as fh:
        fh.write(script)
