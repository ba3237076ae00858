"""Command-line front end.

Subcommands: ``synthesize`` (fit a coefficient file for a target), ``eval``
(simulate a table over its input grid and report errors), ``sweep`` (error
versus bitstream length across state counts), ``steady`` (stationary chain
probabilities), ``show`` (pretty-print a coefficient file).

A JSON config file may supply any flag value (keys use underscores, e.g.
``n_states``); explicit flags override the file.  Exit codes: 0 success,
2 configuration error, 3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .core import DEFAULT_SEED, RNG_KINDS
from .errors import CoefficientFileError, ConfigError, SmurfError, SolverError
from .evaluate import (
    evaluate_table,
    reconstruct_target,
    sweep_target,
    write_eval_csv,
    write_sweep_csv,
    write_sweep_gnuplot,
)
from .expr import expression_target
from .fsm import chain_steady_probs
from .machine import MAX_TABLE_SIZE, joint_steady_probs
from .synthesis import synthesize
from .targets import available_builtins, builtin
from .weightio import read_coefficients, write_coefficients

_STEADY_CURVE_POINTS = 101


def _parse_int_list(text, what):
    try:
        vals = [int(part) for part in str(text).replace(" ", "").split(",") if part]
    except ValueError:
        raise ConfigError(f"{what} must be a comma-separated list of integers")
    if not vals:
        raise ConfigError(f"{what} must not be empty")
    return vals


def _parse_float_list(text, what):
    try:
        vals = [float(part) for part in str(text).replace(" ", "").split(",") if part]
    except ValueError:
        raise ConfigError(f"{what} must be a comma-separated list of numbers")
    if not vals:
        raise ConfigError(f"{what} must not be empty")
    return vals


def _parse_box(text, what):
    vals = _parse_float_list(text, what)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise ConfigError(f"{what} must be 'lo,hi' with lo < hi")
    return vals[0], vals[1]


def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    return doc


class _Settings:
    """Flag values with config-file fallback; flags override the file."""

    def __init__(self, args):
        self.args = vars(args)
        self.config = _load_config(args.config) if getattr(args, "config", None) else {}
        known = set(self.args)
        for key in self.config:
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")

    def get(self, key, default=None):
        val = self.args.get(key)
        # False means an unset store_true flag; fall through to the config.
        if val is not None and val is not False:
            return val
        if key in self.config and self.config[key] is not None:
            return self.config[key]
        return default if val is None else val


def _check_dims(n_states, arity):
    if n_states < 2:
        raise ConfigError(f"n-states must be >= 2, got {n_states}")
    if arity < 1:
        raise ConfigError(f"arity must be >= 1, got {arity}")
    if n_states ** arity > MAX_TABLE_SIZE:
        raise ConfigError(
            f"N**M = {n_states ** arity} output gates exceed the supported "
            f"maximum of {MAX_TABLE_SIZE}; lower --n-states or --arity")


def _resolve_target(settings):
    name = settings.get("target")
    expr = settings.get("expr")
    if name and expr:
        raise ConfigError("give either --target or --expr, not both")
    input_boxes = settings.get("input_box")
    if input_boxes:
        input_boxes = [_parse_box(b, "--input-box") for b in input_boxes]
    output_box = settings.get("output_box")
    if output_box and output_box != "auto":
        output_box = _parse_box(output_box, "--output-box")
    arity = settings.get("arity")
    if name:
        if name not in available_builtins():
            raise ConfigError(
                f"unknown target {name!r}; builtins: {', '.join(available_builtins())}")
        box = input_boxes[0] if input_boxes else None
        try:
            return builtin(name, input_box=box, output_box=output_box or None)
        except ValueError as exc:
            raise ConfigError(str(exc))
    if expr:
        return expression_target(
            expr, arity=int(arity) if arity is not None else None,
            input_boxes=input_boxes or None, output_box=output_box or None)
    raise ConfigError("a target is required: --target NAME or --expr TEXT")


def _common_sim_settings(settings):
    # seed stays None when unset so files' recorded master seeds can win.
    seed = settings.get("seed")
    seed = int(seed) if seed is not None else None
    rng = settings.get("rng", "independent")
    if rng not in RNG_KINDS:
        raise ConfigError(f"--rng must be one of {', '.join(RNG_KINDS)}")
    burn_in = int(settings.get("burn_in", 0))
    if burn_in < 0:
        raise ConfigError("--burn-in must be nonnegative")
    return seed, rng, burn_in


def _positive_lengths(settings):
    raw = settings.get("lengths", "64")
    lengths = raw if isinstance(raw, list) else _parse_int_list(raw, "--lengths")
    for length in lengths:
        if length < 1:
            raise ConfigError(f"bitstream lengths must be >= 1, got {length}")
    return lengths


def _cmd_synthesize(settings):
    target = _resolve_target(settings)
    n_states = int(settings.get("n_states", 4))
    _check_dims(n_states, target.arity)
    grid = settings.get("grid")
    seed = int(settings.get("seed", DEFAULT_SEED))
    out = settings.get("out")
    if not out:
        raise ConfigError("--out is required for synthesize")
    table = synthesize(target, n_states,
                       grid_resolution=int(grid) if grid is not None else None,
                       master_seed=seed)
    write_coefficients(table, out)
    info = table.solver_info or {}
    print(f"target: {target.name}  N={n_states}  M={target.arity}  "
          f"codewords={table.n_codewords}")
    print(f"solver: iterations={info.get('iterations')}  phi={info.get('phi'):.9g}  "
          f"residual={info.get('residual'):.3g}")
    print(f"wrote {out}")
    return 0


def _cmd_eval(settings):
    path = settings.get("coeffs")
    if not path:
        raise ConfigError("--coeffs FILE is required for eval")
    table = read_coefficients(path)
    n_states = settings.get("n_states")
    if n_states is not None and int(n_states) != table.n_states:
        raise ConfigError(
            f"--n-states {n_states} does not match the file (N={table.n_states})")
    arity = settings.get("arity")
    if arity is not None and int(arity) != table.arity:
        raise ConfigError(
            f"--arity {arity} does not match the file (M={table.arity})")
    seed, rng, burn_in = _common_sim_settings(settings)
    lengths = _positive_lengths(settings)
    density = settings.get("eval_grid")
    report = evaluate_table(
        table, lengths=lengths, master_seed=seed, rng_kind=rng,
        burn_in=burn_in, density=int(density) if density is not None else None)
    for agg in report.aggregates:
        print(f"L={agg.length}: avg_abs_err={agg.avg_abs_err:.6f}  "
              f"max_abs_err={agg.max_abs_err:.6f}  "
              f"avg_abs_err_vs_analytic={agg.avg_abs_err_analytic:.6f}")
    out = settings.get("out")
    if out:
        write_eval_csv(report, out)
        print(f"wrote {out}")
    return 0


def _cmd_sweep(settings):
    lengths = _positive_lengths(settings)
    if sorted(lengths) != lengths:
        raise ConfigError("--lengths must be sorted ascending for sweep")
    seed, rng, burn_in = _common_sim_settings(settings)
    density = settings.get("eval_grid")
    density = int(density) if density is not None else None
    coeffs = settings.get("coeffs")
    if coeffs:
        table = read_coefficients(coeffs)
        target = reconstruct_target(table)
        n_list = [table.n_states]
        tables = {table.n_states: table}
    else:
        target = _resolve_target(settings)
        n_list = settings.get("n_states", 4)
        n_list = n_list if isinstance(n_list, list) else _parse_int_list(
            n_list, "--n-states")
        for n in n_list:
            _check_dims(n, target.arity)
        tables = None
        if seed is None:
            seed = DEFAULT_SEED
    grid = settings.get("grid")
    report = sweep_target(
        target, n_list, lengths, master_seed=seed, rng_kind=rng, burn_in=burn_in,
        density=density, grid_resolution=int(grid) if grid is not None else None,
        tables=tables)
    for row in report.rows:
        print(f"N={row.n_states} L={row.length}: avg_abs_err={row.avg_abs_err:.6f}  "
              f"max_abs_err={row.max_abs_err:.6f}")
    out = settings.get("out")
    if out:
        write_sweep_csv(report, out)
        print(f"wrote {out}")
        script = settings.get("plot_script")
        if script:
            write_sweep_gnuplot(report, out, script)
            print(f"wrote {script}")
    elif settings.get("plot_script"):
        raise ConfigError("--plot-script needs --out CSV")
    return 0


def _cmd_steady(settings):
    n_states = int(settings.get("n_states", 4))
    if n_states < 2:
        raise ConfigError(f"n-states must be >= 2, got {n_states}")
    px = settings.get("px")
    pxs = settings.get("pxs")
    if px is not None and pxs is not None:
        raise ConfigError("give either --px or --pxs, not both")
    if pxs is not None:
        values = pxs if isinstance(pxs, list) else _parse_float_list(pxs, "--pxs")
        probs = joint_steady_probs(n_states, values)
        print(f"joint stationary distribution, N={n_states}, M={len(values)}, "
              f"inputs={values}")
        for t, p in enumerate(probs):
            print(f"  t={t}: {p:.10f}")
        return 0
    if px is not None:
        probs = chain_steady_probs(n_states, float(px))
        print(f"stationary distribution, N={n_states}, px={float(px)}")
        for i, p in enumerate(probs):
            print(f"  state {i}: {p:.10f}")
    out = settings.get("out")
    if settings.get("curves") or out:
        if not out:
            raise ConfigError("--curves needs --out CSV")
        grid = np.linspace(0.0, 1.0, _STEADY_CURVE_POINTS)
        lines = ["px," + ",".join(f"P{i}" for i in range(n_states))]
        for p in grid:
            probs = chain_steady_probs(n_states, p)
            lines.append(",".join(f"{v:.12g}" for v in [p, *probs]))
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {out}")
    elif px is None:
        raise ConfigError("steady needs --px, --pxs, or --curves with --out")
    return 0


def _cmd_show(settings):
    path = settings.get("coeffs")
    if not path:
        raise ConfigError("--coeffs FILE is required for show")
    table = read_coefficients(path)
    print(f"target_name: {table.target_name or '(none)'}")
    if table.expression:
        print(f"expression: {table.expression}")
    print(f"N={table.n_states}  M={table.arity}  codewords={table.n_codewords}")
    maps = table.input_maps or []
    for j, m in enumerate(maps):
        print(f"input x{j + 1}: [{m.lo:g}, {m.hi:g}]")
    if table.output_map:
        print(f"output: [{table.output_map.lo:g}, {table.output_map.hi:g}]")
    if table.grid_resolution:
        print(f"grid_resolution: {table.grid_resolution}")
    if table.solver_info:
        print(f"solver: {table.solver_info}")
    if table.master_seed is not None:
        print(f"master_seed: {table.master_seed}")
    print("weights (digit 1 least significant):")
    n = table.n_states
    w = table.weights
    if table.arity == 1:
        print("  " + "  ".join(f"{v:.6f}" for v in w))
    else:
        rows = w.reshape(-1, n)
        for r, row in enumerate(rows):
            label = f"t={r * n}..{r * n + n - 1}"
            print(f"  {label:>12}: " + "  ".join(f"{v:.6f}" for v in row))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="smurf",
        description="Simulate and synthesize stochastic radix-coded FSM "
                    "nonlinear function generators.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_target=False, with_sim=False):
        p.add_argument("--config", help="JSON file supplying any flag (flags win)")
        p.add_argument("--n-states", dest="n_states", help="states per chain (N)")
        p.add_argument("--arity", dest="arity", type=int, help="input count (M)")
        p.add_argument("--seed", dest="seed", type=int,
                       help="64-bit master seed (eval/sweep on an existing "
                            "coefficient file default to its recorded seed)")
        p.add_argument("--out", dest="out", help="output file path")
        if with_target:
            p.add_argument("--target", dest="target", help="builtin target name")
            p.add_argument("--expr", dest="expr", help="expression target, e.g. 'sqrt(x1^2 + x2^2)'")
            p.add_argument("--input-box", dest="input_box", action="append",
                           help="lo,hi input interval (repeat per variable)")
            p.add_argument("--output-box", dest="output_box",
                           help="'lo,hi' output interval or 'auto'")
            p.add_argument("--grid", dest="grid", type=int,
                           help="quadrature nodes per dimension")
        if with_sim:
            p.add_argument("--lengths", dest="lengths", help="comma list of bitstream lengths")
            p.add_argument("--burn-in", dest="burn_in", type=int,
                           help="unrecorded warm-up cycles")
            p.add_argument("--rng", dest="rng", choices=list(RNG_KINDS),
                           help="draw source wiring (default independent)")
            p.add_argument("--eval-grid", dest="eval_grid", type=int,
                           help="evaluation points per dimension")
        return p

    p_syn = add_common(sub.add_parser(
        "synthesize", help="fit gate thresholds for a target and write a coefficient file"),
        with_target=True)
    p_syn.set_defaults(func=_cmd_synthesize, int_n=True)

    p_eval = add_common(sub.add_parser(
        "eval", help="simulate a coefficient file over its input grid"),
        with_sim=True)
    p_eval.add_argument("--coeffs", dest="coeffs", help="coefficient file to evaluate")
    p_eval.set_defaults(func=_cmd_eval, int_n=True)

    p_sweep = add_common(sub.add_parser(
        "sweep", help="error versus bitstream length, optionally across state counts"),
        with_target=True, with_sim=True)
    p_sweep.add_argument("--coeffs", dest="coeffs",
                         help="existing coefficient file (otherwise synthesized per N)")
    p_sweep.add_argument("--plot-script", dest="plot_script",
                         help="also write a gnuplot script for the CSV")
    p_sweep.set_defaults(func=_cmd_sweep, int_n=False)

    p_steady = add_common(sub.add_parser(
        "steady", help="stationary chain probabilities"))
    p_steady.add_argument("--px", dest="px", type=float, help="input probability")
    p_steady.add_argument("--pxs", dest="pxs", help="comma list for the joint distribution")
    p_steady.add_argument("--curves", dest="curves", action="store_true",
                          help="write per-state curves over a px grid (CSV)")
    p_steady.set_defaults(func=_cmd_steady, int_n=True)

    p_show = sub.add_parser("show", help="pretty-print a coefficient file")
    p_show.add_argument("--config", help=argparse.SUPPRESS)
    p_show.add_argument("--coeffs", dest="coeffs", help="coefficient file to print")
    p_show.set_defaults(func=_cmd_show, int_n=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = _Settings(args)
        if getattr(args, "int_n", False):
            n = settings.get("n_states")
            if n is not None:
                try:
                    settings.args["n_states"] = int(n)
                except (TypeError, ValueError):
                    raise ConfigError(f"--n-states must be an integer, got {n!r}")
        return args.func(settings)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except CoefficientFileError as exc:
        print(f"coefficient file error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, SmurfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
