"""Coefficient file format: a JSON document describing one weight table.

Fields: format_version, target_name, expression (nullable), N, M,
codeword_order (always "digit1-least-significant"), weights (flat array of
N**M probabilities), input_maps, output_map, grid_resolution (nullable),
solver {iterations, phi, residual} (nullable), master_seed (nullable).

Writing is canonical (fixed key order, two-space indent, shortest
round-tripping float form), so write(read(f)) reproduces f byte for byte
for files this module wrote.
"""

from __future__ import annotations

import json

from .core import AffineMap
from .errors import CoefficientFileError
from .machine import WeightTable

FORMAT_VERSION = 1
CODEWORD_ORDER = "digit1-least-significant"


def _map_to_obj(m: AffineMap | None):
    m = m or AffineMap(0.0, 1.0)
    return {"lo": m.lo, "hi": m.hi}


def _map_from_obj(obj, where):
    if not isinstance(obj, dict) or set(obj) != {"lo", "hi"}:
        raise CoefficientFileError(f"{where} must be an object with 'lo' and 'hi'")
    try:
        return AffineMap(float(obj["lo"]), float(obj["hi"]))
    except (TypeError, ValueError) as exc:
        raise CoefficientFileError(f"bad {where}: {exc}") from exc


def dumps_coefficients(table: WeightTable) -> str:
    input_maps = table.input_maps or [AffineMap(0.0, 1.0)] * table.arity
    doc = {
        "format_version": FORMAT_VERSION,
        "target_name": table.target_name or "",
        "expression": table.expression,
        "N": table.n_states,
        "M": table.arity,
        "codeword_order": CODEWORD_ORDER,
        "weights": [float(w) for w in table.weights],
        "input_maps": [_map_to_obj(m) for m in input_maps],
        "output_map": _map_to_obj(table.output_map),
        "grid_resolution": table.grid_resolution,
        "solver": table.solver_info,
        "master_seed": table.master_seed,
    }
    return json.dumps(doc, indent=2) + "\n"


def write_coefficients(table: WeightTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_coefficients(table))


def loads_coefficients(text: str) -> WeightTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CoefficientFileError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CoefficientFileError("top level must be a JSON object")

    required = ("format_version", "N", "M", "codeword_order", "weights",
                "input_maps", "output_map")
    for key in required:
        if key not in doc:
            raise CoefficientFileError(f"missing required field {key!r}")

    version = doc["format_version"]
    if version != FORMAT_VERSION:
        raise CoefficientFileError(
            f"unsupported format_version {version!r}; this build reads version {FORMAT_VERSION}")
    if doc["codeword_order"] != CODEWORD_ORDER:
        raise CoefficientFileError(
            f"unsupported codeword_order {doc['codeword_order']!r}")

    n = doc["N"]
    m = doc["M"]
    if not isinstance(n, int) or n < 2:
        raise CoefficientFileError(f"N must be an integer >= 2, got {n!r}")
    if not isinstance(m, int) or m < 1:
        raise CoefficientFileError(f"M must be an integer >= 1, got {m!r}")

    weights = doc["weights"]
    if not isinstance(weights, list) or len(weights) != n ** m:
        raise CoefficientFileError(
            f"weights must hold exactly N**M = {n ** m} entries")
    vals = []
    for i, w in enumerate(weights):
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise CoefficientFileError(f"weight {i} is not a number")
        w = float(w)
        if not 0.0 <= w <= 1.0:
            raise CoefficientFileError(f"weight {i} = {w} outside [0, 1]")
        vals.append(w)

    maps_obj = doc["input_maps"]
    if not isinstance(maps_obj, list) or len(maps_obj) != m:
        raise CoefficientFileError(f"input_maps must hold {m} entries")
    input_maps = [_map_from_obj(o, f"input_maps[{i}]") for i, o in enumerate(maps_obj)]
    output_map = _map_from_obj(doc["output_map"], "output_map")

    expression = doc.get("expression")
    if expression is not None and not isinstance(expression, str):
        raise CoefficientFileError("expression must be a string or null")
    grid_resolution = doc.get("grid_resolution")
    if grid_resolution is not None and not isinstance(grid_resolution, int):
        raise CoefficientFileError("grid_resolution must be an integer or null")
    solver = doc.get("solver")
    if solver is not None and not isinstance(solver, dict):
        raise CoefficientFileError("solver must be an object or null")
    master_seed = doc.get("master_seed")
    if master_seed is not None and not isinstance(master_seed, int):
        raise CoefficientFileError("master_seed must be an integer or null")

    return WeightTable(
        n_states=n,
        arity=m,
        weights=vals,
        target_name=doc.get("target_name") or "",
        expression=expression,
        input_maps=input_maps,
        output_map=output_map,
        grid_resolution=grid_resolution,
        solver_info=solver,
        master_seed=master_seed,
    )


def read_coefficients(path) -> WeightTable:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_coefficients(fh.read())
