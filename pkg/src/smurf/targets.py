"""Target function registry with affine range normalization.

A target is a real function on the unit hypercube.  Functions living on
other boxes are wrapped: inputs are mapped from [0, 1] back to their native
interval, the raw function is applied, and its value is mapped into [0, 1]
through an output box that is either given or measured on a dense sample
grid.  Errors reported elsewhere in the package are always in these
normalized units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AffineMap

AUTO_BOX_SAMPLES = 129
_AUTO_BOX_PAD = 1e-9


def cas(x):
    """sin(x) + cos(x), the Hartley kernel."""
    return np.sin(x) + np.cos(x)


def sigmoid(x):
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


@dataclass(eq=False)
class TargetFunction:
    """A named evaluator on [0, 1]**arity, optionally wrapping a raw form.

    ``fn`` takes an array of shape (..., arity) and returns shape (...).
    When the target wraps a raw function, ``input_maps``/``output_map`` hold
    the affine conversions and ``raw_fn`` the native-units evaluator.
    """

    name: str
    arity: int
    fn: object
    expression: str | None = None
    raw_fn: object = None
    input_maps: list[AffineMap] | None = None
    output_map: AffineMap | None = None

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] != self.arity:
            raise ValueError(
                f"target {self.name!r} takes {self.arity} inputs, got shape {pts.shape}")
        return self.fn(pts)


def normalize_target(raw_fn, input_boxes, output_box="auto", name="custom",
                     expression=None, samples: int = AUTO_BOX_SAMPLES) -> TargetFunction:
    """Wrap a raw evaluator with affine maps onto the unit hypercube.

    ``output_box="auto"`` measures [min, max] of the raw function over a
    dense ``samples``**arity grid and pads it by 1e-9.  Extrema falling
    between grid samples can overshoot an auto box by the grid's resolution
    error, so the output map is applied without a strict domain check.
    """
    input_maps = [b if isinstance(b, AffineMap) else AffineMap(*b) for b in input_boxes]
    arity = len(input_maps)
    if arity < 1:
        raise ValueError("need at least one input box")

    if isinstance(output_box, str):
        if output_box != "auto":
            raise ValueError(f"unknown output box mode {output_box!r}")
        if arity > 3:
            raise ValueError("auto output box is limited to arity <= 3")
        axes = [np.linspace(m.lo, m.hi, samples) for m in input_maps]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.reshape(-1) for g in mesh], axis=-1)
        vals = np.asarray(raw_fn(pts), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("raw function evaluated to a non-finite value")
        output_map = AffineMap(float(vals.min()) - _AUTO_BOX_PAD,
                               float(vals.max()) + _AUTO_BOX_PAD)
    else:
        output_map = output_box if isinstance(output_box, AffineMap) else AffineMap(*output_box)

    def unit_fn(pts):
        pts = np.asarray(pts, dtype=float)
        raw_pts = np.stack(
            [input_maps[j].backward(pts[..., j]) for j in range(arity)], axis=-1)
        vals = np.asarray(raw_fn(raw_pts), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("raw function evaluated to a non-finite value")
        return output_map.forward_unchecked(vals)

    return TargetFunction(
        name=name, arity=arity, fn=unit_fn, expression=expression,
        raw_fn=raw_fn, input_maps=input_maps, output_map=output_map)


def _euclidean2(input_box=None, output_box=None):
    _reject_boxes("euclidean2", input_box, output_box)
    return TargetFunction(
        "euclidean2", 2,
        lambda p: np.sqrt(p[..., 0] ** 2 + p[..., 1] ** 2))


def _euclidean2_scaled(input_box=None, output_box=None):
    _reject_boxes("euclidean2_scaled", input_box, output_box)
    return TargetFunction(
        "euclidean2_scaled", 2,
        lambda p: np.sqrt((p[..., 0] ** 2 + p[..., 1] ** 2) / 2.0))


def _ht_kernel(input_box=None, output_box=None):
    _reject_boxes("ht_kernel", input_box, output_box)
    return TargetFunction(
        "ht_kernel", 2,
        lambda p: np.sin(p[..., 0]) * cas(p[..., 1]))


def _softmax2_c1(input_box=None, output_box=None):
    _reject_boxes("softmax2_c1", input_box, output_box)

    def fn(p):
        e1 = np.exp(p[..., 0])
        return e1 / (e1 + np.exp(p[..., 1]))

    return TargetFunction("softmax2_c1", 2, fn)


def _softmax3_c1(input_box=None, output_box=None):
    _reject_boxes("softmax3_c1", input_box, output_box)

    def fn(p):
        e1 = np.exp(p[..., 0])
        return e1 / (e1 + np.exp(p[..., 1]) + np.exp(p[..., 2]))

    return TargetFunction("softmax3_c1", 3, fn)


def _tanh_act(input_box=None, output_box=None):
    # Default domain covers the activation's curvature at a steepness a
    # 4-state machine can still trace; wider boxes make the normalized
    # sigmoid sharper than the stationary basis and the fit saturates.
    box = input_box if input_box is not None else (-2.0, 2.0)
    out = output_box if output_box is not None else "auto"
    return normalize_target(lambda p: np.tanh(p[..., 0]), [box], out, name="tanh_act")


def _swish_act(input_box=None, output_box=None):
    box = input_box if input_box is not None else (-1.0, 3.0)
    out = output_box if output_box is not None else "auto"

    def raw(p):
        x = p[..., 0]
        return x * sigmoid(x)

    return normalize_target(raw, [box], out, name="swish_act")


def _reject_boxes(name, input_box, output_box):
    if input_box is not None or output_box is not None:
        raise ValueError(f"target {name!r} is defined directly on the unit cube; "
                         "it takes no input/output boxes")


_BUILTIN_FACTORIES = {
    "euclidean2": _euclidean2,
    "euclidean2_scaled": _euclidean2_scaled,
    "ht_kernel": _ht_kernel,
    "softmax2_c1": _softmax2_c1,
    "softmax3_c1": _softmax3_c1,
    "tanh_act": _tanh_act,
    "swish_act": _swish_act,
}


def available_builtins():
    return tuple(sorted(_BUILTIN_FACTORIES))


def builtin(name: str, input_box=None, output_box=None) -> TargetFunction:
    """Look up a builtin target; activations accept box overrides."""
    try:
        factory = _BUILTIN_FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin target {name!r}; available: {', '.join(available_builtins())}"
        ) from None
    return factory(input_box=input_box, output_box=output_box)


def constant_target(value: float, arity: int = 2) -> TargetFunction:
    """Constant surface; handy for calibration and exactness checks."""
    value = float(value)

    def fn(p):
        return np.full(np.asarray(p).shape[:-1], value)

    return TargetFunction(f"constant_{value:g}", arity, fn)
