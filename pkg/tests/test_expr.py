"""Expression parsing, evaluation, and canonical printing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smurf.errors import ExpressionError
from smurf.expr import (
    BinOp,
    Call,
    Neg,
    Num,
    Var,
    expression_target,
    parse_expression,
    to_text,
)
from smurf.targets import builtin


def _ev(text, *vals):
    return parse_expression(text).evaluate(np.array(vals))


class TestParsing:
    def test_identity(self):
        ast = parse_expression("x1")
        assert ast == Var(0)

    def test_precedence_mul_over_add(self):
        assert _ev("2 + 3 * 4", 0.0) == 14.0

    def test_power_binds_tightest(self):
        assert _ev("2 * 3 ^ 2", 0.0) == 18.0

    def test_power_right_associative(self):
        assert _ev("2 ^ 3 ^ 2", 0.0) == 512.0

    def test_unary_minus_below_power(self):
        assert _ev("-2 ^ 2", 0.0) == -4.0

    def test_unary_minus_above_mul(self):
        assert _ev("-2 * 3", 0.0) == -6.0

    def test_left_associative_subtraction(self):
        assert _ev("10 - 4 - 3", 0.0) == 3.0

    def test_parentheses(self):
        assert _ev("(2 + 3) * 4", 0.0) == 20.0

    def test_function_call(self):
        assert abs(_ev("sin(x1) * cas(x2)", 1.0, 0.5)
                   - math.sin(1.0) * (math.sin(0.5) + math.cos(0.5))) <= 1e-15

    def test_scientific_notation(self):
        assert _ev("1e-2 + 2.5e1", 0.0) == 25.01

    def test_syntax_error_carries_position(self):
        with pytest.raises(ExpressionError) as err:
            parse_expression("sin(x1) +")
        assert err.value.position is not None

    def test_unknown_identifier(self):
        with pytest.raises(ExpressionError):
            parse_expression("y1 + 1")

    def test_unknown_function(self):
        with pytest.raises(ExpressionError):
            parse_expression("gamma(x1)")

    def test_function_arity_mismatch(self):
        with pytest.raises(ExpressionError):
            parse_expression("sin(x1, x2)")

    def test_empty_rejected(self):
        with pytest.raises(ExpressionError):
            parse_expression("   ")

    def test_trailing_garbage(self):
        with pytest.raises(ExpressionError):
            parse_expression("x1 x2")


class TestAgainstBuiltins:
    def test_ht_kernel_equivalence_on_grid(self):
        target = expression_target("sin(x1)*cas(x2)")
        ref = builtin("ht_kernel")
        axes = np.linspace(0, 1, 33)
        pts = np.stack(np.meshgrid(axes, axes, indexing="ij"), axis=-1).reshape(-1, 2)
        assert np.abs(target(pts) - ref(pts)).max() < 1e-12

    def test_euclidean_equivalence_on_grid(self):
        target = expression_target("sqrt(x1^2 + x2^2)")
        ref = builtin("euclidean2")
        axes = np.linspace(0, 1, 33)
        pts = np.stack(np.meshgrid(axes, axes, indexing="ij"), axis=-1).reshape(-1, 2)
        assert np.abs(target(pts) - ref(pts)).max() < 1e-12


_leaf = st.one_of(
    st.builds(Num, st.floats(0.1, 9.9).map(lambda v: round(v, 3))),
    st.builds(Var, st.integers(0, 2)),
)


def _trees(depth):
    if depth == 0:
        return _leaf
    sub = _trees(depth - 1)
    return st.one_of(
        _leaf,
        st.builds(Neg, sub),
        st.builds(Call, st.sampled_from(["sin", "cos", "exp", "tanh"]), sub),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), sub, sub),
    )


class TestRoundTrip:
    @given(_trees(3))
    @settings(max_examples=300, deadline=None)
    def test_print_parse_print_fixed_point(self, tree):
        text = to_text(tree)
        reparsed = parse_expression(text)
        assert to_text(reparsed) == text

    @given(_trees(3))
    @settings(max_examples=100, deadline=None)
    def test_reparsed_tree_is_identical(self, tree):
        assert parse_expression(to_text(tree)) == tree


class TestExpressionTarget:
    def test_arity_inference(self):
        assert expression_target("x1 + x3").arity == 3

    def test_declared_arity_must_cover_variables(self):
        with pytest.raises(ExpressionError):
            expression_target("x1 + x3", arity=2)

    def test_literal_constant(self):
        t = expression_target("0.5", arity=2)
        assert t([0.1, 0.9]) == 0.5
        assert t.arity == 2

    def test_canonical_expression_recorded(self):
        t = expression_target("sin( x1 ) * cas(x2)")
        assert t.expression == "sin(x1) * cas(x2)"

    def test_boxed_expression_normalizes(self):
        t = expression_target("tanh(x1)", input_boxes=[(-2.0, 2.0)], output_box="auto")
        ref = builtin("tanh_act", input_box=(-2.0, 2.0))
        pts = np.linspace(0, 1, 17).reshape(-1, 1)
        assert np.abs(t(pts) - ref(pts)).max() <= 1e-12

    def test_box_count_must_match(self):
        with pytest.raises(ExpressionError):
            expression_target("x1 + x2", input_boxes=[(0, 1)])
