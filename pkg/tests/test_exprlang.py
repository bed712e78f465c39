"""Parser, printer, and jet evaluation of the expression language."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subgeo.errors import EvalDomain, ExprSyntaxError
from subgeo.exprlang import Bin, Call, Const, Neg, Pow, Var, eval_jet, parse, to_text


def test_eval_polynomial_jet():
    node = parse("x1^2*x2 + 3*x2", 2)
    j = eval_jet(node, (2.0, 5.0), 2)
    assert j.value == pytest.approx(35.0)
    assert j.grad == pytest.approx([20.0, 7.0])
    assert j.hess[0][0] == pytest.approx(10.0)
    assert j.hess[0][1] == pytest.approx(4.0)
    assert j.hess[1][1] == pytest.approx(0.0)


def test_pythagorean_identity_flattens():
    node = parse("sin(x1)^2 + cos(x1)^2", 1)
    j = eval_jet(node, (0.83,), 2)
    assert j.value == pytest.approx(1.0)
    assert j.grad[0] == pytest.approx(0.0, abs=1e-14)
    assert j.hess[0][0] == pytest.approx(0.0, abs=1e-13)


def test_precedence_and_associativity():
    assert eval_jet(parse("2*x1 + 3^2", 1), (5.0,), 0).value == pytest.approx(19.0)
    assert eval_jet(parse("-x1^2", 1), (3.0,), 0).value == pytest.approx(-9.0)
    assert eval_jet(parse("2^-2", 1), (0.0,), 0).value == pytest.approx(0.25)
    # division is left associative
    assert eval_jet(parse("x1/x2/x2", 2), (8.0, 2.0), 0).value == pytest.approx(2.0)
    assert eval_jet(parse("x1 - x2 - x2", 2), (8.0, 2.0), 0).value == pytest.approx(4.0)


def test_all_functions_evaluate():
    vals = {
        "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
        "sin": math.sin, "cos": math.cos, "tanh": math.tanh,
    }
    for name, ref in vals.items():
        node = parse(f"{name}(x1)", 1)
        assert eval_jet(node, (0.73,), 1).value == pytest.approx(ref(0.73))


def test_syntax_error_offsets():
    with pytest.raises(ExprSyntaxError) as e:
        parse("x1+*x2", 2)
    assert e.value.offset == 3
    with pytest.raises(ExprSyntaxError) as e:
        parse("x1+", 2)
    assert e.value.offset == 3
    with pytest.raises(ExprSyntaxError) as e:
        parse("(x1", 2)
    assert e.value.offset == 3
    with pytest.raises(ExprSyntaxError) as e:
        parse("x1 @ x2", 2)
    assert e.value.offset == 3


def test_unknown_names_rejected():
    with pytest.raises(ExprSyntaxError):
        parse("x3", 2)  # index beyond the chart dimension
    with pytest.raises(ExprSyntaxError):
        parse("foo(x1)", 2)
    with pytest.raises(ExprSyntaxError):
        parse("u1", 2)  # fiber names need bundle mode


def test_exponent_must_be_integer_literal():
    with pytest.raises(ExprSyntaxError):
        parse("x1^x2", 2)
    with pytest.raises(ExprSyntaxError):
        parse("x1^1.5", 2)
    assert isinstance(parse("x1^-3", 1), Pow)


def test_bundle_variables():
    node = parse("x2*u1", 4, bundle=True)
    # u1 addresses the first fiber slot, here index 2 of 4
    assert eval_jet(node, (1.0, 2.0, 3.0, 4.0), 0).value == pytest.approx(6.0)
    g = eval_jet(node, (1.0, 2.0, 3.0, 4.0), 1).grad
    assert g == pytest.approx([0.0, 3.0, 2.0, 0.0])
    with pytest.raises(ExprSyntaxError):
        parse("u3", 4, bundle=True)


def test_domain_error_at_evaluation():
    node = parse("log(x1)", 1)
    with pytest.raises(EvalDomain):
        eval_jet(node, (-2.0,), 1)


def test_to_text_round_trips_by_hand():
    for text in ("x1 + x2*x3", "-(x1 - 2)", "exp(x1)^2/(1 + x2^2)", "sqrt(x1)/x2"):
        node = parse(text, 3)
        again = parse(to_text(node), 3)
        assert again == node


_consts = st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0, 3.25])
_vars = st.integers(min_value=0, max_value=2).map(lambda i: Var(f"x{i + 1}", i))
_leaf = st.one_of(_consts.map(Const), _vars)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(
            lambda t: Bin(t[0], t[1], t[2])),
        st.tuples(children, st.integers(min_value=-3, max_value=3)).map(
            lambda t: Pow(t[0], t[1])),
        st.tuples(st.sampled_from(["exp", "sin", "cos", "tanh"]), children).map(
            lambda t: Call(t[0], t[1])),
    )


ast_nodes = st.recursive(_leaf, _extend, max_leaves=12)


@given(node=ast_nodes)
@settings(max_examples=120, deadline=None)
def test_printer_parser_round_trip(node):
    assert parse(to_text(node), 3) == node
