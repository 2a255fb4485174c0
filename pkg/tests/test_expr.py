import pytest
from hypothesis import given, settings, strategies as st

from fixpoint.errors import EvaluationError, ParseError, UnknownIdentifierError
from fixpoint.expr import (
    BinOp, Call, Compare, Const, Neg, Piecewise, Var, compile_ast, evaluate_ast, parse_expression, pretty,
)


def test_parse_flip():
    assert parse_expression("1 - x") == BinOp("-", Const(1.0), Var())


def test_parse_step_map():
    ast = parse_expression("piecewise(x < 1, 0, 0.5)")
    assert ast == Piecewise(Compare("<", Var(), Const(1.0)), Const(0.0), Const(0.5))
    assert evaluate_ast(ast, 1.0) == 0.5
    assert evaluate_ast(ast, 0.999) == 0.0


def test_precedence_and_unary():
    ast = parse_expression("-x + 2 * x / 4")
    assert ast == BinOp("+", Neg(Var()), BinOp("/", BinOp("*", Const(2.0), Var()), Const(4.0)))
    assert evaluate_ast(ast, 2.0) == -1.0
    assert evaluate_ast(parse_expression("max(abs(x - 1), min(x, 0.25))"), 0.5) == 0.5


@pytest.mark.parametrize("src, pos, token", [
    ("1 + * 2", 4, "*"),
    ("(1 - x", 6, ""),
    ("abs(x, 1)", 0, "abs"),
    ("piecewise(x, 1, 2)", 11, ","),
    ("1 $ 2", 2, "$"),
])
def test_syntax_errors(src, pos, token):
    with pytest.raises(ParseError) as exc:
        parse_expression(src)
    assert exc.value.position == pos
    assert exc.value.token == token


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as exc:
        parse_expression("sin(x)")
    assert exc.value.token == "sin"


def test_empty_source():
    with pytest.raises(ParseError):
        parse_expression("  ")


def test_division_by_zero_is_an_evaluation_error():
    ast = parse_expression("1 / x")
    with pytest.raises(EvaluationError):
        evaluate_ast(ast, 0.0)
    with pytest.raises(EvaluationError):
        compile_ast(ast)(0.0)


numbers = st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False).filter(
    lambda v: str(v)[0] != "-")
cmp_ops = st.sampled_from(["<", "<=", "==", ">=", ">"])


def _extend(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(BinOp, st.sampled_from("+-*/"), children, children),
        st.builds(lambda a: Call("abs", (a,)), children),
        st.builds(lambda n, a, b: Call(n, (a, b)), st.sampled_from(["min", "max"]), children, children),
        st.builds(Piecewise, st.builds(Compare, cmp_ops, children, children), children, children),
    )


asts = st.recursive(st.one_of(st.builds(Const, numbers), st.just(Var())), _extend, max_leaves=12)


@given(asts)
@settings(max_examples=300)
def test_pretty_round_trip(ast):
    assert parse_expression(pretty(ast)) == ast


@given(asts, st.floats(min_value=-3, max_value=3))
@settings(max_examples=300)
def test_compiled_matches_interpreter(ast, x):
    try:
        expected = evaluate_ast(ast, x)
    except (EvaluationError, OverflowError):
        return
    got = compile_ast(ast)(x)
    assert got == expected or (got != got and expected != expected)
