import pytest
from hypothesis import given, settings, strategies as st

from valdiff.errors import ExpressionSyntaxError, UsageError
from valdiff.expressions import (BinOp, Gen, Neg, Num, Pow, S, Sigma, T, Tuple, Var, parse,
                                 parse_element, parse_polynomial, parse_residue, to_text)
from valdiff.hahn_series import HahnRing
from valdiff.residue_fields import FiniteFieldTower, RationalShiftField, RatShiftElement, fq_generator
from valdiff.sigma_polynomials import SigmaPolynomial, complexity
from valdiff.witt_vectors import WittRing

X = SigmaPolynomial.x

leaves = st.one_of(st.integers(0, 30).map(Num), st.just(Var()), st.just(T()), st.just(S()),
                   st.integers(2, 5).map(Gen))


def _extend(children):
    return st.one_of(
        st.tuples(st.integers(1, 3), children).map(lambda kc: Sigma(*kc)),
        children.map(Neg),
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda o: BinOp(*o)),
        st.tuples(children, st.integers(-3, 4)).map(lambda be: Pow(*be)),
        st.lists(children, min_size=2, max_size=4).map(lambda xs: Tuple(tuple(xs))),
    )


expressions = st.recursive(leaves, _extend, max_leaves=12)

CORPUS = [
    "x", "s(x)", "s^2(x) - x", "s(x)^2*x - 3*s(x) + 1", "x*s(x)", "s(x) - x - t",
    "t^-2*(3 + s*t + t^3)", "(1,w,0,0)", "(w_3,0,1)", "-x", "--x", "-(x + 1)", "x - (x - 1)",
    "(x - x) - x", "(x^2)^3", "s(s(x))", "s(x + t)*s^3(x)", "w*w + w + 1",
    "2*s*x", "s - s(x)", "t^0", "x^-1", "(s(x), x)", "((1,0),(0,1))", "1 - 2 - 3",
]


def test_grammar_examples():
    F = parse_polynomial("s(x)^2*x - 3*s(x) + 1")
    assert F.order() == 1 and complexity(F) == (1, 2, 3)
    assert parse_polynomial("s^2(x) - x").order() == 2
    assert parse_polynomial("x*s(x)") == X(0) * X(1)
    assert parse_polynomial("s(s(x))") == parse_polynomial("s^2(x)") == X(2)


def test_syntax_error_position():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("s(x")
    assert (info.value.line, info.value.column) == (1, 4)
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("x +\n  y")
    assert (info.value.line, info.value.column) == (2, 3)
    with pytest.raises(ExpressionSyntaxError):
        parse("x $ 1")
    with pytest.raises(ExpressionSyntaxError):
        parse("")


def test_sigma_on_subexpressions():
    assert parse_polynomial("s(x + x^2)") == X(1) + X(1) ** 2
    assert parse_polynomial("s^2(x*s(x))") == X(2) * X(3)


@pytest.mark.parametrize("text", CORPUS)
def test_corpus_round_trip(text):
    node = parse(text)
    assert parse(to_text(node)) == node


@given(expressions)
@settings(max_examples=300, deadline=None)
def test_printer_round_trip(node):
    assert parse(to_text(node)) == node


def test_left_associativity():
    assert parse("1 - 2 - 3") == BinOp("-", BinOp("-", Num(1), Num(2)), Num(3))
    assert to_text(BinOp("-", Num(1), BinOp("-", Num(2), Num(3)))) == "1 - (2 - 3)"


# -- literals per backend

def test_witt_literals(omega):
    R = WittRing(2, 4, FiniteFieldTower(2))
    a = parse_element("(1,w,0,0)", R)
    assert a == R.element([1, omega, 0, 0])
    assert parse_element("3", R) == R.from_int(3)
    assert parse_element("(w_3,0,0,0)", R).components[0] == fq_generator(2, 3)
    # short tuples are padded with zero components, long ones are refused
    assert parse_element("(1,w)", R) == R.element([1, omega, 0, 0])
    with pytest.raises(UsageError):
        parse_element("(1,0,0,0,0)", R)


def test_hahn_literals():
    R = HahnRing(RationalShiftField(), 6)
    s = RatShiftElement.s()
    x = parse_element("t^-2*(3 + s*t + t^3)", R)
    assert R.valuation(x) == -2
    assert x.coefficient(-1) == s and x.coefficient(1) == 1
    G = parse_polynomial("s(x) - x - t", R)
    assert G == X(1) - X(0) - R.t()


def test_negative_power_needs_invertible_constant():
    R = HahnRing(RationalShiftField(), 6)
    assert parse_element("t^-1", R) == R.t(-1)
    with pytest.raises(UsageError):
        parse_polynomial("x^-1", R)


def test_residue_literals(omega):
    F = FiniteFieldTower(2)
    assert parse_residue("w + 1", F) == omega + 1
    Q = RationalShiftField()
    assert parse_residue("s^2 - 1", Q) == RatShiftElement.s() ** 2 - 1

