import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultracold_jc.expression import (
    ArityError,
    BinOp,
    Call,
    DomainError,
    ExpressionSyntaxError,
    FUNCTIONS,
    Neg,
    Num,
    UnknownIdentifierError,
    Var,
    evaluate,
    evaluate_matrix,
    parse_coupling,
    polynomial_degree,
    quadratic_expr,
    to_text,
)
from ultracold_jc.hilbert import quadrature_ops


def nodes():
    leaves = st.one_of(st.builds(Num, st.floats(0, 100, allow_nan=False)), st.just(Var()))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(Neg, sub),
            st.builds(BinOp, st.sampled_from("+-*/^"), sub, sub),
            st.builds(Call, st.sampled_from(sorted(FUNCTIONS)), sub),
        ),
        max_leaves=12,
    )


@given(nodes())
def test_round_trip(node):
    assert parse_coupling(to_text(node)) == node


def test_precedence():
    assert parse_coupling("-z^2") == Neg(BinOp("^", Var(), Num(2.0)))
    assert parse_coupling("2^3^2") == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))
    assert evaluate(parse_coupling("2^3^2"), 0.0) == 512.0
    assert evaluate(parse_coupling("1 - 2 - 3"), 0.0) == -4.0
    assert evaluate(parse_coupling("8 / 4 / 2"), 0.0) == 1.0
    assert evaluate(parse_coupling("2 * z + 1"), 3.0) == 7.0


def test_vectorized_evaluation():
    z = np.linspace(-2, 2, 9)
    out = evaluate(parse_coupling("sech(z)^2"), z)
    assert np.allclose(out, 1 / np.cosh(z) ** 2)


@pytest.mark.parametrize(
    "text, cls, offset",
    [
        ("1 + foo(z)", UnknownIdentifierError, 4),
        ("sin(z, z)", ArityError, 5),
        ("1 + * z", ExpressionSyntaxError, 4),
        ("(z + 1", ExpressionSyntaxError, 6),
        ("z $ 2", ExpressionSyntaxError, 2),
        ("é + y", ExpressionSyntaxError, 0),
    ],
)
def test_syntax_errors_carry_offsets(text, cls, offset):
    with pytest.raises(cls) as info:
        parse_coupling(text)
    assert info.value.offset == offset


def test_offsets_are_bytes():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_coupling("1 + é")
    assert info.value.offset == 4
    with pytest.raises(UnknownIdentifierError) as info:
        parse_coupling("z*(1)+q")
    assert info.value.offset == 6


@pytest.mark.parametrize("text, z", [("1/z", 0.0), ("sqrt(z)", -1.0), ("exp(z)", 1e4)])
def test_domain_errors(text, z):
    with pytest.raises(DomainError):
        evaluate(parse_coupling(text), z)


@pytest.mark.parametrize(
    "text, degree",
    [("1", 0), ("z", 1), ("1 - 0.5*z^2", 2), ("(z+1)*(z-1)*z", 3), ("z^2/4", 2), ("sin(1)*z", 1), ("sin(z)", None), ("1/z", None), ("z^0.5", None), ("z^z", None)],
)
def test_polynomial_degree(text, degree):
    assert polynomial_degree(parse_coupling(text)) == degree


def test_evaluate_matrix_matches_manual_polynomial():
    _, _, z, _ = quadrature_ops(12)
    m = evaluate_matrix(parse_coupling("1 - 0.5*z^2 + z/2"), z)
    assert np.allclose(m, np.eye(12) - 0.5 * z @ z + z / 2, atol=1e-14)
    with pytest.raises(ValueError):
        evaluate_matrix(parse_coupling("cos(z)"), z)


def test_quadratic_expr():
    node = quadratic_expr(1.0, 0.5, "-")
    assert evaluate(node, 2.0) == pytest.approx(0.0)
    assert polynomial_degree(node) == 2
