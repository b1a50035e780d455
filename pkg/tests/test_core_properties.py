from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from radialop.core import (
    N,
    RadialCoeff,
    RadialOperator,
    conjugate_by_r_power,
    formal_adjoint,
    op_apply,
    op_commutator,
    op_compose,
    substitute_n,
)

from strategies import dimpolys, monomials, operators, rationals

ONE = RadialOperator.identity()
ZERO = RadialOperator.zero()
D = RadialOperator.derivative()
R = RadialOperator.multiplication(RadialCoeff.monomial(1))


@settings(max_examples=150, deadline=None)
@given(operators, operators, operators)
def test_composition_is_associative(a, b, c):
    assert op_compose(op_compose(a, b), c) == op_compose(a, op_compose(b, c))


@settings(max_examples=150, deadline=None)
@given(operators, operators, operators)
def test_composition_distributes_over_addition(a, b, c):
    assert op_compose(a, b + c) == op_compose(a, b) + op_compose(a, c)
    assert op_compose(a + b, c) == op_compose(a, c) + op_compose(b, c)


@given(operators)
def test_identity_element(a):
    assert op_compose(ONE, a) == a == op_compose(a, ONE)
    assert a + ZERO == a


@given(operators)
def test_self_difference_is_zero(a):
    assert (a - a) == ZERO
    assert not (a - a).terms


def test_noncommutativity_witness():
    assert op_commutator(D, R) == ONE


@settings(max_examples=200, deadline=None)
@given(operators, operators, monomials)
def test_leibniz_soundness(a, b, p):
    assert op_apply(op_compose(a, b), p) == op_apply(a, op_apply(b, p))


@settings(max_examples=100, deadline=None)
@given(operators, operators, st.integers(min_value=-3, max_value=12) | rationals)
def test_substitution_is_a_ring_homomorphism(a, b, n0):
    s = lambda x: substitute_n(x, n0)  # noqa: E731
    assert s(a + b) == s(a) + s(b)
    assert s(op_compose(a, b)) == op_compose(s(a), s(b))
    assert s(op_commutator(a, b)) == op_commutator(s(a), s(b))


@settings(max_examples=100, deadline=None)
@given(operators, operators)
def test_adjoint_involution_and_reversal(a, b):
    assert formal_adjoint(formal_adjoint(a)) == a
    assert formal_adjoint(op_compose(a, b)) == op_compose(formal_adjoint(b), formal_adjoint(a))


@settings(max_examples=100, deadline=None)
@given(operators, operators, dimpolys)
def test_conjugation_is_an_invertible_automorphism(a, b, w):
    c = lambda x: conjugate_by_r_power(x, w)  # noqa: E731
    assert c(op_compose(a, b)) == op_compose(c(a), c(b))
    assert c(a + b) == c(a) + c(b)
    assert conjugate_by_r_power(c(a), -w) == a


@settings(max_examples=100, deadline=None)
@given(operators, st.integers(min_value=-5, max_value=5))
def test_conjugation_fixes_multiplication_operators(a, w):
    mult = RadialOperator.multiplication(a.coefficient(0))
    assert conjugate_by_r_power(mult, w) == mult


def test_integer_roots_of_correction_polynomial():
    assert ((N - 1) * (N - 3)).roots_over_integers() == {1, 3}
    assert ((N - 1) * (N - 3) * Fraction(1, 4)).roots_over_integers() == {1, 3}
