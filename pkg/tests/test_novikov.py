from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from novikovsq.novikov import (
    GF,
    INF,
    QQ,
    CutoffMismatch,
    NonUnitError,
    NovikovFieldScalar,
    NovikovScalar,
    exponent,
    field_from_spec,
    format_scalar,
    parse_scalar,
    serialize_scalar,
)

from randgen import as_dict, dict_add, dict_mul

T = NovikovScalar.monomial
half = Fraction(1, 2)


exps = st.fractions(min_value=0, max_value=4, max_denominator=6)
coeffs = st.integers(min_value=-4, max_value=4)
cutoffs = st.sampled_from([Fraction(1), Fraction(5, 2), INF])


def scalars(cutoff):
    return st.lists(st.tuples(exps, coeffs), max_size=5).map(lambda ts: NovikovScalar(ts, cutoff))


# --- examples ---------------------------------------------------------------


def test_add_cancels():
    assert (NovikovScalar.one() + T(half)) + (-T(half)) == NovikovScalar.one()


def test_add_zero_identity():
    x = NovikovScalar([(0, 2), (half, -1)])
    assert x + NovikovScalar.zero() == x


def test_add_truncates_at_cutoff():
    c = Fraction(5, 2)
    assert T(2, 1, c) + T(3, 1, c) == T(2, 1, c)


def test_monomial_product():
    assert T(Fraction(1, 3)) * T(Fraction(5, 4)) == T(Fraction(19, 12))


def test_difference_of_squares():
    one = NovikovScalar.one()
    assert (one + T(half)) * (one - T(half)) == one - T(1)


def test_inverse_examples():
    c = 3
    x = NovikovScalar([(0, 1), (1, 1)], c)
    inv = x.inv()
    assert inv == NovikovScalar([(0, 1), (1, -1), (2, 1)], c)
    assert x * inv == NovikovScalar.one(c)
    assert NovikovScalar.one(c).inv() == NovikovScalar.one(c)
    with pytest.raises(NonUnitError):
        T(half, 1, c).inv()


def test_inverse_needs_finite_cutoff():
    with pytest.raises(ValueError):
        NovikovScalar([(0, 1), (1, 1)]).inv()


def test_valuation_examples():
    assert (T(Fraction(3, 2)) + T(2)).valuation() == Fraction(3, 2)
    assert NovikovScalar.zero().valuation() == INF


def test_cutoff_mismatch():
    with pytest.raises(CutoffMismatch):
        T(0, 1, 2) + T(0, 1, 3)


def test_field_scalar_examples():
    assert NovikovFieldScalar.monomial(-2) * NovikovFieldScalar.monomial(2) == NovikovFieldScalar.monomial(0)
    x = NovikovFieldScalar([(1, 1), (2, 1)])
    inv = x.inv(precision=2)
    assert inv.terms == ((Fraction(-1), 1), (Fraction(0), -1), (Fraction(1), 1))
    assert inv.precision == 2
    prod = (x * inv).truncate(1)
    assert prod == NovikovFieldScalar.monomial(0, 1, 1)
    with pytest.raises(ZeroDivisionError):
        NovikovFieldScalar().inv()


@pytest.mark.parametrize("eps,delta,expected", [(1, 0, True), (-1, 1, True), (-2, 1, False), (0, 0, True)])
def test_filtration(eps, delta, expected):
    x = NovikovFieldScalar([(eps, 1), (eps + 1, 3)])
    assert x.in_filtration(-delta) is expected


def test_prime_field_arithmetic():
    F5 = GF(5)
    x = parse_scalar("3 + 4*T^(1/2)", 2, F5)
    y = parse_scalar("2", 2, F5)
    assert (x * y).terms == ((0, F5(1)), (half, F5(3)))
    assert x.inv() * x == NovikovScalar.one(2, F5)
    assert field_from_spec("fp:5") == F5
    with pytest.raises(ValueError):
        GF(6)


def test_literal_grammar():
    a = parse_scalar("1/2 - 3*T^(2/3) + T @cutoff 5/2")
    assert a.cutoff == Fraction(5, 2)
    assert a.terms == ((0, half), (Fraction(2, 3), -3), (1, 1))
    assert serialize_scalar(a) == "1/2 - 3*T^(2/3) + T @cutoff 5/2"
    assert parse_scalar("0 @inf").is_zero()
    for bad in ["", "T^", "x + 1", "1 ++ T"]:
        with pytest.raises(ValueError):
            parse_scalar(bad)


def test_exponent_coercion():
    assert exponent("inf") == INF
    assert exponent("3/4") == Fraction(3, 4)
    with pytest.raises(TypeError):
        exponent(0.5)


# --- properties -------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(cutoffs.flatmap(lambda c: st.tuples(scalars(c), scalars(c), scalars(c))))
def test_ring_axioms(abc):
    a, b, c = abc
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)


@settings(max_examples=200, deadline=None)
@given(cutoffs.flatmap(lambda c: st.tuples(scalars(c), scalars(c))))
def test_matches_dict_oracle(ab):
    a, b = ab
    cut = a.cutoff
    assert as_dict(a + b) == dict_add(as_dict(a), as_dict(b), cut)
    assert as_dict(a * b) == dict_mul(as_dict(a), as_dict(b), cut)


@settings(max_examples=200, deadline=None)
@given(cutoffs.flatmap(lambda c: st.tuples(scalars(c), scalars(c))))
def test_valuation_laws(ab):
    a, b = ab
    va, vb = a.valuation(), b.valuation()
    s = (a + b).valuation()
    assert s >= min(va, vb)
    if va != vb:
        assert s == min(va, vb)
    if va + vb < a.cutoff:
        assert (a * b).valuation() == va + vb
        assert not (a * b).is_zero()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([Fraction(1), Fraction(5, 2), Fraction(7, 3)]).flatmap(scalars))
def test_units_are_valuation_zero(a):
    if a.valuation() == 0:
        assert a * a.inv() == NovikovScalar.one(a.cutoff)
    else:
        with pytest.raises(NonUnitError):
            a.inv()


@settings(max_examples=200, deadline=None)
@given(cutoffs.flatmap(scalars))
def test_serialization_round_trip(a):
    assert parse_scalar(serialize_scalar(a)) == a
    assert parse_scalar(format_scalar(a), a.cutoff) == a


def test_qq_coercion_rejects_fp():
    with pytest.raises(TypeError):
        QQ(GF(3)(1))
