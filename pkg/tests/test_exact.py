from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere_avoid.exact import (
    NODE_COMPOSITUM, NODE_QUAD, NODE_QUART, AlgebraicReal, FieldSpec, RatInterval, Sign,
    alg_sign, enclose_constant, enclose_cos_2pi_fraction, enclose_pi, enclose_sqrt,
    format_rational, parse_rational, reduce_mod_minpoly, to_compositum,
)

rats = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


def to_mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


@st.composite
def intervals(draw):
    a, b = draw(rats), draw(rats)
    return RatInterval(min(a, b), max(a, b))


@given(intervals(), intervals(), rats, rats)
def test_interval_arithmetic_contains_pointwise_results(x, y, s, u):
    # pick points inside each interval by convex combination
    lam = abs(s) / (abs(s) + 1)
    mu = abs(u) / (abs(u) + 1)
    p = x.lo + lam * (x.hi - x.lo)
    q = y.lo + mu * (y.hi - y.lo)
    assert p + q in x + y
    assert p - q in x - y
    assert p * q in x * y
    if not (y.lo <= 0 <= y.hi):
        assert p / q in x / y
    assert p**2 in x**2


@given(intervals(), st.integers(8, 200))
def test_rounding_widens_outward(x, bits):
    r = x.rounded(bits)
    assert r.lo <= x.lo and r.hi >= x.hi
    assert r.lo.denominator <= 2**bits and r.hi.denominator <= 2**bits


def test_interval_rejects_reversed_endpoints():
    with pytest.raises(ValueError):
        RatInterval(Fraction(1), Fraction(0))


def test_division_by_interval_containing_zero():
    with pytest.raises(ZeroDivisionError):
        RatInterval.point(1) / RatInterval(Fraction(-1), Fraction(1))


@pytest.mark.parametrize("text,value", [("1/3", Fraction(1, 3)), ("7", Fraction(7)), ("-2/4", Fraction(-1, 2)), ("0.25", Fraction(1, 4))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


def test_format_rational_always_has_denominator():
    assert format_rational(Fraction(3)) == "3/1"
    assert format_rational(Fraction(-2, 6)) == "-1/3"


def test_constants_against_mpmath():
    mpmath.mp.dps = 60
    w = Fraction(1, 10**40)
    pi = enclose_pi(w)
    assert pi.width <= w and pi.lo <= Fraction(mpmath.nstr(mpmath.pi, 55)) <= pi.hi
    for r in (2, 3, Fraction(1, 3), Fraction(5, 7)):
        s = enclose_sqrt(r, w)
        assert s.width <= w
        ref = Fraction(mpmath.nstr(mpmath.sqrt(to_mp(Fraction(r))), 55))
        assert s.lo - Fraction(1, 10**50) <= ref <= s.hi + Fraction(1, 10**50)
    assert enclose_constant("PI", w).width <= w
    assert enclose_constant(("SQRT", 5), Fraction(1, 10**6)).lo < Fraction(2236068, 10**6)


@pytest.mark.parametrize("p,q", [(1, 3), (2, 5), (1, 4), (3, 7), (3, 8), (4, 9)])
def test_cos_enclosure(p, q):
    mpmath.mp.dps = 50
    w = Fraction(1, 10**30)
    c = enclose_cos_2pi_fraction(p, q, w)
    ref = Fraction(mpmath.nstr(mpmath.cos(2 * mpmath.pi * p / q), 45))
    assert c.width <= w
    assert c.lo - Fraction(1, 10**40) <= ref <= c.hi + Fraction(1, 10**40)


def test_cos_outside_domain_rejected():
    with pytest.raises(ValueError):
        enclose_cos_2pi_fraction(1, 6)


def test_cos_quarter_turn_is_exact_zero_or_contains_it():
    c = enclose_cos_2pi_fraction(1, 4, Fraction(1, 10**20))
    assert 0 in c


def test_precision_env_override(monkeypatch):
    from sphere_avoid.exact import default_width

    monkeypatch.setenv("SPHERE_AVOID_PRECISION", "1e-12")
    assert default_width() == Fraction(1, 10**12)
    monkeypatch.delenv("SPHERE_AVOID_PRECISION")
    assert default_width() == Fraction(1, 10**30)


def test_fields_reject_reducible_polynomials():
    with pytest.raises(ValueError):
        FieldSpec.quad(Fraction(1, 4))
    with pytest.raises(ValueError):
        FieldSpec.quart(Fraction(4, 9))
    with pytest.raises(ValueError):
        FieldSpec.compositum(Fraction(1, 5), Fraction(1, 5))
    assert NODE_COMPOSITUM.degree == 8


def test_mixed_radix_index_first_generator_fastest():
    f = NODE_COMPOSITUM
    assert f.index((1, 0)) == 1 and f.index((0, 1)) == 2 and f.index((1, 3)) == 7
    assert all(f.index(f.exponents(k)) == k for k in range(8))


def test_generators_square_back():
    th = AlgebraicReal.generator(NODE_QUAD)
    assert th * th == Fraction(1, 3)
    psi = AlgebraicReal.generator(NODE_QUART)
    assert psi**4 == Fraction(1, 5)
    assert not (psi**2).is_rational()


def test_known_signs():
    th = AlgebraicReal.generator(NODE_QUAD)
    assert alg_sign(th - Fraction(1, 2)) == Sign.POSITIVE
    assert alg_sign(AlgebraicReal.generator(NODE_QUART) - 1) == Sign.NEGATIVE
    phi = to_compositum(th)
    psi = to_compositum(AlgebraicReal.generator(NODE_QUART))
    assert alg_sign(phi + psi) == Sign.POSITIVE
    assert alg_sign(phi - phi) == Sign.ZERO


def test_compositum_arithmetic_matches_floats():
    phi = to_compositum(AlgebraicReal.generator(NODE_QUAD))
    psi = to_compositum(AlgebraicReal.generator(NODE_QUART))
    x = (phi + 2 * psi) * (phi - psi) ** 3
    exp = (3**-0.5 + 2 * 5**-0.25) * (3**-0.5 - 5**-0.25) ** 3
    assert float(x) == pytest.approx(exp, rel=1e-12)
    assert phi * phi == Fraction(1, 3)


def _mp_value(x: AlgebraicReal):
    total = mpmath.mpf(0)
    gens = [mpmath.root(to_mp(a), e) for e, a in x.field.generators]
    for idx, c in enumerate(x.coefficients):
        term = to_mp(c)
        for g, k in zip(gens, x.field.exponents(idx)):
            term *= g**k
        total += term
    return total


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=50), min_size=8, max_size=8))
def test_alg_sign_against_100_digit_mpmath(cs):
    mpmath.mp.dps = 100
    x = AlgebraicReal(NODE_COMPOSITUM, tuple(cs))
    ref = _mp_value(x)
    if all(c == 0 for c in cs):
        assert alg_sign(x) == Sign.ZERO
    else:
        assert ref != 0
        assert alg_sign(x) == (Sign.POSITIVE if ref > 0 else Sign.NEGATIVE)


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=20), min_size=1, max_size=12))
def test_reduce_mod_minpoly_preserves_value_and_is_idempotent(cs):
    mpmath.mp.dps = 60
    for fld in (NODE_QUAD, NODE_QUART):
        (e, a), = fld.generators
        red = reduce_mod_minpoly(cs, fld)
        assert len(red) == e
        assert reduce_mod_minpoly(red, fld) == red
        g = mpmath.root(to_mp(a), e)
        lhs = sum(to_mp(c) * g**k for k, c in enumerate(cs))
        rhs = sum(to_mp(c) * g**k for k, c in enumerate(red))
        assert abs(lhs - rhs) < mpmath.mpf(10) ** -50


def test_reduce_rejects_compositum():
    with pytest.raises(ValueError):
        reduce_mod_minpoly([1, 2], NODE_COMPOSITUM)


def test_enclosure_narrows_and_contains_value():
    mpmath.mp.dps = 60
    x = to_compositum(AlgebraicReal.generator(NODE_QUART)) * 3 - Fraction(1, 7)
    ref = Fraction(mpmath.nstr(_mp_value(x), 50))
    for bits in (64, 128, 256):
        enc = x.enclosure(bits)
        assert enc.lo - Fraction(1, 10**45) <= ref <= enc.hi + Fraction(1, 10**45)
    assert x.enclosure_with_width(Fraction(1, 10**35)).width <= Fraction(1, 10**35)
