from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from residua.scalars import (
    FS_ONE,
    FS_T,
    FieldScalar,
    GaussianRational,
    GPoly,
    NegativeValuation,
    NoLift,
    SeriesTrunc,
    convolve,
    format_gaussian,
    format_scalar,
    gpoly_gcd,
    newton_lift,
    parse_gaussian,
    parse_scalar,
    squarefree_decomposition,
)

small = st.integers(-6, 6)
gauss = st.builds(GaussianRational, st.fractions(-5, 5, max_denominator=4), st.fractions(-5, 5, max_denominator=4))
gpolys = st.lists(st.builds(GaussianRational, small, small), min_size=1, max_size=4).map(GPoly.from_coeffs)


@st.composite
def scalars(draw, allow_zero=True):
    num = draw(gpolys)
    den = draw(gpolys.filter(lambda p: not p.is_zero()))
    k = draw(st.integers(-3, 3))
    x = FieldScalar.from_polys(num, den) * FieldScalar.t_power(k)
    if not allow_zero and x.is_zero():
        return FS_ONE
    return x


def test_valuation_examples():
    assert parse_scalar("t^2/(1+t)").val() == 2
    assert parse_scalar("3*t/(t - t^2)").val() == 0
    assert parse_scalar("0").is_zero()
    assert parse_scalar("(2+t)/(2-t)").reduce_at_zero() == GaussianRational(1)
    assert parse_scalar("i*t/(2*t + t^2)").reduce_at_zero() == GaussianRational(0, Fraction(1, 2))


def test_reduce_negative_valuation_raises():
    with pytest.raises(NegativeValuation):
        parse_scalar("1/t").reduce_at_zero()


@pytest.mark.parametrize("text", ["t", "1 + 2*i*t^3", "t^-1*(1 + t)", "(3/2 - i)*t^2/(1 - t)", "-i"])
def test_scalar_roundtrip(text):
    x = parse_scalar(text)
    assert parse_scalar(format_scalar(x)) == x


def test_parser_juxtaposition_and_power_forms():
    assert parse_scalar("2t") == parse_scalar("2*t")
    assert parse_scalar("t**3") == FS_T ** 3
    assert parse_scalar("(1+t)(1-t)") == parse_scalar("1 - t^2")


@given(gauss)
def test_gaussian_roundtrip(x):
    assert parse_gaussian(format_gaussian(x)) == x


@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=30), st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=30))
def test_convolve_matches_schoolbook(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    got = convolve(a, b)
    assert got + [0] * (len(out) - len(got)) == out


@given(scalars(), scalars())
def test_valuation_multiplicative(x, y):
    if x.is_zero() or y.is_zero():
        assert (x * y).is_zero()
    else:
        assert (x * y).val() == x.val() + y.val()


@given(scalars(), scalars())
def test_ultrametric(x, y):
    s = x + y
    if not s.is_zero():
        assert s.val() >= min(x.val(), y.val())
    if not x.is_zero() and not y.is_zero() and x.val() != y.val():
        assert s.val() == min(x.val(), y.val())


@given(scalars(), scalars())
def test_reduction_is_ring_homomorphism(x, y):
    if x.is_zero() or y.is_zero() or x.val() < 0 or y.val() < 0:
        return
    rx, ry = x.reduce_at_zero(), y.reduce_at_zero()
    assert (x * y).reduce_at_zero() == rx * ry
    assert (x + y).reduce_at_zero() == rx + ry


@given(scalars(allow_zero=False))
def test_inverse(x):
    assert x * x.inverse() == FS_ONE


@given(scalars(), scalars(), scalars())
@settings(max_examples=50)
def test_field_axioms(x, y, u):
    assert x * (y + u) == x * y + x * u
    assert (x - y) + y == x


@given(gpolys, gpolys)
def test_gcd_divides(a, b):
    if a.is_zero() and b.is_zero():
        return
    g = gpoly_gcd(a, b)
    assert a.divmod(g)[1].is_zero() and b.divmod(g)[1].is_zero()


@given(gpolys.filter(lambda p: p.degree() >= 1))
def test_squarefree_decomposition_reassembles(p):
    prod = GPoly.constant(p.leading())
    for fac, k in squarefree_decomposition(p):
        prod = prod * fac ** k
    assert prod == p


def test_newton_lift_square_root():
    # z^2 - (1 + t) from the seed 1
    s = newton_lift(["-1 - t", "0", "1"], 1, 3)
    assert [s.coeff(k) for k in range(4)] == [GaussianRational(c) for c in (1, Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16))]


def test_newton_lift_rejects_double_root():
    with pytest.raises(NoLift):
        newton_lift(["t", "0", "1"], 0, 3)


@given(st.builds(GaussianRational, small, small).filter(lambda c: c != GaussianRational(0)), st.integers(2, 6))
def test_newton_residual_valuation(c, order):
    # F(z) = z^2 - c^2 (1 + t) has simple roots +-c at t = 0
    c2 = c * c
    F = [FieldScalar.constant(-c2) * (FS_ONE + FS_T), FieldScalar.zero(), FS_ONE]
    s = newton_lift(F, c, order)
    resid = s * s - SeriesTrunc.from_scalar(F[0] * FieldScalar.constant(-1), order + 1)
    assert resid.valuation() >= order + 1
