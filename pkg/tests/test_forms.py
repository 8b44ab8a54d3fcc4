import pytest
from hypothesis import given, strategies as st

from residua.forms import (
    INFINITY,
    Form,
    ResiduePoint,
    chordal,
    eval_form_ratio,
    form_gcd,
    form_points,
    irreducible_factors,
    ord_at,
    parse_point,
    preimage_points,
    wronskian,
)
from residua.scalars import GaussianRational, GPoly

ZERO = ResiduePoint.rational(0)


def form(degree, *coeffs):
    return Form(degree, GPoly.from_coeffs(coeffs))


def test_form_strings_and_order_at_infinity():
    zw = form(2, 0, 1)  # dehomogenized z*w -> z
    assert zw.to_string() == "z*w"
    assert zw.ord_infinity() == 1
    assert form(2, 1, 0, 1).to_string() == "z^2 + w^2"


def test_gaussian_factors_split():
    facs = irreducible_factors(GPoly.from_coeffs([1, 0, 1]))
    assert {ResiduePoint(f, 0).label() for f, _ in facs} == {"i", "-i"}


def test_algebraic_points():
    F = form(2, -2, 0, 1)  # z^2 - 2 is irreducible over Q(i)
    pts = form_points(F)
    assert len(pts) == 2 and all(not x.is_rational for x, _ in pts)
    assert {round(x.approx.real, 9) for x, _ in pts} == {-1.414213562, 1.414213562}
    # the squaring map sends both to 2
    sq, one = form(2, 0, 0, 1), form(2, 1)
    assert all(eval_form_ratio(sq, one, x) == ResiduePoint.rational(2) for x, _ in pts)


def test_preimages_of_algebraic_value():
    sq, one = form(2, 0, 0, 1), form(2, 1)
    pre = preimage_points(sq, one, ResiduePoint.rational(3))
    assert len(pre) == 2
    assert all(ord_at(form(2, -3, 0, 1), x) == 1 for x in pre)


def test_gcd_includes_infinity():
    a = form(2, 0, 1)  # z*w
    b = form(2, 1, 0)  # w^2
    assert form_gcd(a, b).to_string() == "w"


def test_wronskian_critical_points():
    # z + 1/z = (z^2 + w^2)/(z w) is critical at +-1
    W = wronskian(form(2, 1, 0, 1), form(2, 0, 1))
    assert W.degree == 2
    assert {x.label() for x, _ in form_points(W)} == {"1", "-1"}


@pytest.mark.parametrize("text", ["0", "inf", "i", "-1/2 + 3*i"])
def test_point_roundtrip(text):
    x = parse_point(text)
    assert parse_point(x.label()) == x
    assert ResiduePoint.from_json(x.to_json()) == x


def test_algebraic_point_json():
    x = form_points(form(2, -2, 0, 1))[1][0]
    assert ResiduePoint.from_json(x.to_json()) == x


@given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_chordal_symmetric_and_bounded(a, b):
    assert chordal(a, b) == pytest.approx(chordal(b, a))
    assert 0 <= chordal(a, b) <= 2 + 1e-12
    assert chordal(a, complex("inf")) <= 2
