from fractions import Fraction

import pytest

from conftest import DEGENERATE, load_family
from residua.forms import INFINITY, ResiduePoint
from residua.residual import (
    Budget,
    NonDegenerate,
    ResidualMeasure,
    degree_ceiling,
    detect_exceptional,
    good_reduction_check,
    iterate_profile,
    residual_measure,
)

ZERO, I, MINUS_I = ResiduePoint.rational(0), ResiduePoint.rational("i"), ResiduePoint.rational("-i")
Q = Fraction


def test_generic_t_z_plus_inv_z():
    mu, report = residual_measure(load_family("t_z_plus_inv_z"), Q(1, 4), 4)
    assert mu.branch == "generic" and not mu.partial
    assert {a.location: a.mass_lower for a in mu.atoms} == {ZERO: Q(5, 16), INFINITY: Q(5, 16), I: Q(1, 16), MINUS_I: Q(1, 16)}
    assert mu.slack == Q(1, 4)
    assert all(a.mass_estimate == a.mass_lower for a in mu.atoms)
    assert len(report) == 4


def test_generic_stops_once_slack_small():
    mu, report = residual_measure(load_family("t_z_plus_inv_z"), Q(1, 2), 6)
    assert mu.slack <= Q(1, 2)
    assert len(report) < 6


def test_partial_when_budget_reached():
    mu, _ = residual_measure(load_family("mobius_quotient"), Q(1, 100), 6)
    assert mu.partial
    assert mu.mass(ZERO) == Q(31, 32)


@pytest.mark.parametrize("name, atom, excluded", [("t_z2", INFINITY, ZERO), ("z2_over_t", ZERO, INFINITY)])
def test_exceptional(name, atom, excluded):
    mu, _ = residual_measure(load_family(name), Q(1, 100), 6)
    assert mu.branch == "exceptional"
    assert mu.mass(atom) == 1 and mu.slack == 0
    assert mu.excluded_direction == (excluded,)


def test_exceptional_detection_needs_full_window():
    assert detect_exceptional(load_family("t_z_plus_inv_z")) is None
    orbit = detect_exceptional(load_family("t_z2"))
    assert orbit.points == (ZERO,)


def test_non_degenerate_guard():
    from residua.config import FamilySpec
    from conftest import FAMILIES
    f = FamilySpec.load(FAMILIES / "z2_plus_t.json").to_pair()
    assert good_reduction_check(f) == "NonDegenerate"
    with pytest.raises(NonDegenerate):
        residual_measure(f, Q(1, 10), 3)
    assert good_reduction_check(load_family("t_z2")) == "Degenerate"


@pytest.mark.parametrize("name", DEGENERATE)
def test_surplus_ratio_monotone(name):
    report = iterate_profile(load_family(name), 4)
    d = report.d
    seen = set()
    for n in range(1, 5):
        seen.update(report[n].profile.points())
    for x in seen:
        ratios = [Fraction(report[n].profile.s(x), d**n) for n in range(1, 5)]
        assert ratios == sorted(ratios), (x, ratios)


@pytest.mark.parametrize("name", DEGENERATE)
def test_degree_bookkeeping(name):
    report = iterate_profile(load_family(name), 4)
    for n in range(1, 5):
        red = report[n].reduced
        assert red.deg_phi + red.H.degree == 2**n
        if n > 1:
            assert red.deg_phi == report[n].factor_deg * report[n - 1].reduced.deg_phi


def test_degree_ceiling():
    assert degree_ceiling(2) == 64 and degree_ceiling(3) == 81


def test_ceiling_stops_iteration():
    with pytest.raises(Budget):
        iterate_profile(load_family("t_z_plus_inv_z"), 6, ceiling=16)
    mu, report = residual_measure(load_family("t_z_plus_inv_z"), Q(1, 100), 6, ceiling=16)
    assert mu.partial and report.stopped_by_budget and len(report) == 4


def test_residual_json_roundtrip():
    mu, _ = residual_measure(load_family("t_z_plus_inv_z"), Q(1, 4), 4)
    assert ResidualMeasure.from_json(mu.to_json()) == mu
    mu, _ = residual_measure(load_family("t_z2"), Q(1, 4), 4)
    assert ResidualMeasure.from_json(mu.to_json()) == mu


def test_masses_must_sum_to_one():
    mu, _ = residual_measure(load_family("t_z_plus_inv_z"), Q(1, 4), 4)
    with pytest.raises(ValueError):
        ResidualMeasure(mu.atoms, Q(1, 2), "generic")
