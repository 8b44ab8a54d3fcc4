from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import DEGENERATE, load_family
from residua.forms import INFINITY, ResiduePoint
from residua.homogeneous import MobiusK, normalize_pair, split_reduction
from residua.multiplicities import (
    AtomicMeasure,
    Component,
    SurfaceMeasure,
    local_degree,
    mult_profile,
    mult_table,
    paired_pullback,
    preimages,
    surface_pullback,
)
from residua.normalization import iterate, make_nonconstant
from residua.scalars import FS_T

ZERO, ONE, I = ResiduePoint.rational(0), ResiduePoint.rational(1), ResiduePoint.rational("i")
MINUS_I = ResiduePoint.rational("-i")


def _reduced(name, n):
    return make_nonconstant(iterate(load_family(name), n))


def test_profile_fourth_iterate(tz):
    prof = mult_profile(_reduced("t_z_plus_inv_z", 4).reduced)
    assert prof.entries[ZERO] == (1, 5)
    assert prof.entries[INFINITY] == (1, 5)
    assert prof.entries[I] == (1, 1) and prof.entries[MINUS_I] == (1, 1)
    assert prof.surplus_total() == 16 - prof.deg_phi


def test_local_degree_critical_point(tz):
    # t(z + 1/z) reduces to a constant; after rescaling the target it is z + 1/z
    assert split_reduction(normalize_pair(tz)).is_constant()
    r = _reduced("t_z_plus_inv_z", 1).reduced
    assert r.phi_string() == "(z^2 + w^2)/(z*w)"
    assert local_degree(r, ONE) == 2
    assert local_degree(r, I) == 1


def test_second_iterate_sends_i_to_infinity():
    r = _reduced("t_z_plus_inv_z", 2).reduced
    from residua.multiplicities import direction_image
    assert direction_image(r, I) == INFINITY


def test_paired_pullback_examples():
    r = _reduced("t_z_plus_inv_z", 2).reduced
    half = AtomicMeasure({ZERO: Fraction(1, 2), INFINITY: Fraction(1, 2)})
    out = paired_pullback(r, half, half)
    assert out.total == 4
    diffuse = paired_pullback(r, AtomicMeasure({}, 1), AtomicMeasure({}, 1))
    assert diffuse.diffuse == 2 and diffuse.mass(ZERO) == 1 and diffuse.mass(INFINITY) == 1


@pytest.mark.parametrize("name", DEGENERATE)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_row_sums_equal_degree(name, n):
    res = _reduced(name, n)
    table = mult_table(iterate(load_family(name), n), res.A)
    for U in table.rows():
        assert table.row_sum(U) == 2**n, U
    for label, (row, unlisted) in table.generic_rows().items():
        assert sum(row.values()) + unlisted == 2**n, label


@pytest.mark.parametrize("name", DEGENERATE)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_fiber_multiplicities_sum_to_deg_phi(name, n):
    r = _reduced(name, n).reduced
    for y in [ZERO, ONE, INFINITY, I, ResiduePoint.rational(Fraction(2, 3))]:
        assert sum(m for _, m in preimages(r, y)) == r.deg_phi


def test_two_vertex_table_components():
    f = load_family("t_z2")
    A = MobiusK.diag(1, FS_T)
    table = mult_table(f, A)
    assert table.two_vertex
    assert table.x_star == ZERO and table.y_star == INFINITY
    kinds = {U.kind for U in table.rows()}
    assert kinds == {"vertex", "annulus", "dir"}
    assert all(table.row_sum(U) == 2 for U in table.rows())


@given(st.lists(st.tuples(st.sampled_from([ZERO, ONE, INFINITY, I, MINUS_I]), st.fractions(0, 1, max_denominator=8)), max_size=4),
       st.fractions(0, 1, max_denominator=8), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_pullback_multiplies_mass_by_degree(atoms, diffuse, n):
    mu = AtomicMeasure(dict(atoms), diffuse)
    r = _reduced("t_z_plus_inv_z", n).reduced
    out = paired_pullback(r, mu, mu)
    # phi^* contributes deg phi times the mass; the surplus adds deg H
    assert out.total == r.deg_phi * mu.total + r.H.degree
    if mu.total == 1:
        assert out.total == 2**n


def test_surface_pullback_collapses_nodes():
    r = _reduced("t_z_plus_inv_z", 1).reduced
    mu = SurfaceMeasure(AtomicMeasure.delta(ZERO, Fraction(1, 2)), AtomicMeasure.delta(ONE, Fraction(1, 2)), INFINITY, ZERO)
    out = surface_pullback(r, mu, collapsed=True)
    assert out.total == 2
    plain = surface_pullback(r, AtomicMeasure.delta(ZERO), collapsed=False)
    assert plain == paired_pullback(r, AtomicMeasure.delta(ZERO), AtomicMeasure.delta(ZERO))


@given(st.sampled_from([Component.Vertex(0), Component.Vertex(1), Component.Annulus(), Component.Dir(0, I), Component.Dir(1, INFINITY)]))
def test_component_json_roundtrip(U):
    assert Component.from_json(U.to_json()) == U


def test_measure_json_roundtrip():
    mu = AtomicMeasure({ZERO: Fraction(1, 3), I: Fraction(1, 6)}, Fraction(1, 2))
    assert AtomicMeasure.from_json(mu.to_json()) == mu
