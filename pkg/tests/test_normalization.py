import pytest
import sympy as sp

import oracle
from conftest import DEGENERATE, load_family
from residua.homogeneous import MobiusK, HomPair, normalize_pair, split_reduction
from residua.normalization import composition_factor, iterate, make_nonconstant
from residua.scalars import FS_T


def _as_sympy(form):
    return sp.sympify(form.to_string().replace("^", "**"), locals={"i": sp.I, "z": oracle.z, "w": oracle.w})


@pytest.mark.parametrize("name", DEGENERATE)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_matches_symbolic_oracle(name, n):
    r = make_nonconstant(iterate(load_family(name), n)).reduced
    D = 2**n
    H_ref, dphi_ref = oracle.reduction(*oracle.iterate(oracle.FAMILIES[name], n), D)
    assert r.deg_phi == dphi_ref
    assert r.H.degree == D - dphi_ref
    ratio = sp.cancel(_as_sympy(r.H) / H_ref)
    assert not ratio.free_symbols


def test_scaling_matrices():
    tz2 = load_family("t_z2")
    for n in range(1, 5):
        res = make_nonconstant(iterate(tz2, n))
        assert res.A.projectively_equal(MobiusK.diag(1, FS_T ** (2**n - 1)))
        assert res.reduced.phi_string() == f"(z^{2**n})/(w^{2**n})"
    z2t = load_family("z2_over_t")
    res = make_nonconstant(iterate(z2t, 3))
    assert res.A.projectively_equal(MobiusK.diag(FS_T ** 7, 1))


def test_degrees_t_z_plus_inv_z(tz):
    degs = [make_nonconstant(iterate(tz, n)).reduced for n in range(1, 7)]
    assert [r.deg_phi for r in degs] == [2, 2, 4, 4, 8, 8]
    assert [r.H.degree for r in degs] == [0, 2, 4, 12, 24, 56]


@pytest.mark.parametrize("name", DEGENERATE)
def test_composition_factor_degrees(name):
    f = load_family(name)
    prev = make_nonconstant(f)
    for n in range(2, 5):
        cur = make_nonconstant(iterate(f, n))
        fac = composition_factor(cur.A, f, prev.A)
        assert cur.reduced.deg_phi == fac.deg_phi * prev.reduced.deg_phi
        prev = cur


def test_normalized_result_is_nonconstant(families):
    for f in families.values():
        res = make_nonconstant(f)
        assert not res.reduced.is_constant()
        assert res.g.min_valuation() == 0
