"""Acceptance criteria, one test each, at their stated tolerances.

A summary line per criterion is printed at the end of the session.
"""

import json
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

import oracle
from conftest import ACCEPTANCE, DEGENERATE, FAMILIES, load_family
from residua.forms import INFINITY, ResiduePoint
from residua.gamma import check_fixed
from residua.multiplicities import mult_table
from residua.normalization import composition_factor, iterate, make_nonconstant
from residua.residual import iterate_profile, red_star, residual_measure
from residua.verifier import atom_mass_estimate, chordal_to, preimage_count_check, sample_max_measure, specialize

Q = Fraction
ZERO, I, MINUS_I = ResiduePoint.rational(0), ResiduePoint.rational("i"), ResiduePoint.rational("-i")


@contextmanager
def criterion(k, title, budget=None):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        secs = time.perf_counter() - start
        if ok and budget is not None and secs >= budget:
            ok = False
        ACCEPTANCE[k] = (ok, secs, title)
    if budget is not None:
        assert secs < budget, f"took {secs:.1f}s, budget {budget}s"


def test_c01_degree_bookkeeping():
    with criterion(1, "deg phi_n + deg H_n = d^n and multiplicative factor degrees", budget=30):
        for name in DEGENERATE:
            f = load_family(name)
            prev = None
            for n in range(1, 5):
                res = make_nonconstant(iterate(f, n))
                assert res.reduced.deg_phi + res.reduced.H.degree == 2**n
                if prev is not None:
                    fac = composition_factor(res.A, f, prev.A)
                    assert res.reduced.deg_phi == fac.deg_phi * prev.reduced.deg_phi
                prev = res


def test_c02_row_sums():
    with criterion(2, "every MultTable row sums to the degree", budget=10):
        for name in DEGENERATE:
            f = load_family(name)
            for n in range(1, 4):
                g = iterate(f, n)
                table = mult_table(g, make_nonconstant(g).A)
                for U in table.rows():
                    assert table.row_sum(U) == 2**n, (name, n, U)
                for row, unlisted in table.generic_rows().values():
                    assert sum(row.values()) + unlisted == 2**n


# values recomputed by the sympy oracle in tests/oracle.py and frozen here
FROZEN_SURPLUS = {(2, "0"): 1, (2, "inf"): 1, (3, "0"): 2, (4, "0"): 5, (4, "i"): 1, (4, "-i"): 1}


def test_c03_surplus_profile():
    with criterion(3, "surplus profile of t(z + 1/z) against the symbolic oracle", budget=20):
        report = iterate_profile(load_family("t_z_plus_inv_z"), 4)
        assert report[2].reduced.H.normalized().to_string() == "z*w"
        for (n, label), s in FROZEN_SURPLUS.items():
            x = INFINITY if label == "inf" else ResiduePoint.rational(label)
            assert report[n].profile.s(x) == s, (n, label)
            H_ref, _ = oracle.reduction(*oracle.iterate(oracle.FAMILIES["t_z_plus_inv_z"], n), 2**n)
            pt = None if label == "inf" else sp.sympify(label.replace("i", "I"))
            assert oracle.surplus_at(H_ref, pt) == s, (n, label)


def test_c04_monotone_certification():
    with criterion(4, "s_n(x)/d^n nondecreasing in n"):
        for name in DEGENERATE:
            report = iterate_profile(load_family(name), 4)
            pts = set().union(*(report[n].profile.points() for n in range(1, 5)))
            for x in pts:
                ratios = [Fraction(report[n].profile.s(x), 2**n) for n in range(1, 5)]
                assert all(a <= b for a, b in zip(ratios, ratios[1:])), (name, x, ratios)


@pytest.mark.parametrize("name, atom, excluded", [("t_z2", INFINITY, ZERO), ("z2_over_t", ZERO, INFINITY)])
def test_c05_exceptional_branch(name, atom, excluded):
    k = 5
    prior = ACCEPTANCE.get(k, (True, 0.0, ""))[0]
    with criterion(k, "exceptional families give the exact point mass", budget=10):
        mu, _ = residual_measure(load_family(name), Q(1, 100), 6)
        assert mu.branch == "exceptional"
        assert [(a.location, a.mass_lower) for a in mu.atoms] == [(atom, 1)]
        assert mu.slack == 0
        assert mu.excluded_direction == (excluded,)
    ok, secs, title = ACCEPTANCE[k]
    ACCEPTANCE[k] = (ok and prior, secs, title)


def test_c06_non_degenerate_guard():
    with criterion(6, "z^2 + t exits with code 3"):
        proc = subprocess.run([sys.executable, "-m", "residua.cli", "residual", str(FAMILIES / "z2_plus_t.json")], capture_output=True)
        assert proc.returncode == 3


def test_c07_fixed_point_consistency():
    with criterion(7, "red_star of each residual measure passes check_fixed for n = 1, 2, 3"):
        for name in DEGENERATE:
            f = load_family(name)
            mu, _ = residual_measure(f, Q(1, 100), 6)
            nu = red_star(mu)
            for n in (1, 2, 3):
                res = check_fixed(f, nu, n)
                if mu.branch == "exceptional":
                    assert res.max_violation == 0, (name, n)
                assert res.passed and res.max_violation <= mu.slack, (name, n, res.max_violation)


CENTERS = {"0": 0, "inf": complex("inf"), "i": 1j, "-i": -1j}
BOUNDS = {"0": Q(5, 16), "inf": Q(5, 16), "i": Q(1, 16), "-i": Q(1, 16)}


def _estimates(t0):
    g = specialize(load_family("t_z_plus_inv_z"), t0)
    cloud = sample_max_measure(g, 100_000, 20, seed=7)
    est = atom_mass_estimate(cloud, list(CENTERS.values()), 0.2)
    return dict(zip(CENTERS, est.masses)), dict(zip(CENTERS, est.sigmas))


def test_c08_numerical_convergence():
    with criterion(8, "sampled masses at small t against certified bounds", budget=60):
        runs = {t0: _estimates(t0) for t0 in (1e-1, 1e-2, 1e-3)}
        m, _ = runs[1e-2]
        assert m["0"] >= 5 / 16 - 0.04 and m["inf"] >= 5 / 16 - 0.04
        assert m["i"] >= 1 / 16 - 0.03 and m["-i"] >= 1 / 16 - 0.03
        assert abs(m["0"] - m["inf"]) <= 0.03
        # the shortfall below each certified bound shrinks as t decreases
        ts = (1e-1, 1e-2, 1e-3)
        for label, bound in BOUNDS.items():
            short = [max(0.0, float(bound) - runs[t0][0][label]) for t0 in ts]
            sig = [runs[t0][1][label] for t0 in ts]
            for j in range(2):
                assert short[j + 1] <= short[j] + 2 * np.hypot(sig[j], sig[j + 1]), (label, short)
        g = specialize(load_family("t_z2"), 1e-3)
        cloud = sample_max_measure(g, 100_000, 20, seed=7)
        assert np.mean(chordal_to(cloud.points, complex("inf")) < 0.2) >= 0.95


def test_c09_preimage_counting():
    with criterion(9, "preimage counts near 0 for the second iterate", budget=10):
        g = specialize(iterate(load_family("t_z_plus_inv_z"), 2), 1e-3)
        for y in (1.0, 0.5, 2j, -3.0):
            assert preimage_count_check(g, 0, 0.1, y) == 1  # m_2(0)
        for y in (1e-2, 1e-2j, -2e-2):
            assert preimage_count_check(g, 0, 0.1, y) == 2  # m_2(0) + s_2(0)


CLI_RUNS = [
    ["reduce", "t_z_plus_inv_z.json", "--iterate", "3"],
    ["surplus", "t_z_plus_inv_z.json", "--n", "4"],
    ["residual", "t_z_plus_inv_z.json", "--eps", "1/4", "--max-n", "4"],
    ["residual", "mobius_quotient.json"],
    ["exceptional", "t_z2.json"],
    ["paired-pullback", "t_z_plus_inv_z.json", "--n", "2", "--mu-E", "0=1/2,inf=1/2"],
    ["check-fixed", "z2_over_t.json", "--n", "3", "--all"],
    ["verify", "t_z_plus_inv_z.json", "--samples", "5000", "--depth", "12", "--eps", "1/4", "--max-n", "4"],
]


def test_c10_cli_roundtrip_and_determinism(tmp_path):
    with criterion(10, "CLI outputs round-trip and rerun byte-identically"):
        for argv in CLI_RUNS:
            cmd = [sys.executable, "-m", "residua.cli", argv[0], str(FAMILIES / argv[1]), *argv[2:]]
            a = subprocess.run(cmd, capture_output=True)
            b = subprocess.run(cmd, capture_output=True)
            assert a.returncode in (0, 4), (argv, a.stderr)
            assert a.stdout == b.stdout and a.returncode == b.returncode, argv
            json.loads(a.stdout)
        # residual output feeds back into check-fixed and verify
        res = tmp_path / "residual.json"
        res.write_text(subprocess.run([sys.executable, "-m", "residua.cli", "residual", str(FAMILIES / "t_z_plus_inv_z.json"),
                                       "--eps", "1/4", "--max-n", "4"], capture_output=True, check=True).stdout.decode())
        from residua.residual import ResidualMeasure
        mu = ResidualMeasure.from_json(json.loads(res.read_text()))
        assert json.loads(json.dumps(mu.to_json(), sort_keys=True)) == {k: v for k, v in json.loads(res.read_text()).items() if k in mu.to_json()}
        out = subprocess.run([sys.executable, "-m", "residua.cli", "check-fixed", str(FAMILIES / "t_z_plus_inv_z.json"),
                              "--n", "3", "--all", "--against", str(res)], capture_output=True, check=True)
        assert json.loads(out.stdout)["passed"]
