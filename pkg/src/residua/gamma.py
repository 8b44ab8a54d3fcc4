"""Measures on the finite partition cut out by one or two type-II vertices."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .forms import ResiduePoint
from .homogeneous import DirectionPoint, HomPair, MobiusK, classify_vertex
from .multiplicities import (
    Component,
    MultTable,
    _q,
    mult_table,
    preimages,
)
from .normalization import iterate, make_nonconstant

log = logging.getLogger(__name__)


class SlackAmbiguity(ValueError):
    """Slack-bearing components disagree on where their preimages go."""

    def __init__(self, msg, lower: "GammaMeasure", upper: Mapping[Component, Fraction]):
        super().__init__(msg)
        self.lower = lower
        self.upper = dict(upper)


class NoConsistentLift(ValueError):
    pass


# --------------------------------------------------------------------------
# vertex sets and measures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexSet:
    """Vertices M(Gauss) for the listed Mobius maps; the first is the Gauss point."""

    vertices: tuple[MobiusK, ...] = (MobiusK.identity(),)

    def __post_init__(self):
        if len(self.vertices) not in (1, 2):
            raise ValueError("only one- and two-point vertex sets are supported")
        if len(self.vertices) == 2:
            M0, M1 = self.vertices
            if not isinstance(classify_vertex(M0.inverse() @ M1), DirectionPoint):
                raise ValueError("the two vertices coincide")

    @classmethod
    def gauss(cls) -> "VertexSet":
        return cls((MobiusK.identity(),))

    @classmethod
    def with_image(cls, A: MobiusK) -> "VertexSet":
        """{Gauss, A^-1(Gauss)}, collapsing to {Gauss} when A fixes it."""
        if isinstance(classify_vertex(A), DirectionPoint):
            return cls((MobiusK.identity(), A.inverse()))
        return cls.gauss()

    def __len__(self):
        return len(self.vertices)

    @property
    def x_star(self) -> ResiduePoint | None:
        """Direction at vertex 0 containing vertex 1."""
        if len(self) == 1:
            return None
        M0, M1 = self.vertices
        return classify_vertex(M0.inverse() @ M1).point

    @property
    def y_star(self) -> ResiduePoint | None:
        """Direction at vertex 1 (its own coordinates) containing vertex 0."""
        if len(self) == 1:
            return None
        M0, M1 = self.vertices
        return classify_vertex(M1.inverse() @ M0).point

    def contains(self, U: Component) -> bool:
        if len(self) == 1:
            return U.kind == "dir" and U.vertex == 0 or U == Component.Vertex(0)
        if U.kind == "dir":
            if U.vertex == 0:
                return U.point != self.x_star
            return U.point != self.y_star
        return True

    def __eq__(self, other):
        if not isinstance(other, VertexSet) or len(self) != len(other):
            return False
        return all(a.projectively_equal(b) for a, b in zip(self.vertices, other.vertices))

    def __hash__(self):
        return len(self)


@dataclass(frozen=True)
class GammaMeasure:
    vertex_set: VertexSet
    masses: Mapping[Component, Fraction] = field(default_factory=dict)
    slack: Fraction = Fraction(0)

    def __post_init__(self):
        clean = {}
        for U, m in self.masses.items():
            m = Fraction(m)
            if m < 0:
                raise ValueError(f"negative mass on {U}")
            if not self.vertex_set.contains(U):
                raise ValueError(f"{U} is not a component for this vertex set")
            if m:
                clean[U] = m
        object.__setattr__(self, "masses", clean)
        object.__setattr__(self, "slack", Fraction(self.slack))
        if self.slack < 0:
            raise ValueError("negative slack")

    @property
    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0)) + self.slack

    def mass(self, U: Component) -> Fraction:
        return self.masses.get(U, Fraction(0))

    def vertex_mass(self) -> Fraction:
        return sum((m for U, m in self.masses.items() if U.kind == "vertex"), Fraction(0))

    def components(self) -> list[Component]:
        return sorted(self.masses, key=Component.sort_key)

    def to_json(self) -> dict:
        return {
            "vertex_count": len(self.vertex_set),
            "masses": [{**U.to_json(), "mass": _q(self.masses[U])} for U in self.components()],
            "slack": _q(self.slack),
        }

    @classmethod
    def from_json(cls, d: dict, vertex_set: VertexSet | None = None) -> "GammaMeasure":
        vs = vertex_set or VertexSet.gauss()
        if int(d.get("vertex_count", 1)) != len(vs):
            raise ValueError("vertex count does not match the supplied vertex set")
        masses = {}
        for e in d.get("masses", []):
            U = Component.from_json(e)
            masses[U] = masses.get(U, Fraction(0)) + Fraction(e["mass"])
        return cls(vs, masses, Fraction(d.get("slack", "0")))


def dir_measure(atoms: Mapping[ResiduePoint, Fraction], slack=0, vertex=0) -> GammaMeasure:
    """One-vertex measure with the given masses on directions at the Gauss point."""
    masses = {Component.Dir(0, x): Fraction(m) for x, m in atoms.items()}
    if vertex:
        masses[Component.Vertex(0)] = Fraction(vertex)
    return GammaMeasure(VertexSet.gauss(), masses, Fraction(slack))


# --------------------------------------------------------------------------
# pushforward and pullback
# --------------------------------------------------------------------------


def pushforward_pi(nu: GammaMeasure) -> GammaMeasure:
    vs = nu.vertex_set
    if len(vs) == 1:
        return nu
    xs = vs.x_star
    out: dict[Component, Fraction] = {}
    for U, m in nu.masses.items():
        V = U if (U.kind == "vertex" and U.vertex == 0) or (U.kind == "dir" and U.vertex == 0) else Component.Dir(0, xs)
        out[V] = out.get(V, Fraction(0)) + m
    return GammaMeasure(VertexSet.gauss(), out, nu.slack)


def _table_vertex_set(table: MultTable) -> VertexSet:
    return VertexSet.with_image(table.A)


def _pull_row(table: MultTable, U: Component) -> dict[Component, int]:
    """Exact row of U, with every preimage direction located."""
    y = table.target_direction(U)
    row: dict[Component, int] = {}
    if y is None:
        row[Component.Vertex(0)] = table.deg_phi
    else:
        for x, m in _preimages_cached(table, y):
            V = Component.Dir(0, x)
            row[V] = row.get(V, 0) + m
    for x in table.source_points:
        s = table.s(x)
        if s:
            V = Component.Dir(0, x)
            row[V] = row.get(V, 0) + s
    return row


def _preimages_cached(table: MultTable, y: ResiduePoint):
    cache = table.__dict__.setdefault("_pre", {})
    if y not in cache:
        cache[y] = preimages(table.reduced, y)
    return cache[y]


def pullback(table: MultTable, nu: GammaMeasure) -> GammaMeasure:
    """mass(V) = sum_U m_{U,V} nu(U); slack follows the generic row."""
    vs = _table_vertex_set(table)
    if len(vs) != len(nu.vertex_set):
        raise ValueError("measure and table use different vertex sets")
    out: dict[Component, Fraction] = {}
    for U, mass in nu.masses.items():
        for V, e in _pull_row(table, U).items():
            out[V] = out.get(V, Fraction(0)) + e * mass
    if not nu.slack:
        return GammaMeasure(VertexSet.gauss(), out, Fraction(0))
    rows = table.generic_rows()
    outer_row, outer_free = rows["outer"]
    lower = dict(out)
    for V, e in outer_row.items():
        lower[V] = lower.get(V, Fraction(0)) + e * nu.slack
    if len(rows) == 1:
        return GammaMeasure(VertexSet.gauss(), lower, outer_free * nu.slack)
    inner_row, inner_free = rows["inner"]
    upper = dict(lower)
    for V, e in inner_row.items():
        extra = e - outer_row.get(V, 0)
        if extra > 0:
            upper[V] = upper.get(V, Fraction(0)) + extra * nu.slack
    raise SlackAmbiguity(
        "slack may sit inside or outside the direction toward the other vertex",
        GammaMeasure(VertexSet.gauss(), lower, Fraction(0)),
        upper,
    )


# --------------------------------------------------------------------------
# exceptional measures and the fixed-point systems
# --------------------------------------------------------------------------


def exceptional_measure(orbit: Sequence, vertex_set: VertexSet | None = None) -> GammaMeasure:
    """Mass #(E n U)/#E on each component U."""
    vs = vertex_set or VertexSet.gauss()
    if len(orbit) not in (1, 2):
        raise ValueError("exceptional orbits have length 1 or 2")
    out: dict[Component, Fraction] = {}
    for e in orbit:
        U = e if isinstance(e, Component) else Component.Dir(0, e)
        out[U] = out.get(U, Fraction(0)) + Fraction(1, len(orbit))
    return GammaMeasure(vs, out, Fraction(0))


@dataclass
class FixedCheck:
    n: int
    passed: bool
    max_violation: Fraction
    slack: Fraction
    lift: GammaMeasure | None
    residuals: dict[Component, Fraction]

    @property
    def annulus_positive(self) -> bool:
        return bool(self.lift and self.lift.mass(Component.Annulus()))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "passed": self.passed,
            "max_violation": _q(self.max_violation),
            "slack": _q(self.slack),
            "lift": self.lift.to_json() if self.lift else None,
            "annulus_mass_flag": self.annulus_positive,
            "residuals": {U.label(): _q(r) for U, r in sorted(self.residuals.items(), key=lambda kv: kv[0].sort_key())},
        }


def check_fixed(f: HomPair, nu: GammaMeasure, n: int, *, table: MultTable | None = None) -> FixedCheck:
    """Search for a lift w of nu to {Gauss, f^n(Gauss)} with (f^n)^* w = d^n nu.

    The lift is existential: free masses on the components that project onto
    the direction toward f^n(Gauss) are chosen by a linear program that
    minimizes the largest residual; the result is rationalized and the
    residuals are recomputed exactly.  The check passes iff the exact largest
    residual (in units of nu) is at most nu's slack.
    """
    if len(nu.vertex_set) != 1:
        raise NoConsistentLift("check_fixed expects a measure on the Gauss vertex set")
    if table is None:
        g = iterate(f, n)
        r = make_nonconstant(g)
        pts = [U.point for U in nu.masses if U.kind == "dir"]
        table = mult_table(g, r.A, source_points=pts)
    D = table.degree
    vs = _table_vertex_set(table)

    fixed: dict[Component, Fraction] = {}
    free: list[Component] = []
    budget = Fraction(0)
    xs = table.x_star
    for U, m in nu.masses.items():
        if table.two_vertex and U.kind == "dir" and U.point == xs:
            budget = m
        else:
            fixed[U] = m
    if table.two_vertex and budget:
        free = [Component.Vertex(1), Component.Annulus()]
        free += [Component.Dir(1, y) for y in table.target_points if y != table.y_star]

    rows = {U: _pull_row(table, U) for U in list(fixed) + free}
    # generic outer direction at the far vertex: only its surplus lands on listed columns
    generic = None
    if table.two_vertex and budget:
        generic = Component("generic")
        outer, free_count = table.generic_rows()["outer"]
        rows[generic] = dict(outer)
        free.append(generic)

    cols = set(nu.masses)
    for r in rows.values():
        cols.update(r)
    cols = sorted(cols, key=Component.sort_key)
    unlisted_col = Component("unlisted")
    cols_all = cols + ([unlisted_col] if generic is not None else [])

    def residuals(weights: dict[Component, Fraction]) -> dict[Component, Fraction]:
        pulled: dict[Component, Fraction] = {}
        for U, w in list(fixed.items()) + list(weights.items()):
            for V, e in rows[U].items():
                pulled[V] = pulled.get(V, Fraction(0)) + e * w
        res = {V: pulled.get(V, Fraction(0)) / D - nu.mass(V) for V in cols}
        if generic is not None:
            res[unlisted_col] = weights.get(generic, Fraction(0)) * table.deg_phi / D
        return res

    if not free:
        res = residuals({})
        viol = max((abs(r) for r in res.values()), default=Fraction(0))
        lift = GammaMeasure(vs, fixed, nu.slack)
        return FixedCheck(n, viol <= nu.slack, viol, nu.slack, lift, res)

    weights = _solve_lift(free, rows, fixed, cols_all, nu, D, budget, table, generic)
    res = residuals(weights)
    viol = max((abs(r) for r in res.values()), default=Fraction(0))
    masses = dict(fixed)
    lift_slack = nu.slack
    for U, w in weights.items():
        if U == generic:
            lift_slack += w
        elif w:
            masses[U] = w
    lift = GammaMeasure(vs, masses, lift_slack)
    if lift.mass(Component.Annulus()):
        log.warning("lift at n = %d puts mass %s on the annulus", n, lift.mass(Component.Annulus()))
    return FixedCheck(n, viol <= nu.slack, viol, nu.slack, lift, res)


def _solve_lift(free, rows, fixed, cols, nu, D, budget, table, generic) -> dict[Component, Fraction]:
    k = len(free)
    # variables: w_1..w_k, s ; minimize s
    base = {}
    for U, w in fixed.items():
        for V, e in rows[U].items():
            base[V] = base.get(V, Fraction(0)) + e * w
    A_ub, b_ub = [], []
    for V in cols:
        if V.kind == "unlisted":
            coef = [float(table.deg_phi) / D if U == generic else 0.0 for U in free]
            target = 0.0
        else:
            coef = [rows[U].get(V, 0) / D for U in free]
            target = float(nu.mass(V) - base.get(V, Fraction(0)) / D)
        A_ub.append(coef + [-1.0])
        b_ub.append(target)
        A_ub.append([-c for c in coef] + [-1.0])
        b_ub.append(-target)
    A_eq = [[1.0] * k + [0.0]]
    b_eq = [float(budget)]
    c = [0.0] * k + [1.0]
    sol = linprog(c, A_ub=np.array(A_ub), b_ub=np.array(b_ub), A_eq=np.array(A_eq), b_eq=np.array(b_eq),
                  bounds=[(0, None)] * (k + 1), method="highs")
    if not sol.success:
        raise NoConsistentLift(f"lift program failed: {sol.message}")
    ws = [Fraction(float(x)).limit_denominator(1 << 20) if x > 1e-12 else Fraction(0) for x in sol.x[:k]]
    # restore the exact budget on the largest weight after rounding
    drift = budget - sum(ws)
    j = max(range(k), key=lambda i: ws[i])
    ws[j] = max(Fraction(0), ws[j] + drift)
    return dict(zip(free, ws))


def surplus_estimate_check(f: HomPair, nu: GammaMeasure, n: int) -> bool:
    """nu(U_x) >= s_{f^n}(x)/d^n wherever the surplus is positive."""
    from .multiplicities import surplus_points

    g = iterate(f, n)
    r = make_nonconstant(g)
    D = r.reduced.degree
    for x, s in surplus_points(r.reduced.H):
        if nu.mass(Component.Dir(0, x)) < Fraction(s, D):
            return False
    return True
