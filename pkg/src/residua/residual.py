"""Limit of the maximal-entropy measures at t = 0, as a certified atomic measure."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .forms import INFINITY, ResiduePoint, form_points
from .gamma import GammaMeasure, VertexSet, dir_measure
from .homogeneous import (
    HomPair,
    MobiusK,
    ReducedMap,
    compose,
    conjugate,
    normalize_pair,
    split_reduction,
)
from .multiplicities import (
    AtomicMeasure,
    Component,
    MultProfile,
    _q,
    critical_points,
    direction_image,
    local_degree,
    mult_profile,
    surplus_points,
)
from .normalization import NormalizationResult, composition_factor, make_nonconstant
from .scalars import (
    FieldScalar,
    GaussianRational,
    NoLift,
    SeriesTrunc,
    newton_lift,
    poly_eval_series,
)

log = logging.getLogger(__name__)


class NonDegenerate(ValueError):
    pass


class Budget(RuntimeError):
    pass


class UncertifiedExceptional(RuntimeError):
    pass


class ExceptionalAmbiguity(RuntimeError):
    pass


class VertexMass(ValueError):
    pass


def degree_ceiling(d: int) -> int:
    return d ** 6 if d == 2 else d ** 4


# --------------------------------------------------------------------------
# iterate profiles
# --------------------------------------------------------------------------


@dataclass
class IterateData:
    n: int
    normalization: NormalizationResult
    profile: MultProfile
    factor_deg: int | None  # deg phi_{n,n-1}; None at n = 1

    @property
    def reduced(self) -> ReducedMap:
        return self.normalization.reduced

    @property
    def A(self) -> MobiusK:
        return self.normalization.A

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "A": self.A.to_json(),
            "steps": self.normalization.steps,
            "deg_phi": self.reduced.deg_phi,
            "deg_H": self.reduced.H.degree,
            "H": str(self.reduced.H),
            "phi": self.reduced.phi_string(),
            "factor_deg": self.factor_deg,
            "surplus": {x.label(): s for x, (m, s) in sorted(self.profile.entries.items(), key=lambda kv: kv[0].sort_key()) if s},
        }


@dataclass
class IterationReport:
    f: HomPair
    steps: list[IterateData] = field(default_factory=list)
    stopped_by_budget: bool = False
    _lift: HomPair | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.f.degree

    def __getitem__(self, n: int) -> IterateData:
        return self.steps[n - 1]

    def __len__(self):
        return len(self.steps)

    def to_json(self) -> dict:
        return {"iterates": [s.to_json() for s in self.steps], "stopped_by_budget": self.stopped_by_budget}


def iterate_profile(f: HomPair, N: int, ceiling: int | None = None, report: IterationReport | None = None) -> IterationReport:
    """Iterate, normalize and split f^n for n = 1..N (extends ``report`` if given)."""
    d = f.degree
    if d < 2:
        raise ValueError("degree must be at least 2")
    ceiling = degree_ceiling(d) if ceiling is None else ceiling
    if report is None:
        report = IterationReport(f)
    while len(report) < N:
        n = len(report) + 1
        if d ** n > ceiling:
            raise Budget(f"degree {d}^{n} exceeds the ceiling {ceiling}")
        g = f if n == 1 else compose(f, report._lift)
        norm = make_nonconstant(g)
        prof = mult_profile(norm.reduced)
        fac = None
        if n > 1:
            fac = composition_factor(norm.A, f, report[n - 1].A).deg_phi
        report._lift = g
        report.steps.append(IterateData(n, norm, prof, fac))
    return report


def good_reduction_check(f: HomPair) -> str:
    return "NonDegenerate" if f.res_val == 0 else "Degenerate"


# --------------------------------------------------------------------------
# measures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualAtom:
    location: ResiduePoint
    mass_lower: Fraction
    mass_estimate: Fraction
    n_used: int

    def to_json(self) -> dict:
        return {
            "point": self.location.label(),
            **self.location.to_json(),
            "mass_lower": _q(self.mass_lower),
            "mass_estimate": _q(self.mass_estimate),
            "n_used": self.n_used,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ResidualAtom":
        return cls(ResiduePoint.from_json(d), Fraction(d["mass_lower"]), Fraction(d["mass_estimate"]), int(d["n_used"]))


@dataclass(frozen=True)
class ResidualMeasure:
    atoms: tuple[ResidualAtom, ...]
    slack: Fraction
    branch: str  # "generic" | "exceptional"
    excluded_direction: tuple[ResiduePoint, ...] = ()
    partial: bool = False
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        locs = [a.location for a in self.atoms]
        if len(set(locs)) != len(locs):
            raise ValueError("atoms must be at distinct points")
        if sum((a.mass_lower for a in self.atoms), Fraction(0)) + self.slack != 1:
            raise ValueError("masses and slack must sum to 1")

    def mass(self, x: ResiduePoint) -> Fraction:
        for a in self.atoms:
            if a.location == x:
                return a.mass_lower
        return Fraction(0)

    def to_json(self) -> dict:
        return {
            "branch": self.branch,
            "excluded_direction": [x.label() for x in self.excluded_direction],
            "atoms": [a.to_json() for a in self.atoms],
            "slack": _q(self.slack),
            "partial": self.partial,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ResidualMeasure":
        from .forms import parse_point

        return cls(
            tuple(ResidualAtom.from_json(a) for a in d["atoms"]),
            Fraction(d["slack"]),
            d["branch"],
            tuple(parse_point(s) for s in d.get("excluded_direction", [])),
            bool(d.get("partial", False)),
            tuple(d.get("warnings", [])),
        )


def _generic_atoms(data: IterateData, d: int) -> tuple[ResidualAtom, ...]:
    D = d ** data.n
    atoms = [
        ResidualAtom(x, Fraction(s, D), Fraction(s, D), data.n)
        for x, s in surplus_points(data.reduced.H)
    ]
    atoms.sort(key=lambda a: a.location.sort_key())
    return tuple(atoms)


def residual_measure(
    f: HomPair,
    eps=Fraction(1, 100),
    N_max: int = 6,
    *,
    window: int = 3,
    ceiling: int | None = None,
    report: IterationReport | None = None,
) -> tuple[ResidualMeasure, IterationReport]:
    eps = Fraction(eps)
    if good_reduction_check(f) == "NonDegenerate":
        raise NonDegenerate("resultant has valuation 0: the family has good reduction at t = 0")
    d = f.degree
    report = IterationReport(f) if report is None else report
    warnings: list[str] = []
    try:
        iterate_profile(f, min(N_max, window + 1), ceiling, report)
    except Budget:
        report.stopped_by_budget = True

    try:
        orbit = detect_exceptional(f, window, report=report)
    except UncertifiedExceptional as exc:
        orbit = None
        warnings.append(str(exc))
    if orbit is not None:
        return exceptional_residual(f, orbit, report), report

    n = 0
    atoms: tuple[ResidualAtom, ...] = ()
    slack = Fraction(1)
    for n in range(1, N_max + 1):
        if n > len(report):
            try:
                iterate_profile(f, n, ceiling, report)
            except Budget as exc:
                report.stopped_by_budget = True
                warnings.append(str(exc))
                break
        atoms = _generic_atoms(report[n], d)
        slack = 1 - sum((a.mass_lower for a in atoms), Fraction(0))
        if slack <= eps:
            return ResidualMeasure(atoms, slack, "generic", (), False, tuple(warnings)), report
    return ResidualMeasure(atoms, slack, "generic", (), True, tuple(warnings)), report


# --------------------------------------------------------------------------
# exceptional branch
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExceptionalOrbit:
    points: tuple[ResiduePoint, ...]  # reductions at t = 0
    series: tuple[str, ...]  # truncated series of the lifted orbit, for display

    def to_json(self) -> dict:
        return {"orbit": [p.label() for p in self.points], "series": list(self.series)}


def detect_exceptional(f: HomPair, window: int = 3, *, report: IterationReport | None = None, order: int = 8):
    """Certified exceptional orbit (length 1 or 2), or None."""
    if good_reduction_check(f) == "NonDegenerate":
        return None
    d = f.degree
    report = IterationReport(f) if report is None else report
    try:
        iterate_profile(f, window + 1, None, report)
    except Budget:
        return None
    factors = [report[n + 1].factor_deg for n in range(1, window + 1)]
    if not all(k == d for k in factors):
        return None
    if any(report[n].reduced.H.degree for n in range(1, window + 2)):
        return None
    for period in (1, 2):
        orbit = _certify(f, period, order)
        if orbit is not None:
            return orbit
    raise UncertifiedExceptional("every factor has full degree but no exceptional orbit lifts")


def _constant_reduction(g: HomPair) -> ResiduePoint | None:
    red = split_reduction(normalize_pair(g))
    return red.constant_value() if red.deg_phi == 0 else None


def _certify(f: HomPair, period: int, order: int) -> ExceptionalOrbit | None:
    g = f if period == 1 else compose(f, f)
    seed = _constant_reduction(g)
    if seed is None:
        return None
    B = MobiusK.identity()
    if seed.is_infinity:
        B = MobiusK(0, 1, 1, 0)  # z -> 1/z
    fc = conjugate(f, B)
    gc = fc if period == 1 else compose(fc, fc)
    s0 = _apply_rational_mobius(B, seed)
    if s0 is None or not s0.is_rational:
        return None
    Fix = _fixed_point_poly(gc)
    try:
        p = newton_lift(Fix, s0.exact_value(), order)
    except NoLift:
        return None
    pts = [p]
    for _ in range(period - 1):
        q = _eval_series_map(fc, pts[-1], order + 1)
        if q is None:
            return None
        pts.append(q)
    if period == 2 and pts[0].reduce_at_zero() == pts[1].reduce_at_zero():
        return None
    for i, pi in enumerate(pts):
        nxt = pts[(i + 1) % period]
        if not _totally_ramified_over(fc, pi, nxt, order + 1):
            return None
    Binv = B.inverse()
    red = tuple(_apply_rational_mobius(Binv, ResiduePoint.rational(q.reduce_at_zero())) for q in pts)
    return ExceptionalOrbit(red, tuple(f"{q}" for q in pts))


def _apply_rational_mobius(B: MobiusK, x: ResiduePoint) -> ResiduePoint | None:
    a, b, c, d = (e.reduce_at_zero() for e in B.entries())
    if x.is_infinity:
        return INFINITY if not c else ResiduePoint.rational(a / c)
    if not x.is_rational:
        return None
    v = x.exact_value()
    den = c * v + d
    if not den:
        return INFINITY
    return ResiduePoint.rational((a * v + b) / den)


def _dehom(coeffs: Sequence[FieldScalar]) -> list[FieldScalar]:
    """Entry list (z^(D-i) w^i) to low-to-high coefficients of F(z, 1)."""
    return list(reversed(coeffs))


def _fixed_point_poly(g: HomPair) -> list[FieldScalar]:
    P = _dehom(g.P)
    Q = _dehom(g.Q)
    out = list(P) + [FieldScalar.zero()]
    for k, q in enumerate(Q):
        out[k + 1] = out[k + 1] - q
    while len(out) > 1 and out[-1].is_zero():
        out.pop()
    return out


def _series(c: FieldScalar, prec: int) -> SeriesTrunc:
    return SeriesTrunc.from_scalar(c, prec)


def _eval_series_map(f: HomPair, p: SeriesTrunc, prec: int) -> SeriesTrunc | None:
    P = [_series(c, prec) for c in _dehom(f.P)]
    Q = [_series(c, prec) for c in _dehom(f.Q)]
    num, den = poly_eval_series(P, p), poly_eval_series(Q, p)
    if den.valuation() >= prec:
        return None
    out = num / den
    if out.valuation() < 0:
        return None
    return out.truncate(prec)


def _totally_ramified_over(f: HomPair, p: SeriesTrunc, q: SeriesTrunc, prec: int) -> bool:
    """P(z + p) - q Q(z + p) = c (z)^d with c != 0, to the working precision."""
    d = f.degree
    P = [_series(c, prec) for c in _dehom(f.P)]
    Q = [_series(c, prec) for c in _dehom(f.Q)]
    R = [a - q * b for a, b in zip(P, Q)]
    # Taylor shift by p
    taylor = []
    for k in range(d + 1):
        acc = SeriesTrunc([], 0, prec)
        for j in range(k, d + 1):
            term = R[j] * math.comb(j, k)
            for _ in range(j - k):
                term = term * p
            acc = acc + term
        taylor.append(acc.truncate(prec))
    if any(c.valuation() < prec - 1 for c in taylor[:d]):
        return False
    return taylor[d].valuation() < prec - 1


def _totally_ramified_cycles(red: ReducedMap) -> list[tuple[ResiduePoint, ...]]:
    d = red.deg_phi
    T = [x for x in critical_points(red) if local_degree(red, x) == d]
    cycles = []
    seen = set()
    for x in T:
        if x in seen:
            continue
        orbit = [x]
        y = direction_image(red, x)
        while y in T and y not in orbit and len(orbit) <= len(T):
            orbit.append(y)
            y = direction_image(red, y)
        if y == x:
            seen.update(orbit)
            cycles.append(tuple(orbit))
    return cycles


def exceptional_residual(f: HomPair, orbit: ExceptionalOrbit, report: IterationReport) -> ResidualMeasure:
    """Exact masses on the surviving totally ramified cycle of phi."""
    excluded = set(orbit.points)
    cycles = None
    for n in (1, 2):
        if n > len(report):
            iterate_profile(f, n, None, report)
        red = report[n].reduced
        cyc = [c for c in _totally_ramified_cycles(red) if not excluded.intersection(c)]
        if cyc:
            cycles = cyc
            break
    if not cycles:
        raise ExceptionalAmbiguity("no totally ramified cycle survives the exclusion")
    if len(cycles) > 1:
        raise ExceptionalAmbiguity(f"{len(cycles)} totally ramified cycles survive: {cycles}")
    cyc = cycles[0]
    # mu(U_x) = (m(x)/d) mu(U_phi(x)) with m = d on the cycle: uniform masses
    mass = Fraction(1, len(cyc))
    n = report[len(report)].n
    atoms = tuple(sorted((ResidualAtom(x, mass, mass, n) for x in cyc), key=lambda a: a.location.sort_key()))
    return ResidualMeasure(atoms, Fraction(0), "exceptional", tuple(sorted(excluded, key=ResiduePoint.sort_key)))


# --------------------------------------------------------------------------
# correspondence with measures on the Gauss vertex set
# --------------------------------------------------------------------------


def red_star(mu) -> GammaMeasure:
    """Atoms to their directions; diffuse mass to the vertex; slack stays slack."""
    if isinstance(mu, ResidualMeasure):
        return dir_measure({a.location: a.mass_lower for a in mu.atoms}, mu.slack)
    if isinstance(mu, AtomicMeasure):
        return dir_measure(mu.atoms, 0, mu.diffuse)
    raise TypeError("red_star takes an AtomicMeasure or a ResidualMeasure")


def red_lower(omega: GammaMeasure) -> AtomicMeasure:
    if len(omega.vertex_set) != 1:
        raise ValueError("red_lower expects the Gauss vertex set")
    if omega.vertex_mass():
        raise VertexMass("measure charges the vertex")
    if omega.slack:
        raise ValueError("unlocated slack has no atomic counterpart")
    return AtomicMeasure({U.point: m for U, m in omega.masses.items()})
