"""Local degrees, surplus multiplicities and the quantized multiplicity table.

Directions at a type-II vertex are labelled by closed points of P^1 over the
algebraic closure of Q(i).  At the source vertex (the Gauss point) the label
is the point itself; at the target vertex f(Gauss) = A^-1(Gauss) a direction
is labelled in A-coordinates, which is exactly where the reduction phi of
A o f takes its values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .forms import (
    Form,
    ResiduePoint,
    eval_form_ratio,
    form_points,
    ord_at,
    preimage_points,
    wronskian,
)
from .homogeneous import (
    DirectionPoint,
    HomPair,
    MobiusK,
    ReducedMap,
    classify_vertex,
    mobius_compose,
    normalize_pair,
    split_reduction,
)


class ConstantReduction(ValueError):
    pass


# --------------------------------------------------------------------------
# pointwise multiplicities
# --------------------------------------------------------------------------


def local_degree(phi: ReducedMap, x: ResiduePoint) -> int:
    if phi.deg_phi < 1:
        raise ConstantReduction("local degree of a constant map")
    W = wronskian(phi.phi_num, phi.phi_den)
    return 1 + ord_at(W, x)


def surplus(H: Form, x: ResiduePoint) -> int:
    return ord_at(H, x)


def vertex_degree(phi: ReducedMap) -> int:
    if phi.deg_phi < 1:
        raise ConstantReduction("vertex degree of a constant map")
    return phi.deg_phi


def direction_image(phi: ReducedMap, x: ResiduePoint) -> ResiduePoint:
    if phi.deg_phi < 1:
        raise ConstantReduction("direction map of a constant reduction")
    return eval_form_ratio(phi.phi_num, phi.phi_den, x)


def preimages(phi: ReducedMap, y: ResiduePoint) -> list[tuple[ResiduePoint, int]]:
    """Points x with phi(x) = y, each with its local degree."""
    return [(x, local_degree(phi, x)) for x in preimage_points(phi.phi_num, phi.phi_den, y)]


def critical_points(phi: ReducedMap) -> list[ResiduePoint]:
    W = wronskian(phi.phi_num, phi.phi_den)
    if W.is_zero():
        return []
    return [p for p, _ in form_points(W)]


def surplus_points(H: Form) -> list[tuple[ResiduePoint, int]]:
    if H.degree == 0:
        return []
    return form_points(H)


# --------------------------------------------------------------------------
# profiles and atomic measures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MultProfile:
    entries: Mapping[ResiduePoint, tuple[int, int]]
    deg_phi: int
    degree: int

    def m(self, x: ResiduePoint) -> int:
        return self.entries[x][0] if x in self.entries else 1

    def s(self, x: ResiduePoint) -> int:
        return self.entries[x][1] if x in self.entries else 0

    def surplus_total(self) -> int:
        return sum(s for _, s in self.entries.values())

    def points(self) -> list[ResiduePoint]:
        return sorted(self.entries, key=ResiduePoint.sort_key)

    def to_json(self) -> dict:
        rows = []
        for x in self.points():
            m, s = self.entries[x]
            rows.append({"point": x.label(), **x.to_json(), "m": m, "s": s})
        return {
            "points": rows,
            "deg_phi": self.deg_phi,
            "degree": self.degree,
            "checksums": {
                "sum_s": self.surplus_total(),
                "degree_minus_deg_phi": self.degree - self.deg_phi,
            },
        }


def mult_profile(reduced: ReducedMap) -> MultProfile:
    entries: dict[ResiduePoint, tuple[int, int]] = {}
    for x, s in surplus_points(reduced.H):
        entries[x] = (1, s)
    if reduced.deg_phi >= 1:
        for x in critical_points(reduced):
            entries[x] = (local_degree(reduced, x), entries.get(x, (1, 0))[1])
        for x, (m, s) in list(entries.items()):
            entries[x] = (local_degree(reduced, x), s)
    return MultProfile(entries, reduced.deg_phi, reduced.degree)


@dataclass(frozen=True)
class AtomicMeasure:
    """Atoms at closed points plus an unlocated ("diffuse") mass."""

    atoms: Mapping[ResiduePoint, Fraction] = field(default_factory=dict)
    diffuse: Fraction = Fraction(0)

    def __post_init__(self):
        clean = {}
        for x, m in self.atoms.items():
            m = Fraction(m)
            if m < 0:
                raise ValueError("negative atom mass")
            if m:
                clean[x] = m
        object.__setattr__(self, "atoms", clean)
        object.__setattr__(self, "diffuse", Fraction(self.diffuse))
        if self.diffuse < 0:
            raise ValueError("negative diffuse mass")

    @classmethod
    def delta(cls, x: ResiduePoint, mass=1) -> "AtomicMeasure":
        return cls({x: Fraction(mass)})

    @property
    def total(self) -> Fraction:
        return sum(self.atoms.values(), Fraction(0)) + self.diffuse

    def mass(self, x: ResiduePoint) -> Fraction:
        return self.atoms.get(x, Fraction(0))

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        atoms = dict(self.atoms)
        for x, m in other.atoms.items():
            atoms[x] = atoms.get(x, Fraction(0)) + m
        return AtomicMeasure(atoms, self.diffuse + other.diffuse)

    def scale(self, c) -> "AtomicMeasure":
        c = Fraction(c)
        return AtomicMeasure({x: m * c for x, m in self.atoms.items()}, self.diffuse * c)

    def to_json(self) -> dict:
        return {
            "atoms": [
                {"point": x.label(), **x.to_json(), "mass": _q(self.atoms[x])}
                for x in sorted(self.atoms, key=ResiduePoint.sort_key)
            ],
            "diffuse": _q(self.diffuse),
        }

    @classmethod
    def from_json(cls, d: dict) -> "AtomicMeasure":
        atoms = {ResiduePoint.from_json(a): Fraction(a["mass"]) for a in d.get("atoms", [])}
        return cls(atoms, Fraction(d.get("diffuse", "0")))


def _q(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def paired_pullback(reduced: ReducedMap, mu_C: AtomicMeasure, mu_E: AtomicMeasure) -> AtomicMeasure:
    """phi^* mu_E + sum_x s(x) delta_x."""
    if reduced.deg_phi < 1:
        raise ConstantReduction("paired pullback needs a nonconstant reduction")
    atoms: dict[ResiduePoint, Fraction] = {}
    for y, mass in mu_E.atoms.items():
        for x, m in preimages(reduced, y):
            atoms[x] = atoms.get(x, Fraction(0)) + m * mass
    for x, s in surplus_points(reduced.H):
        atoms[x] = atoms.get(x, Fraction(0)) + s
    return AtomicMeasure(atoms, reduced.deg_phi * mu_E.diffuse)


@dataclass(frozen=True)
class SurfaceMeasure:
    """A measure on the central fiber C_0 u E_0 of the blown-up surface.

    ``node_C`` is the point of C_0 where E_0 is attached and ``node_E`` the
    point of E_0 where C_0 is attached (E_0 in A-coordinates).
    """

    on_C: AtomicMeasure
    on_E: AtomicMeasure
    node_C: ResiduePoint
    node_E: ResiduePoint

    def push_C(self) -> AtomicMeasure:
        return self.on_C + AtomicMeasure.delta(self.node_C, self.on_E.total)

    def push_E(self) -> AtomicMeasure:
        return self.on_E + AtomicMeasure.delta(self.node_E, self.on_C.total)


def surface_pullback(reduced: ReducedMap, mu, collapsed: bool) -> AtomicMeasure:
    if not collapsed:
        if isinstance(mu, SurfaceMeasure):
            raise ValueError("uncollapsed pullback takes a measure on a single fiber")
        return paired_pullback(reduced, mu, mu)
    if not isinstance(mu, SurfaceMeasure):
        raise ValueError("collapsed pullback takes a SurfaceMeasure")
    return paired_pullback(reduced, mu.push_C(), mu.push_E())


# --------------------------------------------------------------------------
# components of the one- and two-vertex partitions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    """Vertex(k), Annulus, or Dir(k, point) for vertex index k in {0, 1}."""

    kind: str
    vertex: int = 0
    point: ResiduePoint | None = None

    @classmethod
    def Vertex(cls, k: int = 0) -> "Component":
        return cls("vertex", k)

    @classmethod
    def Annulus(cls) -> "Component":
        return cls("annulus", 0)

    @classmethod
    def Dir(cls, k: int, x: ResiduePoint) -> "Component":
        return cls("dir", k, x)

    def sort_key(self):
        order = {"vertex": 0, "annulus": 1, "dir": 2}.get(self.kind, 3)
        pk = self.point.sort_key() if self.point is not None else ()
        return (order, self.vertex, pk)

    def label(self) -> str:
        if self.kind == "vertex":
            return f"vertex{self.vertex}"
        if self.kind == "dir":
            return f"dir{self.vertex}({self.point.label()})"
        return self.kind

    def to_json(self) -> dict:
        if self.kind == "vertex":
            return {"component": f"vertex{self.vertex}"}
        if self.kind == "annulus":
            return {"component": "annulus"}
        return {"component": "dir", "vertex": self.vertex, "point": self.point.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "Component":
        c = d["component"]
        if c.startswith("vertex"):
            return cls.Vertex(int(c[6:] or 0))
        if c == "annulus":
            return cls.Annulus()
        return cls.Dir(int(d.get("vertex", 0)), ResiduePoint.from_json(d["point"]))

    def __repr__(self):
        return self.label()


# --------------------------------------------------------------------------
# multiplicity table
# --------------------------------------------------------------------------


@dataclass
class MultTable:
    """Entries m_{U,V}: preimages in V (source components) of a point of U.

    Only finitely many directions are listed.  Every row also carries an
    ``unlisted`` count: preimages lying in directions that are not listed.
    """

    reduced: ReducedMap
    A: MobiusK
    two_vertex: bool
    x_star: ResiduePoint | None
    y_star: ResiduePoint | None
    source_points: list[ResiduePoint]
    target_points: list[ResiduePoint]
    _image: dict = field(default_factory=dict, repr=False)
    _m: dict = field(default_factory=dict, repr=False)
    _s: dict = field(default_factory=dict, repr=False)

    @property
    def degree(self) -> int:
        return self.reduced.degree

    @property
    def deg_phi(self) -> int:
        return self.reduced.deg_phi

    def columns(self) -> list[Component]:
        return [Component.Vertex(0)] + [Component.Dir(0, x) for x in self.source_points]

    def rows(self) -> list[Component]:
        if not self.two_vertex:
            return [Component.Vertex(0)] + [Component.Dir(0, y) for y in self.target_points]
        out = [Component.Vertex(0), Component.Vertex(1), Component.Annulus()]
        out += [Component.Dir(0, x) for x in self.source_points if x != self.x_star]
        out += [Component.Dir(1, y) for y in self.target_points if y != self.y_star]
        return out

    def target_direction(self, U: Component) -> ResiduePoint | None:
        """Direction at f(Gauss) containing U (A-coordinates); None for the vertex itself."""
        if not self.two_vertex:
            if U.kind == "dir":
                return U.point
            if U.kind == "vertex" and U.vertex == 0:
                return None
            raise ValueError(f"{U} is not a component of the one-vertex partition")
        if U.kind == "vertex":
            return None if U.vertex == 1 else self.y_star
        if U.kind == "annulus":
            return self.y_star
        if U.vertex == 1:
            if U.point == self.y_star:
                raise ValueError("the direction toward the other vertex is not a component")
            return U.point
        if U.point == self.x_star:
            raise ValueError("the direction toward the other vertex is not a component")
        return self.y_star

    def image(self, x: ResiduePoint) -> ResiduePoint:
        if x not in self._image:
            self._image[x] = direction_image(self.reduced, x)
        return self._image[x]

    def m(self, x: ResiduePoint) -> int:
        if x not in self._m:
            self._m[x] = local_degree(self.reduced, x)
        return self._m[x]

    def s(self, x: ResiduePoint) -> int:
        if x not in self._s:
            self._s[x] = surplus(self.reduced.H, x)
        return self._s[x]

    def entry(self, U: Component, V: Component) -> int:
        y = self.target_direction(U)
        if V.kind == "vertex":
            return self.deg_phi if y is None else 0
        x = V.point
        return self.s(x) + (self.m(x) if y is not None and self.image(x) == y else 0)

    def row(self, U: Component) -> tuple[dict[Component, int], int]:
        """Listed entries (nonzero only) and the count sent to unlisted directions."""
        y = self.target_direction(U)
        out = {}
        for V in self.columns():
            e = self.entry(U, V)
            if e:
                out[V] = e
        if y is None:
            return out, 0
        listed = sum(self.m(x) for x in self.source_points if self.image(x) == y)
        return out, self.deg_phi - listed

    def row_sum(self, U: Component) -> int:
        r, unlisted = self.row(U)
        return sum(r.values()) + unlisted

    def generic_rows(self) -> dict[str, tuple[dict[Component, int], int]]:
        """Rows of components carrying no listed point.

        ``outer`` is a direction at f(Gauss) away from every listed point;
        in the two-vertex case ``inner`` is an unlisted direction at the
        Gauss point, which lies in the direction y* at f(Gauss).
        """
        surplus_row = {Component.Dir(0, x): s for x in self.source_points if (s := self.s(x))}
        out = {"outer": (surplus_row, self.deg_phi)}
        if self.two_vertex:
            out["inner"] = self.row(Component.Annulus())
        return out

    def to_json(self) -> dict:
        cols = self.columns()
        rows = []
        for U in self.rows():
            r, unlisted = self.row(U)
            rows.append({
                "row": U.label(),
                "entries": {V.label(): r[V] for V in cols if V in r},
                "unlisted": unlisted,
                "sum": sum(r.values()) + unlisted,
            })
        return {
            "two_vertex": self.two_vertex,
            "x_star": self.x_star.label() if self.x_star else None,
            "y_star": self.y_star.label() if self.y_star else None,
            "columns": [V.label() for V in cols],
            "rows": rows,
        }


def mult_table(
    f: HomPair,
    A: MobiusK,
    source_points: Iterable[ResiduePoint] = (),
    target_points: Iterable[ResiduePoint] = (),
) -> MultTable:
    g = normalize_pair(mobius_compose(A, f))
    red = split_reduction(g)
    if red.deg_phi < 1:
        raise ConstantReduction("A o f must have nonconstant reduction")
    return mult_table_from_reduced(red, A, source_points, target_points)


def mult_table_from_reduced(
    red: ReducedMap,
    A: MobiusK,
    source_points: Iterable[ResiduePoint] = (),
    target_points: Iterable[ResiduePoint] = (),
) -> MultTable:
    where = classify_vertex(A.inverse())
    two = isinstance(where, DirectionPoint)
    x_star = where.point if two else None
    y_star = classify_vertex(A).point if two else None

    src = set(source_points)
    src.update(x for x, _ in surplus_points(red.H))
    src.update(critical_points(red))
    if x_star is not None:
        src.add(x_star)
    tgt = set(target_points)
    if y_star is not None:
        tgt.add(y_star)
    tgt.update(eval_form_ratio(red.phi_num, red.phi_den, x) for x in src)
    for y in list(tgt):
        src.update(preimage_points(red.phi_num, red.phi_den, y))
    return MultTable(
        red,
        A,
        two,
        x_star,
        y_star,
        sorted(src, key=ResiduePoint.sort_key),
        sorted(tgt, key=ResiduePoint.sort_key),
    )
