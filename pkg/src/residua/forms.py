"""Homogeneous forms over Q(i) and closed points of P^1 over its algebraic closure."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np
import sympy

from .scalars import (
    GPOLY_ONE,
    GPOLY_X,
    GPOLY_ZERO,
    GaussianRational,
    GPoly,
    format_gaussian,
    gpoly_gcd,
)


@dataclass(frozen=True)
class Form:
    """Binary form of fixed degree stored as its dehomogenization F(z, 1).

    ``poly`` has degree <= ``degree``; the deficit is the order at infinity.
    """

    degree: int
    poly: GPoly

    def __post_init__(self):
        if self.poly.degree() > self.degree:
            raise ValueError("polynomial degree exceeds form degree")

    @classmethod
    def from_entries(cls, entries: Iterable) -> "Form":
        """Entry i is the coefficient of z^(D-i) w^i."""
        es = list(entries)
        return cls(len(es) - 1, GPoly.from_coeffs(list(reversed(es))))

    def entries(self) -> list[GaussianRational]:
        return [self.poly.coeff(self.degree - i) for i in range(self.degree + 1)]

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def ord_infinity(self) -> int:
        return self.degree - self.poly.degree() if not self.is_zero() else self.degree + 1

    def __mul__(self, other: "Form") -> "Form":
        return Form(self.degree + other.degree, self.poly * other.poly)

    def exact_div(self, other: "Form") -> "Form":
        return Form(self.degree - other.degree, self.poly.exact_div(other.poly))

    def scale(self, c) -> "Form":
        return Form(self.degree, self.poly.scale(c))

    def normalized(self) -> "Form":
        """Scale so the first nonzero entry is 1."""
        if self.is_zero():
            return self
        return Form(self.degree, self.poly.monic())

    def to_string(self) -> str:
        terms = []
        for i, c in enumerate(self.entries()):
            if not c:
                continue
            a, b = self.degree - i, i
            mono = "*".join(
                s for s in (_pow("z", a), _pow("w", b)) if s
            )
            if not mono:
                terms.append(format_gaussian(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                s = format_gaussian(c)
                terms.append(f"({s})*{mono}" if c.re and c.im else f"{s}*{mono}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out

    def __str__(self):
        return self.to_string()


def _pow(v: str, k: int) -> str:
    if k == 0:
        return ""
    return v if k == 1 else f"{v}^{k}"


def form_gcd(a: Form, b: Form) -> Form:
    """Normalized gcd of two forms (zero form acts as identity)."""
    if a.is_zero():
        return b.normalized()
    if b.is_zero():
        return a.normalized()
    g = gpoly_gcd(a.poly, b.poly)
    k = min(a.ord_infinity(), b.ord_infinity())
    return Form(g.degree() + k, g)


def wronskian(num: Form, den: Form) -> Form:
    """Ramification form of num/den: degree 2e-2, order at x equals m(x) - 1."""
    e = num.degree
    if e == 0:
        return Form(0, GPOLY_ZERO)
    a, b = num.poly, den.poly
    w = a.derivative() * b - a * b.derivative()
    return Form(2 * e - 2, w.scale(e))


# --------------------------------------------------------------------------
# closed points
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ResiduePoint:
    """A point of P^1 over the algebraic closure of Q(i).

    Finite points carry an irreducible monic certificate and the index of the
    root in the deterministic ordering of ``numeric_roots``.
    """

    certificate: GPoly | None
    root_index: int = 0
    approx: complex = field(default=0j, compare=False, hash=False)

    @classmethod
    def infinity(cls) -> "ResiduePoint":
        return INFINITY

    @classmethod
    def rational(cls, c) -> "ResiduePoint":
        c = GaussianRational.coerce(c)
        return cls(GPoly.from_coeffs([-c, 1]), 0, complex(c))

    @classmethod
    def from_root(cls, cert: GPoly, approx: complex) -> "ResiduePoint":
        cert = cert.monic()
        roots = numeric_roots(cert)
        k = int(np.argmin([abs(r - approx) for r in roots]))
        return cls(cert, k, roots[k])

    @classmethod
    def points_of(cls, cert: GPoly) -> list["ResiduePoint"]:
        cert = cert.monic()
        return [cls(cert, k, r) for k, r in enumerate(numeric_roots(cert))]

    @property
    def is_infinity(self) -> bool:
        return self.certificate is None

    @property
    def is_rational(self) -> bool:
        return self.certificate is not None and self.certificate.degree() == 1

    def exact_value(self) -> GaussianRational:
        if not self.is_rational:
            raise ValueError(f"{self} is not Q(i)-rational")
        return -self.certificate.coeff(0)

    def label(self) -> str:
        if self.is_infinity:
            return "inf"
        if self.is_rational:
            return format_gaussian(self.exact_value())
        return f"root[{self.root_index}] of {self.certificate.to_string('z')}"

    def sort_key(self):
        if self.is_infinity:
            return (1, 0, 0.0, 0.0, 0)
        return (0, self.certificate.degree(), round(self.approx.real, 9), round(self.approx.imag, 9), self.root_index)

    def to_json(self) -> dict:
        if self.is_infinity:
            return {"at_infinity": True, "certificate": None, "re": None, "im": None}
        return {
            "at_infinity": False,
            "certificate": [str(c) for c in self.certificate.coeffs()],
            "root_index": self.root_index,
            "re": _fmt_float(self.approx.real),
            "im": _fmt_float(self.approx.imag),
        }

    @classmethod
    def from_json(cls, d) -> "ResiduePoint":
        if isinstance(d, str):
            return parse_point(d)
        if d.get("at_infinity"):
            return INFINITY
        cert = GPoly.from_coeffs([GaussianRational.coerce(c) for c in d["certificate"]])
        k = int(d.get("root_index", 0))
        return cls(cert, k, numeric_roots(cert)[k])

    def __repr__(self):
        return f"ResiduePoint({self.label()})"

    def __str__(self):
        return self.label()


INFINITY = ResiduePoint(None, 0, complex("inf"))


def _fmt_float(x: float) -> str:
    return f"{x:.12g}" if abs(x) > 1e-14 else "0"


def parse_point(s: str) -> ResiduePoint:
    s = s.strip()
    if s.lower() in ("inf", "infinity", "∞", "oo"):
        return INFINITY
    return ResiduePoint.rational(GaussianRational.coerce(s))


# --------------------------------------------------------------------------
# roots and factorization
# --------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def numeric_roots(p: GPoly) -> tuple[complex, ...]:
    """Roots of a squarefree polynomial, polished and in deterministic order."""
    n = p.degree()
    if n <= 0:
        return ()
    if n == 1:
        c = -p.coeff(0) / p.coeff(1)
        return (complex(c),)
    cs = p.complex_coeffs()
    roots = np.roots(list(reversed(cs)))
    dp = p.derivative()
    out = []
    for r in roots:
        r = complex(r)
        for _ in range(3):
            d = dp.evaluate_complex(r)
            if d == 0:
                break
            step = p.evaluate_complex(r) / d
            r -= step
            if abs(step) <= 1e-16 * max(1.0, abs(r)):
                break
        out.append(r)
    out.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return tuple(out)


_Z = sympy.Symbol("z")


def _to_sympy(p: GPoly):
    return sympy.Poly(
        [sympy.Rational(c.re) + sympy.I * sympy.Rational(c.im) for c in reversed(p.coeffs())],
        _Z,
        domain="QQ_I",
    )


def _from_sympy(poly) -> GPoly:
    cs = []
    for c in reversed(poly.all_coeffs()):
        re_, im_ = sympy.Rational(sympy.re(c)), sympy.Rational(sympy.im(c))
        cs.append(GaussianRational(_frac(re_), _frac(im_)))
    return GPoly.from_coeffs(cs)


def _frac(r):
    from fractions import Fraction

    return Fraction(int(r.p), int(r.q))


@lru_cache(maxsize=2048)
def irreducible_factors(p: GPoly) -> tuple[tuple[GPoly, int], ...]:
    """Monic irreducible factors over Q(i) with multiplicities (constant dropped)."""
    if p.degree() <= 0:
        return ()
    # peel off the power of z first; it is by far the most common factor
    k = p.order()
    out: list[tuple[GPoly, int]] = []
    if k:
        out.append((GPOLY_X, k))
        p = p.shift(-k)
    if p.degree() == 1:
        out.append((p.monic(), 1))
    elif p.degree() > 1:
        _, facs = _to_sympy(p).factor_list()
        for f, e in facs:
            out.append((_from_sympy(f).monic(), int(e)))
    out.sort(key=lambda fe: (fe[0].degree(), [(c.re, c.im) for c in fe[0].coeffs()]))
    return tuple(out)


def form_points(F: Form) -> list[tuple[ResiduePoint, int]]:
    """Points where a nonzero form vanishes, with orders."""
    if F.is_zero():
        raise ValueError("zero form vanishes everywhere")
    out = []
    for cert, e in irreducible_factors(F.poly):
        for pt in ResiduePoint.points_of(cert):
            out.append((pt, e))
    k = F.ord_infinity()
    if k:
        out.append((INFINITY, k))
    return out


def ord_at(F: Form, x: ResiduePoint) -> int:
    """Order of vanishing of the form F at x."""
    if F.is_zero():
        raise ValueError("zero form has infinite order")
    if x.is_infinity:
        return F.ord_infinity()
    p, c, k = F.poly, x.certificate, 0
    while p.degree() >= c.degree():
        q, r = p.divmod(c)
        if not r.is_zero():
            break
        p, k = q, k + 1
    return k


def eval_form_ratio(num: Form, den: Form, x: ResiduePoint) -> ResiduePoint:
    """Image of x under num/den (forms without common zero)."""
    if x.is_infinity:
        a = num.poly.coeff(num.degree)
        b = den.poly.coeff(den.degree)
        if not b:
            return INFINITY
        return ResiduePoint.rational(a / b)
    if x.is_rational:
        v = x.exact_value()
        a, b = num.poly(v), den.poly(v)
        if not b:
            return INFINITY
        return ResiduePoint.rational(a / b)
    c = x.certificate
    if (den.poly % c).is_zero():
        return INFINITY
    # the image is a root of Res_z(c(z), num(z) - y den(z)) in y
    y = sympy.Symbol("y")
    csym = _to_sympy(c).as_expr()
    nexpr = _to_sympy(num.poly).as_expr() if not num.poly.is_zero() else sympy.Integer(0)
    dexpr = _to_sympy(den.poly).as_expr()
    res = sympy.Poly(sympy.resultant(csym, nexpr - y * dexpr, _Z), y, domain="QQ_I")
    approx = num.poly.evaluate_complex(x.approx) / den.poly.evaluate_complex(x.approx)
    best, best_d = None, None
    for f, _ in res.factor_list()[1]:
        g = _from_sympy(sympy.Poly(f.as_expr().subs(y, _Z), _Z, domain="QQ_I")).monic()
        if g.degree() < 1:
            continue
        for k, r in enumerate(numeric_roots(g)):
            d = abs(r - approx)
            if best_d is None or d < best_d:
                best, best_d = ResiduePoint(g, k, r), d
    return best


def preimage_points(num: Form, den: Form, y: ResiduePoint) -> list[ResiduePoint]:
    """Solutions of (num/den)(x) = y for y rational or infinity, or algebraic."""
    if y.is_infinity:
        G = den
    elif y.is_rational:
        v = y.exact_value()
        G = Form(num.degree, num.poly - den.poly.scale(v))
    else:
        # x is a root of Res_u(c(u), num(x) - u den(x)) whose image matches y
        u = sympy.Symbol("u")
        csym = _to_sympy(y.certificate).as_expr().subs(_Z, u)
        nexpr = _to_sympy(num.poly).as_expr() if not num.poly.is_zero() else sympy.Integer(0)
        dexpr = _to_sympy(den.poly).as_expr()
        res = sympy.Poly(sympy.resultant(csym, nexpr - u * dexpr, u), _Z, domain="QQ_I")
        G = Form(num.degree * y.certificate.degree(), _from_sympy(res))
        cands = [p for p, _ in form_points(G)]
        return sorted({p for p in cands if eval_form_ratio(num, den, p) == y}, key=ResiduePoint.sort_key)
    return sorted({p for p, _ in form_points(G)}, key=ResiduePoint.sort_key)


def chordal(a: complex, b: complex) -> float:
    """Chordal distance on the Riemann sphere (inf allowed)."""
    ai, bi = cmath.isinf(a), cmath.isinf(b)
    if ai and bi:
        return 0.0
    if ai:
        return 2.0 / (1.0 + abs(b) ** 2) ** 0.5
    if bi:
        return 2.0 / (1.0 + abs(a) ** 2) ** 0.5
    return 2.0 * abs(a - b) / ((1.0 + abs(a) ** 2) ** 0.5 * (1.0 + abs(b) ** 2) ** 0.5)
