"""Homogeneous pairs over K = Q(i)(t) and their reductions modulo t."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from .forms import Form, ResiduePoint, form_gcd, INFINITY
from .scalars import (
    FS_ONE,
    FS_ZERO,
    FieldScalar,
    GaussianRational,
    GPoly,
    GPOLY_ONE,
    ZERO_Q,
)


class DegenerateComposite(ArithmeticError):
    pass


class InvalidPair(ValueError):
    """The two forms share a factor over K (zero resultant)."""


# --------------------------------------------------------------------------
# bivariate packing: a form with coefficients in Q(i)[t] as one GPoly
# --------------------------------------------------------------------------


def _poly_coeffs_in_t(coeffs: Sequence[FieldScalar]) -> tuple[list[GPoly], FieldScalar]:
    """Write coeffs = scale * (polynomials in t); returns (polys, scale)."""
    nz = [c for c in coeffs if not c.is_zero()]
    if not nz:
        return [GPoly() for _ in coeffs], FS_ONE
    vmin = min(c.v for c in nz)
    den = GPOLY_ONE
    for c in nz:
        if not c.den.is_one():
            den = _lcm(den, c.den)
    polys = []
    for c in coeffs:
        if c.is_zero():
            polys.append(GPoly())
            continue
        p = c.num.shift(c.v - vmin)
        if not den.is_one():
            p = p * den.exact_div(c.den)
        polys.append(p)
    scale = FieldScalar.t_power(vmin)
    if not den.is_one():
        scale = scale / FieldScalar.from_polys(den)
    return polys, scale


def _lcm(a: GPoly, b: GPoly) -> GPoly:
    from .scalars import gpoly_gcd

    g = gpoly_gcd(a, b)
    return (a * b).exact_div(g).monic()


class _TForm:
    """Form of degree D with coefficients in Q(i)[t], Kronecker-packed.

    Entry i (coefficient of z^(D-i) w^i) occupies slots [i*S, i*S + S).
    """

    __slots__ = ("degree", "packed", "stride")

    def __init__(self, degree: int, packed: GPoly, stride: int):
        self.degree, self.packed, self.stride = degree, packed, stride

    @classmethod
    def pack(cls, polys: Sequence[GPoly], stride: int) -> "_TForm":
        re_, im_ = [], []
        den = 1
        for p in polys:
            den = math.lcm(den, p.den)
        for p in polys:
            k = den // p.den
            r = [x * k for x in p.re] + [0] * (stride - len(p.re))
            j = [x * k for x in p.im] + [0] * (stride - len(p.im))
            re_.extend(r)
            im_.extend(j)
        return cls(len(polys) - 1, GPoly(re_, im_, den), stride)

    def unpack(self) -> list[GPoly]:
        S, p = self.stride, self.packed
        out = []
        for i in range(self.degree + 1):
            lo = i * S
            out.append(GPoly(p.re[lo:lo + S], p.im[lo:lo + S], p.den))
        return out

    def mul(self, other: "_TForm") -> "_TForm":
        return _TForm(self.degree + other.degree, self.packed * other.packed, self.stride)

    def add(self, other: "_TForm") -> "_TForm":
        return _TForm(self.degree, self.packed + other.packed, self.stride)


def _t_degree(polys: Sequence[GPoly]) -> int:
    return max((p.degree() for p in polys), default=0)


# --------------------------------------------------------------------------
# HomPair
# --------------------------------------------------------------------------


class HomPair:
    """A pair (P, Q) of degree-D forms over K; entry i multiplies z^(D-i) w^i."""

    __slots__ = ("P", "Q", "degree", "_res_val")

    def __init__(self, P: Sequence, Q: Sequence, *, res_val=None, check: bool = True):
        P = tuple(FieldScalar.coerce(c) for c in P)
        Q = tuple(FieldScalar.coerce(c) for c in Q)
        if len(P) != len(Q) or not P:
            raise ValueError("forms must have the same degree")
        self.P, self.Q, self.degree = P, Q, len(P) - 1
        self._res_val = res_val
        if all(c.is_zero() for c in P + Q):
            raise InvalidPair("(P, Q) = (0, 0)")
        if check and res_val is None and not self._coprime_generic():
            if resultant(self).is_zero():
                raise InvalidPair("resultant vanishes identically")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_strings(cls, num: Sequence[str], den: Sequence[str]) -> "HomPair":
        return cls([FieldScalar.coerce(s) for s in num], [FieldScalar.coerce(s) for s in den])

    @classmethod
    def from_json(cls, data) -> "HomPair":
        if isinstance(data, str):
            data = json.loads(data)
        d = int(data["degree"])
        num, den = data["numerator"], data["denominator"]
        if len(num) != d + 1 or len(den) != d + 1:
            raise ValueError("coefficient lists must have degree + 1 entries")
        return cls.from_strings(num, den)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "numerator": [str(c) for c in self.P],
            "denominator": [str(c) for c in self.Q],
        }

    @classmethod
    def identity(cls) -> "HomPair":
        return cls([1, 0], [0, 1], res_val=0, check=False)

    # -- queries ----------------------------------------------------------------

    def min_valuation(self) -> int:
        return min(c.v for c in self.P + self.Q if not c.is_zero())

    def side_valuation(self, side: int):
        cs = self.P if side == 0 else self.Q
        vs = [c.v for c in cs if not c.is_zero()]
        return min(vs) if vs else math.inf

    @property
    def res_val(self) -> int:
        """Valuation of the resultant (cached)."""
        if self._res_val is None:
            self._res_val = resultant(self).val()
        return self._res_val

    def _coprime_generic(self) -> bool:
        """Cheap sufficient test for Res != 0: coprime after t -> small rationals."""
        for t0 in (GaussianRational(3, 7), GaussianRational(-5, 11), GaussianRational(2, 13)):
            try:
                a = Form.from_entries([c.evaluate_exact(t0) for c in self.P])
                b = Form.from_entries([c.evaluate_exact(t0) for c in self.Q])
            except ZeroDivisionError:
                continue
            if a.is_zero() or b.is_zero():
                continue
            if form_gcd(a, b).degree == 0:
                return True
        return False

    def evaluate(self, t0: complex) -> tuple[list[complex], list[complex]]:
        return [c.evaluate(t0) for c in self.P], [c.evaluate(t0) for c in self.Q]

    def __eq__(self, other):
        return isinstance(other, HomPair) and self.P == other.P and self.Q == other.Q

    def __hash__(self):
        return hash((self.P, self.Q))

    def projectively_equal(self, other: "HomPair") -> bool:
        a, b = normalize_pair(self), normalize_pair(other)
        if a.degree != b.degree:
            return False
        ca, cb = a.P + a.Q, b.P + b.Q
        k = next(i for i, c in enumerate(ca) if not c.is_zero())
        if cb[k].is_zero():
            return False
        r = cb[k] / ca[k]
        return all(y == x * r for x, y in zip(ca, cb))

    def __repr__(self):
        return f"HomPair(P={[str(c) for c in self.P]}, Q={[str(c) for c in self.Q]})"

    # -- packing ------------------------------------------------------------------

    def _packed(self) -> tuple[list[GPoly], list[GPoly], FieldScalar]:
        polys, scale = _poly_coeffs_in_t(self.P + self.Q)
        D = self.degree
        return polys[: D + 1], polys[D + 1:], scale


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def compose(outer: HomPair, inner: HomPair) -> HomPair:
    """outer(P_inner, Q_inner), exact (not only projectively)."""
    e, D = outer.degree, inner.degree
    pi, qi, s_in = inner._packed()
    po, qo, s_out = outer._packed()
    # total t-degree bound of the packed result fixes the Kronecker stride
    stride = e * _t_degree(pi + qi) + _t_degree(po + qo) + 1
    Pin = _TForm.pack(pi, stride)
    Qin = _TForm.pack(qi, stride)
    # powers P^k and Q^k, k = 0..e
    ppow = [_TForm.pack([GPOLY_ONE], stride)]
    qpow = [_TForm.pack([GPOLY_ONE], stride)]
    for _ in range(e):
        ppow.append(ppow[-1].mul(Pin))
        qpow.append(qpow[-1].mul(Qin))
    monos = [ppow[e - i].mul(qpow[i]) for i in range(e + 1)]

    def apply(coeffs: list[GPoly]) -> list[GPoly]:
        acc = None
        for i, c in enumerate(coeffs):
            if c.is_zero():
                continue
            # strided slots leave room for the t-degree of c, so no spill
            term = _TForm(e * D, monos[i].packed * c, stride)
            acc = term if acc is None else acc.add(term)
        if acc is None:
            return [GPoly() for _ in range(e * D + 1)]
        return acc.unpack()

    newP = apply(po)
    newQ = apply(qo)
    scale = s_out * (s_in ** e)
    P = [_scaled(p, scale) for p in newP]
    Q = [_scaled(q, scale) for q in newQ]
    rv = None
    if outer._res_val is not None and inner._res_val is not None:
        rv = D * outer._res_val + e * e * inner._res_val
    if e * D > 0 and (all(c.is_zero() for c in P) or all(c.is_zero() for c in Q)):
        raise DegenerateComposite("composite has an identically zero side")
    return HomPair(P, Q, res_val=rv, check=False)


def _scaled(p: GPoly, scale: FieldScalar) -> FieldScalar:
    if p.is_zero():
        return FS_ZERO
    x = FieldScalar.from_polys(p)
    if scale.den.is_one() and scale.num.is_one():
        return x.shift(scale.v)
    return x * scale


def normalize_pair(f: HomPair) -> HomPair:
    """t^(-m) f with m the minimum coefficient valuation."""
    m = f.min_valuation()
    if m == 0:
        return f
    rv = None if f._res_val is None else f._res_val - 2 * f.degree * m
    return HomPair([c.shift(-m) for c in f.P], [c.shift(-m) for c in f.Q], res_val=rv, check=False)


@dataclass(frozen=True)
class ReducedMap:
    """Split of a reduced pair into gcd H and reduction phi = phi_num/phi_den."""

    H: Form
    phi_num: Form
    phi_den: Form

    @property
    def deg_phi(self) -> int:
        return self.phi_num.degree

    @property
    def degree(self) -> int:
        return self.H.degree + self.deg_phi

    def is_constant(self) -> bool:
        return self.deg_phi == 0

    def constant_value(self) -> ResiduePoint:
        a = self.phi_num.poly.coeff(0)
        b = self.phi_den.poly.coeff(0)
        if not b:
            return INFINITY
        return ResiduePoint.rational(a / b)

    def phi_string(self) -> str:
        return f"({self.phi_num})/({self.phi_den})"

    def to_json(self) -> dict:
        return {
            "H": str(self.H),
            "deg_H": self.H.degree,
            "phi_num": str(self.phi_num),
            "phi_den": str(self.phi_den),
            "deg_phi": self.deg_phi,
        }


def reduce_pair(f: HomPair) -> tuple[Form, Form]:
    """Coefficient-wise reduction at t = 0 of a normalized pair."""
    return (
        Form.from_entries([c.reduce_at_zero() for c in f.P]),
        Form.from_entries([c.reduce_at_zero() for c in f.Q]),
    )


def split_reduction(f: HomPair) -> ReducedMap:
    if f.min_valuation() != 0:
        raise ValueError("split_reduction expects a normalized pair")
    P0, Q0 = reduce_pair(f)
    H = form_gcd(P0, Q0)
    if P0.is_zero():
        num, den = Form(0, GPoly()), Form(0, GPoly.constant(1))
    elif Q0.is_zero():
        num, den = Form(0, GPoly.constant(1)), Form(0, GPoly())
    else:
        num, den = P0.exact_div(H), Q0.exact_div(H)
        if num.degree == 0:
            # constant reduction: keep the ratio, normalized to den = 1
            c = num.poly.coeff(0) / den.poly.coeff(0)
            num, den = Form(0, GPoly.constant(c)), Form(0, GPoly.constant(1))
        else:
            # scale so phi_den has first nonzero entry 1 and H stays normalized
            lead = den.poly.leading()
            num, den = num.scale(lead.inverse()), den.scale(lead.inverse())
    return ReducedMap(H, num, den)


def resultant(f: HomPair) -> FieldScalar:
    """Sylvester resultant of P, Q as degree-D forms (Gaussian elimination over K)."""
    D = f.degree
    if D == 0:
        return FS_ONE
    n = 2 * D
    rows = []
    for k in range(D):
        rows.append([FS_ZERO] * k + list(f.P) + [FS_ZERO] * (D - 1 - k))
    for k in range(D):
        rows.append([FS_ZERO] * k + list(f.Q) + [FS_ZERO] * (D - 1 - k))
    det = FS_ONE
    for col in range(n):
        piv = None
        best = None
        for r in range(col, n):
            x = rows[r][col]
            if not x.is_zero():
                key = (x.num.degree() + x.den.degree(), x.v)
                if best is None or key < best:
                    piv, best = r, key
        if piv is None:
            return FS_ZERO
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        p = rows[col][col]
        det = det * p
        inv = p.inverse()
        for r in range(col + 1, n):
            x = rows[r][col]
            if x.is_zero():
                continue
            m = x * inv
            rows[r] = [a - m * b if not b.is_zero() else a for a, b in zip(rows[r], rows[col])]
    return det


# --------------------------------------------------------------------------
# Mobius transformations over K
# --------------------------------------------------------------------------


class MobiusK:
    """2x2 invertible matrix [[a, b], [c, d]] over K acting on (z : w)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (FieldScalar.coerce(x) for x in (a, b, c, d))
        if self.det().is_zero():
            raise ValueError("singular Mobius matrix")

    @classmethod
    def identity(cls) -> "MobiusK":
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, x, y) -> "MobiusK":
        return cls(x, 0, 0, y)

    @classmethod
    def swap(cls) -> "MobiusK":
        return cls(0, 1, 1, 0)

    @classmethod
    def translation(cls, c) -> "MobiusK":
        """z -> z + c."""
        return cls(1, c, 0, 1)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def det(self) -> FieldScalar:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o: "MobiusK") -> "MobiusK":
        return MobiusK(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> "MobiusK":
        return MobiusK(self.d, -self.b, -self.c, self.a).normalized()

    def normalized(self) -> "MobiusK":
        m = min(x.v for x in self.entries() if not x.is_zero())
        if m == 0:
            return self
        return MobiusK(*(x.shift(-m) for x in self.entries()))

    def reduced(self) -> tuple[GaussianRational, ...]:
        return tuple(x.reduce_at_zero() for x in self.normalized().entries())

    def as_pair(self) -> HomPair:
        return HomPair([self.a, self.b], [self.c, self.d], check=False)

    def projectively_equal(self, other: "MobiusK") -> bool:
        return self.as_pair().projectively_equal(other.as_pair())

    def to_json(self) -> list[list[str]]:
        return [[str(self.a), str(self.b)], [str(self.c), str(self.d)]]

    def __eq__(self, other):
        return isinstance(other, MobiusK) and self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def __repr__(self):
        return f"MobiusK({self.to_json()})"


def mobius_compose(A: MobiusK, f: HomPair) -> HomPair:
    """A acting on the column (P, Q)."""
    P = [A.a * p + A.b * q for p, q in zip(f.P, f.Q)]
    Q = [A.c * p + A.d * q for p, q in zip(f.P, f.Q)]
    rv = None
    if f._res_val is not None:
        rv = f._res_val + f.degree * A.det().val()
    return HomPair(P, Q, res_val=rv, check=False)


def precompose_mobius(f: HomPair, B: MobiusK) -> HomPair:
    """f o B, i.e. substitute (z, w) <- (a z + b w, c z + d w)."""
    return compose(f, HomPair([B.a, B.b], [B.c, B.d], res_val=B.det().val(), check=False))


def conjugate(f: HomPair, B: MobiusK) -> HomPair:
    """B o f o B^-1."""
    return mobius_compose(B, precompose_mobius(f, B.inverse()))


@dataclass(frozen=True)
class GaussFixed:
    def to_json(self):
        return {"kind": "gauss_fixed"}


@dataclass(frozen=True)
class DirectionPoint:
    point: ResiduePoint

    def to_json(self):
        return {"kind": "direction", "point": self.point.label()}


def classify_vertex(B: MobiusK):
    """GaussFixed if B fixes the Gauss point, else the direction containing B(Gauss)."""
    a, b, c, d = B.reduced()
    if a * d - b * c:
        return GaussFixed()
    # rank one: the image is spanned by a nonzero column
    if a or c:
        x, y = a, c
    else:
        x, y = b, d
    if not y:
        return DirectionPoint(INFINITY)
    return DirectionPoint(ResiduePoint.rational(x / y))
