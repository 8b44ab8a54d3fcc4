"""Exact arithmetic in K = Q(i)(t) with the t-adic valuation.

Three layers live here:

* ``GaussianRational``: elements of the residue field Q(i).
* ``GPoly``: univariate polynomials over Q(i).  Coefficients are stored as
  Gaussian integers over one common denominator so that products reduce to
  big-integer multiplication (Kronecker substitution).
* ``FieldScalar``: elements t^v * num/den of K with num(0) != 0 and den(0) = 1,
  so the valuation is read off in O(1).

``SeriesTrunc`` and ``newton_lift`` provide truncated power series in t and
Hensel/Newton lifting of simple roots.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rationalish = Union[int, Fraction]


class NegativeValuation(ArithmeticError):
    pass


class NoLift(ArithmeticError):
    """Raised when a seed does not lift to a series root."""


# --------------------------------------------------------------------------
# Q(i)
# --------------------------------------------------------------------------


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re: Rationalish = 0, im: Rationalish = 0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return parse_gaussian(x)
        raise TypeError(f"cannot coerce {x!r} to GaussianRational")

    def __add__(self, other):
        o = _gr(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _gr(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _gr(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = _gr(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = _gr(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _gr(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE_Q, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _gr(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        return format_gaussian(self)


def _gr(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return NotImplemented


ZERO_Q = GaussianRational(0)
ONE_Q = GaussianRational(1)
I_Q = GaussianRational(0, 1)


def format_gaussian(x: GaussianRational) -> str:
    if not x.im:
        return str(x.re)
    if not x.re:
        if x.im == 1:
            return "i"
        if x.im == -1:
            return "-i"
        return f"{x.im}*i"
    sign = "+" if x.im > 0 else "-"
    mag = abs(x.im)
    im = "i" if mag == 1 else f"{mag}*i"
    return f"{x.re}{sign}{im}"


_GAUSS_RE = re.compile(r"^\s*\(?\s*([^()]*?)\s*\)?\s*$")


def parse_gaussian(s: str) -> GaussianRational:
    """Parse '3/2', '-i', '1/2+3/4*i', '(2-i)' into a GaussianRational."""
    fs = parse_scalar(s)
    if fs.is_zero():
        return ZERO_Q
    if fs.v != 0 or fs.num.degree() != 0 or not fs.den.is_one():
        raise ValueError(f"{s!r} is not a constant in Q(i)")
    return fs.num.coeff(0)


# --------------------------------------------------------------------------
# integer convolution by Kronecker substitution
# --------------------------------------------------------------------------

_SCHOOLBOOK = 6


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    half = 1 << (8 * nbytes - 1)
    buf = b"".join((c + half).to_bytes(nbytes, "little") for c in coeffs)
    bias = int.from_bytes((half.to_bytes(nbytes, "little")) * len(coeffs), "little")
    return int.from_bytes(buf, "little") - bias


def _unpack(x: int, n: int, nbytes: int) -> list[int]:
    half = 1 << (8 * nbytes - 1)
    bias = int.from_bytes((half.to_bytes(nbytes, "little")) * n, "little")
    buf = (x + bias).to_bytes(nbytes * n, "little")
    return [int.from_bytes(buf[k * nbytes:(k + 1) * nbytes], "little") - half for k in range(n)]


def convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of integer polynomials given as low-to-high coefficient lists."""
    la, lb = len(a), len(b)
    if not la or not lb:
        return []
    if min(la, lb) <= _SCHOOLBOOK:
        out = [0] * (la + lb - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if not ma or not mb:
        return [0] * (la + lb - 1)
    bits = ma.bit_length() + mb.bit_length() + min(la, lb).bit_length() + 2
    nbytes = (bits + 7) // 8
    n = la + lb - 1
    return _unpack(_pack(a, nbytes) * _pack(b, nbytes), n, nbytes)


def _add_int(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def _sub_int(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, y in enumerate(b):
        out[i] -= y
    return out


# --------------------------------------------------------------------------
# Q(i)[x]
# --------------------------------------------------------------------------


class GPoly:
    """Univariate polynomial over Q(i), coefficients low-to-high.

    Stored as (re, im, den): Gaussian integer coefficient tuples over a common
    positive denominator, reduced so that gcd(re, im, den) = 1.
    """

    __slots__ = ("re", "im", "den", "_hash")

    def __init__(self, re: Sequence[int] = (), im: Sequence[int] = (), den: int = 1, *, _canonical=False):
        if _canonical:
            self.re, self.im, self.den = re, im, den
        else:
            self.re, self.im, self.den = _canon(list(re), list(im), den)
        self._hash = None

    @classmethod
    def from_coeffs(cls, coeffs: Iterable) -> "GPoly":
        cs = [GaussianRational.coerce(c) for c in coeffs]
        if not cs:
            return GPOLY_ZERO
        den = 1
        for c in cs:
            den = math.lcm(den, c.re.denominator, c.im.denominator)
        re_ = [c.re.numerator * (den // c.re.denominator) for c in cs]
        im_ = [c.im.numerator * (den // c.im.denominator) for c in cs]
        return cls(re_, im_, den)

    @classmethod
    def constant(cls, c) -> "GPoly":
        return cls.from_coeffs([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> "GPoly":
        return cls.from_coeffs([0] * k + [c])

    # -- basic queries -----------------------------------------------------

    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.re) - 1

    def __len__(self):
        return len(self.re)

    def is_zero(self) -> bool:
        return not self.re

    def is_one(self) -> bool:
        return len(self.re) == 1 and self.re[0] == 1 and self.im[0] == 0 and self.den == 1

    def coeff(self, k: int) -> GaussianRational:
        if k < 0 or k >= len(self.re):
            return ZERO_Q
        return GaussianRational(Fraction(self.re[k], self.den), Fraction(self.im[k], self.den))

    def coeffs(self) -> list[GaussianRational]:
        return [self.coeff(k) for k in range(len(self.re))]

    def leading(self) -> GaussianRational:
        return self.coeff(len(self.re) - 1)

    def order(self) -> int:
        """Lowest index with nonzero coefficient (math.inf for zero)."""
        for k, (a, b) in enumerate(zip(self.re, self.im)):
            if a or b:
                return k
        return math.inf

    def is_constant(self) -> bool:
        return len(self.re) <= 1

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "GPoly") -> "GPoly":
        if not isinstance(other, GPoly):
            other = GPoly.constant(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return GPoly(_add_int(self.re, other.re), _add_int(self.im, other.im), self.den)
        l = math.lcm(self.den, other.den)
        sa, sb = l // self.den, l // other.den
        return GPoly(
            _add_int([x * sa for x in self.re], [x * sb for x in other.re]),
            _add_int([x * sa for x in self.im], [x * sb for x in other.im]),
            l,
        )

    __radd__ = __add__

    def __neg__(self) -> "GPoly":
        return GPoly(tuple(-x for x in self.re), tuple(-x for x in self.im), self.den, _canonical=True)

    def __sub__(self, other: "GPoly") -> "GPoly":
        if not isinstance(other, GPoly):
            other = GPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return GPoly.constant(other) - self

    def __mul__(self, other) -> "GPoly":
        if not isinstance(other, GPoly):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return GPOLY_ZERO
        a, b, c, d = self.re, self.im, other.re, other.im
        a_real = not any(b)
        c_real = not any(d)
        if a_real and c_real:
            return GPoly(convolve(a, c), [], self.den * other.den)
        if a_real:
            return GPoly(convolve(a, c), convolve(a, d), self.den * other.den)
        if c_real:
            return GPoly(convolve(a, c), convolve(b, c), self.den * other.den)
        ac = convolve(a, c)
        bd = convolve(b, d)
        cross = convolve(_add_int(a, b), _add_int(c, d))
        re_ = _sub_int(ac, bd)
        im_ = _sub_int(_sub_int(cross, ac), bd)
        return GPoly(re_, im_, self.den * other.den)

    __rmul__ = __mul__

    def scale(self, c) -> "GPoly":
        c = GaussianRational.coerce(c)
        if not c or self.is_zero():
            return GPOLY_ZERO
        l = math.lcm(c.re.denominator, c.im.denominator)
        p, q = c.re.numerator * (l // c.re.denominator), c.im.numerator * (l // c.im.denominator)
        re_ = [x * p - y * q for x, y in zip(self.re, self.im)]
        im_ = [x * q + y * p for x, y in zip(self.re, self.im)]
        return GPoly(re_, im_, self.den * l)

    def shift(self, k: int) -> "GPoly":
        """Multiply by x^k (k >= 0) or drop the k lowest coefficients (k < 0)."""
        if self.is_zero() or k == 0:
            return self
        if k > 0:
            z = (0,) * k
            return GPoly(z + tuple(self.re), z + tuple(self.im), self.den, _canonical=True)
        return GPoly(self.re[-k:], self.im[-k:], self.den)

    def truncate(self, n: int) -> "GPoly":
        """Keep coefficients of x^0 .. x^(n-1)."""
        if len(self.re) <= n:
            return self
        return GPoly(self.re[:n], self.im[:n], self.den)

    def __pow__(self, k: int) -> "GPoly":
        out, base = GPOLY_ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other: "GPoly") -> tuple["GPoly", "GPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        n, m = self.degree(), other.degree()
        if n < m:
            return GPOLY_ZERO, self
        rem = self.coeffs()
        div = other.coeffs()
        inv = div[-1].inverse()
        quo = [ZERO_Q] * (n - m + 1)
        for k in range(n - m, -1, -1):
            c = rem[k + m] * inv
            quo[k] = c
            if c:
                for j in range(m + 1):
                    rem[k + j] = rem[k + j] - c * div[j]
        return GPoly.from_coeffs(quo), GPoly.from_coeffs(rem[:m])

    def __floordiv__(self, other: "GPoly") -> "GPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "GPoly") -> "GPoly":
        return self.divmod(other)[1]

    def exact_div(self, other: "GPoly") -> "GPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> "GPoly":
        if self.is_zero():
            return self
        return self.scale(self.leading().inverse())

    def derivative(self) -> "GPoly":
        if len(self.re) <= 1:
            return GPOLY_ZERO
        return GPoly(
            [k * self.re[k] for k in range(1, len(self.re))],
            [k * self.im[k] for k in range(1, len(self.im))],
            self.den,
        )

    def __call__(self, x):
        """Exact evaluation at a GaussianRational (Horner)."""
        x = GaussianRational.coerce(x)
        acc = ZERO_Q
        for c in reversed(self.coeffs()):
            acc = acc * x + c
        return acc

    def evaluate_complex(self, x: complex) -> complex:
        acc = 0j
        for a, b in zip(reversed(self.re), reversed(self.im)):
            acc = acc * x + complex(a / self.den, b / self.den)
        return acc

    def complex_coeffs(self) -> list[complex]:
        return [complex(a / self.den, b / self.den) for a, b in zip(self.re, self.im)]

    def compose(self, inner: "GPoly") -> "GPoly":
        acc = GPOLY_ZERO
        for c in reversed(self.coeffs()):
            acc = acc * inner + GPoly.constant(c)
        return acc

    def reverse(self, n: int | None = None) -> "GPoly":
        """x^n * p(1/x) with n defaulting to the degree."""
        if n is None:
            n = self.degree()
        cs = self.coeffs() + [ZERO_Q] * (n + 1 - len(self.re))
        return GPoly.from_coeffs(list(reversed(cs[: n + 1])))

    def conjugate(self) -> "GPoly":
        return GPoly(self.re, tuple(-x for x in self.im), self.den, _canonical=True)

    # -- identity ------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, GPoly):
            try:
                other = GPoly.constant(other)
            except TypeError:
                return False
        return self.den == other.den and self.re == other.re and self.im == other.im

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.re, self.im, self.den))
        return self._hash

    def __repr__(self):
        return f"GPoly({self.to_string()})"

    def to_string(self, var: str = "x") -> str:
        terms = []
        for k in range(len(self.re)):
            c = self.coeff(k)
            if c:
                terms.append(_term(c, var, k))
        if not terms:
            return "0"
        return _join_terms(terms)


def _canon(re_: list[int], im_: list[int], den: int):
    n = max(len(re_), len(im_))
    if len(re_) < n:
        re_ += [0] * (n - len(re_))
    if len(im_) < n:
        im_ += [0] * (n - len(im_))
    while n and not re_[n - 1] and not im_[n - 1]:
        n -= 1
    if not n:
        return (), (), 1
    re_, im_ = re_[:n], im_[:n]
    if den < 0:
        den = -den
        re_ = [-x for x in re_]
        im_ = [-x for x in im_]
    g = math.gcd(den, *re_, *im_)
    if g != 1:
        den //= g
        re_ = [x // g for x in re_]
        im_ = [x // g for x in im_]
    return tuple(re_), tuple(im_), den


GPOLY_ZERO = GPoly((), (), 1, _canonical=True)
GPOLY_ONE = GPoly((1,), (0,), 1, _canonical=True)
GPOLY_X = GPoly((0, 1), (0, 0), 1, _canonical=True)


def gpoly_gcd(a: GPoly, b: GPoly) -> GPoly:
    """Monic gcd over Q(i) (Euclid with monic remainders)."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.degree() < b.degree():
        a, b = b, a
    a, b = a.monic(), b.monic()
    while not b.is_zero():
        if b.degree() == 0:
            return GPOLY_ONE
        a, b = b, (a % b).monic()
    return a


def squarefree_decomposition(p: GPoly) -> list[tuple[GPoly, int]]:
    """Yun's algorithm: monic squarefree factors with multiplicities."""
    if p.degree() <= 0:
        return []
    p = p.monic()
    dp = p.derivative()
    a = gpoly_gcd(p, dp)
    b = p.exact_div(a)
    c = dp.exact_div(a)
    d = c - b.derivative()
    out = []
    k = 1
    while b.degree() > 0:
        a = gpoly_gcd(b, d)
        if a.degree() > 0:
            out.append((a, k))
        b_new = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b_new.derivative()
        b = b_new
        k += 1
    return out


def _term(c: GaussianRational, var: str, k: int) -> str:
    if k == 0:
        return format_gaussian(c)
    mono = var if k == 1 else f"{var}^{k}"
    if c == ONE_Q:
        return mono
    if c == -ONE_Q:
        return "-" + mono
    s = format_gaussian(c)
    if c.re and c.im:
        s = f"({s})"
    return f"{s}*{mono}"


def _join_terms(terms: list[str]) -> str:
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


# --------------------------------------------------------------------------
# K = Q(i)(t)
# --------------------------------------------------------------------------


class FieldScalar:
    """t^v * num/den with num(0) != 0, den(0) = 1, gcd(num, den) = 1.

    The zero element has v = None.
    """

    __slots__ = ("v", "num", "den", "_hash")

    def __init__(self, v, num: GPoly, den: GPoly = GPOLY_ONE, *, _canonical=False):
        if _canonical or v is None:
            self.v, self.num, self.den = v, num, den
        else:
            self.v, self.num, self.den = _canon_scalar(v, num, den)
        self._hash = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls) -> "FieldScalar":
        return FS_ZERO

    @classmethod
    def constant(cls, c) -> "FieldScalar":
        c = GaussianRational.coerce(c)
        if not c:
            return FS_ZERO
        return cls(0, GPoly.constant(c), GPOLY_ONE, _canonical=True)

    @classmethod
    def t_power(cls, k: int, c=1) -> "FieldScalar":
        c = GaussianRational.coerce(c)
        if not c:
            return FS_ZERO
        return cls(k, GPoly.constant(c), GPOLY_ONE, _canonical=True)

    @classmethod
    def from_polys(cls, num: GPoly, den: GPoly = GPOLY_ONE) -> "FieldScalar":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return FS_ZERO
        return cls(0, num, den)

    @classmethod
    def coerce(cls, x) -> "FieldScalar":
        if isinstance(x, FieldScalar):
            return x
        if isinstance(x, str):
            return parse_scalar(x)
        if isinstance(x, GPoly):
            return cls.from_polys(x)
        return cls.constant(x)

    # -- queries -------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.v is None

    def val(self):
        """t-adic valuation; math.inf for zero."""
        return math.inf if self.v is None else self.v

    def is_polynomial(self) -> bool:
        return self.v is None or self.den.is_one()

    def reduce_at_zero(self) -> GaussianRational:
        if self.v is None or self.v > 0:
            return ZERO_Q
        if self.v < 0:
            raise NegativeValuation(f"cannot reduce {self} (valuation {self.v})")
        return self.num.coeff(0)

    def leading_coefficient(self) -> GaussianRational:
        """Coefficient of t^v in the Laurent expansion."""
        if self.v is None:
            return ZERO_Q
        return self.num.coeff(0)

    def numerator_poly(self) -> GPoly:
        """t^v * num as a polynomial (requires v >= 0)."""
        if self.v is None:
            return GPOLY_ZERO
        if self.v < 0:
            raise NegativeValuation("negative valuation has no polynomial numerator")
        return self.num.shift(self.v)

    def evaluate(self, t0: complex) -> complex:
        if self.v is None:
            return 0j
        return (t0 ** self.v) * self.num.evaluate_complex(t0) / self.den.evaluate_complex(t0)

    def evaluate_exact(self, t0) -> GaussianRational:
        t0 = GaussianRational.coerce(t0)
        if self.v is None:
            return ZERO_Q
        return (t0 ** self.v) * self.num(t0) / self.den(t0)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "FieldScalar":
        other = _fs(other)
        if other is NotImplemented:
            return other
        if self.v is None:
            return other
        if other.v is None:
            return self
        a, b = self, other
        if a.v > b.v:
            a, b = b, a
        k = b.v - a.v
        if a.den.is_one() and b.den.is_one():
            s = a.num + b.num.shift(k)
            if s.is_zero():
                return FS_ZERO
            if k > 0:
                return FieldScalar(a.v, s, GPOLY_ONE, _canonical=True)
            o = s.order()
            return FieldScalar(a.v + o, s.shift(-o), GPOLY_ONE, _canonical=True)
        num = a.num * b.den + (b.num * a.den).shift(k)
        if num.is_zero():
            return FS_ZERO
        return FieldScalar(a.v, num, a.den * b.den)

    __radd__ = __add__

    def __neg__(self) -> "FieldScalar":
        if self.v is None:
            return self
        return FieldScalar(self.v, -self.num, self.den, _canonical=True)

    def __sub__(self, other) -> "FieldScalar":
        other = _fs(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "FieldScalar":
        other = _fs(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "FieldScalar":
        other = _fs(other)
        if other is NotImplemented:
            return other
        if self.v is None or other.v is None:
            return FS_ZERO
        if self.den.is_one() and other.den.is_one():
            return FieldScalar(self.v + other.v, self.num * other.num, GPOLY_ONE, _canonical=True)
        g1 = gpoly_gcd(self.num, other.den)
        g2 = gpoly_gcd(other.num, self.den)
        n1, d2 = self.num.exact_div(g1), other.den.exact_div(g1)
        n2, d1 = other.num.exact_div(g2), self.den.exact_div(g2)
        num, den = n1 * n2, d1 * d2
        c = den.coeff(0).inverse()
        return FieldScalar(self.v + other.v, num.scale(c), den.scale(c), _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "FieldScalar":
        if self.v is None:
            raise ZeroDivisionError("inverse of zero in K")
        c = self.num.coeff(0).inverse()
        return FieldScalar(-self.v, self.den.scale(c), self.num.scale(c), _canonical=True)

    def __truediv__(self, other) -> "FieldScalar":
        other = _fs(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "FieldScalar":
        other = _fs(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int) -> "FieldScalar":
        if k < 0:
            return self.inverse() ** (-k)
        out, base = FS_ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "FieldScalar":
        """Multiply by t^k."""
        if self.v is None:
            return self
        return FieldScalar(self.v + k, self.num, self.den, _canonical=True)

    # -- identity --------------------------------------------------------------

    def __eq__(self, other):
        o = _fs(other)
        if o is NotImplemented:
            return False
        return self.v == o.v and self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.v, self.num, self.den))
        return self._hash

    def __bool__(self):
        return self.v is not None

    def __repr__(self):
        return f"FieldScalar({self})"

    def __str__(self):
        return format_scalar(self)


def _fs(x):
    if isinstance(x, FieldScalar):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return FieldScalar.constant(x)
    return NotImplemented


def _canon_scalar(v: int, num: GPoly, den: GPoly):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return None, GPOLY_ZERO, GPOLY_ONE
    on, od = num.order(), den.order()
    num, den = num.shift(-on), den.shift(-od)
    v = v + on - od
    if not den.is_constant():
        g = gpoly_gcd(num, den)
        if g.degree() > 0:
            num, den = num.exact_div(g), den.exact_div(g)
    c = den.coeff(0)
    if c != ONE_Q:
        c = c.inverse()
        num, den = num.scale(c), den.scale(c)
    return v, num, den


FS_ZERO = FieldScalar(None, GPOLY_ZERO, GPOLY_ONE, _canonical=True)
FS_ONE = FieldScalar(0, GPOLY_ONE, GPOLY_ONE, _canonical=True)
FS_T = FieldScalar(1, GPOLY_ONE, GPOLY_ONE, _canonical=True)


def format_scalar(x: FieldScalar) -> str:
    if x.v is None:
        return "0"
    if x.v >= 0:
        num = x.num.shift(x.v).to_string("t")
        if x.den.is_one():
            return num
        return f"({num})/({x.den.to_string('t')})"
    # negative valuation: write t^v * (num)/(den)
    head = f"t^{x.v}"
    body = x.num.to_string("t")
    if x.den.is_one():
        if x.num.degree() == 0:
            c = x.num.coeff(0)
            if c == ONE_Q:
                return head
            s = format_gaussian(c)
            return f"({s})*{head}"
        return f"{head}*({body})"
    return f"{head}*({body})/({x.den.to_string('t')})"


_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|(i)|(\*\*|\^)|([-+*/()]))")


def parse_scalar(s: str) -> FieldScalar:
    """Parse an element of Q(i)(t).

    Grammar: sums, products, quotients and integer powers of integers,
    ``i`` and ``t``; ``^`` and ``**`` both denote powers, e.g.
    ``"t/(1-t)"``, ``"3/2"``, ``"i*t^2"``, ``"(1+2i)*t^-1*(1+t)/(2-t)"``.
    Juxtaposition of a number with ``i`` or ``t`` (``2i``, ``3t``) is accepted.
    """
    toks = []
    pos = 0
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character in {s!r} at {pos}")
        pos = m.end()
        if m.group(1):
            toks.append(("num", int(m.group(1))))
        elif m.group(2):
            toks.append(("t", None))
        elif m.group(3):
            toks.append(("i", None))
        elif m.group(4):
            toks.append(("^", None))
        else:
            toks.append((m.group(5), None))
    p = _Parser(toks, s)
    out = p.expr()
    if p.k != len(toks):
        raise ValueError(f"trailing input in {s!r}")
    return out


class _Parser:
    def __init__(self, toks, src):
        self.toks, self.k, self.src = toks, 0, src

    def peek(self):
        return self.toks[self.k][0] if self.k < len(self.toks) else None

    def take(self, kind=None):
        tok = self.toks[self.k]
        if kind is not None and tok[0] != kind:
            raise ValueError(f"expected {kind!r} in {self.src!r}")
        self.k += 1
        return tok

    def expr(self) -> FieldScalar:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> FieldScalar:
        acc = self.power()
        while True:
            nxt = self.peek()
            if nxt in ("*", "/"):
                op = self.take()[0]
                rhs = self.power()
                acc = acc * rhs if op == "*" else acc / rhs
            elif nxt in ("num", "t", "i", "("):
                acc = acc * self.power()
            else:
                return acc

    def power(self) -> FieldScalar:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() in ("+", "-"):
                sign = -1 if self.take()[0] == "-" else 1
            e = self.take("num")[1] * sign
            return base ** e
        return base

    def atom(self) -> FieldScalar:
        kind, val = self.take()
        if kind == "num":
            return FieldScalar.constant(val)
        if kind == "t":
            return FS_T
        if kind == "i":
            return FieldScalar.constant(I_Q)
        if kind == "(":
            out = self.expr()
            self.take(")")
            return out
        if kind == "-":
            return -self.power()
        raise ValueError(f"unexpected token {kind!r} in {self.src!r}")


# --------------------------------------------------------------------------
# truncated power series
# --------------------------------------------------------------------------


class SeriesTrunc:
    """sum_{k=offset}^{order-1} c_k t^k + O(t^order)."""

    __slots__ = ("coefficients", "offset", "order")

    def __init__(self, coefficients: Sequence, offset: int, order: int):
        cs = [GaussianRational.coerce(c) for c in coefficients]
        cs = cs[: max(0, order - offset)]
        cs += [ZERO_Q] * (order - offset - len(cs))
        self.coefficients = tuple(cs)
        self.offset = offset
        self.order = order

    @classmethod
    def from_scalar(cls, x, order: int) -> "SeriesTrunc":
        x = FieldScalar.coerce(x)
        if x.is_zero():
            return cls([], 0, order)
        n = order - x.v
        if n <= 0:
            return cls([], min(0, order), order)
        inv = _series_inverse(x.den.coeffs(), n)
        num = x.num.coeffs()
        out = [ZERO_Q] * n
        for i, a in enumerate(num[:n]):
            if a:
                for j in range(n - i):
                    out[i + j] = out[i + j] + a * inv[j]
        return cls(out, x.v, order)

    @classmethod
    def constant(cls, c, order: int) -> "SeriesTrunc":
        return cls([c], 0, order)

    def coeff(self, k: int) -> GaussianRational:
        if k >= self.order:
            raise ValueError(f"coefficient t^{k} is beyond the truncation order {self.order}")
        j = k - self.offset
        if j < 0:
            return ZERO_Q
        return self.coefficients[j]

    def valuation(self):
        """First nonzero exponent, or the truncation order if none is known."""
        for j, c in enumerate(self.coefficients):
            if c:
                return self.offset + j
        return self.order

    def reduce_at_zero(self) -> GaussianRational:
        v = self.valuation()
        if v < 0:
            raise NegativeValuation("series has a pole at t = 0")
        return self.coeff(0) if self.order > 0 else ZERO_Q

    def _dense(self, lo: int, hi: int) -> list[GaussianRational]:
        return [self.coeff(k) if self.offset <= k < self.order else ZERO_Q for k in range(lo, hi)]

    def __add__(self, other) -> "SeriesTrunc":
        other = self._coerce(other)
        lo = min(self.offset, other.offset)
        hi = min(self.order, other.order)
        a, b = self._dense(lo, hi), other._dense(lo, hi)
        return SeriesTrunc([x + y for x, y in zip(a, b)], lo, hi)

    __radd__ = __add__

    def __neg__(self):
        return SeriesTrunc([-c for c in self.coefficients], self.offset, self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other) -> "SeriesTrunc":
        other = self._coerce(other)
        va, vb = self.valuation(), other.valuation()
        lo = va + vb
        hi = min(self.order + vb, other.order + va)
        if hi <= lo:
            return SeriesTrunc([], min(lo, hi), hi)
        a = self._dense(va, va + hi - lo)
        b = other._dense(vb, vb + hi - lo)
        out = [ZERO_Q] * (hi - lo)
        for i, x in enumerate(a):
            if x:
                for j in range(hi - lo - i):
                    y = b[j]
                    if y:
                        out[i + j] = out[i + j] + x * y
        return SeriesTrunc(out, lo, hi)

    __rmul__ = __mul__

    def inverse(self) -> "SeriesTrunc":
        v = self.valuation()
        if v >= self.order:
            raise ZeroDivisionError("series is zero to the known precision")
        n = self.order - v
        inv = _series_inverse(self._dense(v, self.order), n)
        return SeriesTrunc(inv, -v, self.order - 2 * v)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def _coerce(self, x) -> "SeriesTrunc":
        if isinstance(x, SeriesTrunc):
            return x
        if isinstance(x, FieldScalar):
            return SeriesTrunc.from_scalar(x, self.order)
        return SeriesTrunc.constant(x, self.order)

    def truncate(self, order: int) -> "SeriesTrunc":
        return SeriesTrunc(self.coefficients, self.offset, min(order, self.order))

    def evaluate(self, t0: complex) -> complex:
        return sum(complex(c) * t0 ** (self.offset + j) for j, c in enumerate(self.coefficients))

    def __eq__(self, other):
        if not isinstance(other, SeriesTrunc) or self.order != other.order:
            return False
        lo = min(self.offset, other.offset)
        return self._dense(lo, self.order) == other._dense(lo, self.order)

    def __repr__(self):
        return f"SeriesTrunc({self} + O(t^{self.order}))"

    def __str__(self):
        terms = [_term(c, "t", self.offset + j) for j, c in enumerate(self.coefficients) if c]
        if any(self.offset + j < 0 for j, c in enumerate(self.coefficients) if c):
            terms = [f"({format_gaussian(c)})*t^{self.offset + j}" for j, c in enumerate(self.coefficients) if c]
        return _join_terms(terms) if terms else "0"


def _series_inverse(cs: Sequence[GaussianRational], n: int) -> list[GaussianRational]:
    """First n coefficients of 1/(c0 + c1 t + ...), c0 != 0."""
    cs = list(cs) + [ZERO_Q] * max(0, n - len(cs))
    inv0 = cs[0].inverse()
    out = [inv0]
    for k in range(1, n):
        acc = ZERO_Q
        for j in range(1, k + 1):
            if cs[j]:
                acc = acc + cs[j] * out[k - j]
        out.append(-acc * inv0)
    return out


def poly_eval_series(F: Sequence[SeriesTrunc], z: SeriesTrunc) -> SeriesTrunc:
    acc = SeriesTrunc([], 0, z.order)
    for c in reversed(F):
        acc = acc * z + c
    return acc


def _poly_derivative(F: Sequence[SeriesTrunc]) -> list[SeriesTrunc]:
    return [F[k] * k for k in range(1, len(F))]


def newton_lift(F: Sequence, seed, order: int) -> SeriesTrunc:
    """Lift a simple root ``seed`` of F(z)|_{t=0} to a series root mod t^(order+1).

    F is a polynomial in z given low-to-high by coefficients in K
    (FieldScalar or parseable strings) or as SeriesTrunc.  Coefficients with
    negative valuation are cleared by a common power of t first.
    """
    prec = order + 1
    coeffs = [_as_series(c, prec) for c in F]
    low = min((c.valuation() for c in coeffs), default=0)
    if low < 0:
        coeffs = [c * SeriesTrunc([1], -low, prec - low) for c in coeffs]
        coeffs = [c.truncate(prec) for c in coeffs]
    seed = GaussianRational.coerce(seed)
    F0 = [c.coeff(0) for c in coeffs]
    f0 = GPoly.from_coeffs(F0)
    if f0.is_zero() or f0(seed):
        raise NoLift(f"{seed} is not a root of the reduced equation")
    df0 = f0.derivative()
    if not df0(seed):
        raise NoLift(f"{seed} is a multiple root of the reduced equation")
    dF = _poly_derivative(coeffs)
    z = SeriesTrunc([seed], 0, prec)
    steps = max(1, math.ceil(math.log2(prec)) + 1)
    for _ in range(steps):
        r = poly_eval_series(coeffs, z)
        if r.valuation() >= prec:
            break
        z = (z - r / poly_eval_series(dF, z)).truncate(prec)
    if poly_eval_series(coeffs, z).valuation() < prec:
        raise NoLift("Newton iteration did not converge")
    return z


def _as_series(c, prec: int) -> SeriesTrunc:
    if isinstance(c, SeriesTrunc):
        return c.truncate(prec)
    return SeriesTrunc.from_scalar(FieldScalar.coerce(c), prec)
