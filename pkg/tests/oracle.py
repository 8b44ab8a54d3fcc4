"""Independent symbolic recomputation with sympy.

Composes by substitution and normalizes by brute force, sharing no code with
the package.  Slow, so only used for small iterates.
"""

import sympy as sp

z, w, t = sp.symbols("z w t")

FAMILIES = {
    "t_z_plus_inv_z": (t * (z**2 + w**2), z * w),
    "t_z2": (t * z**2, w**2),
    "z2_over_t": (z**2, t * w**2),
    "mobius_quotient": (z**2 - t * w**2, z**2 + t * w**2),
}


def compose(outer, inner):
    P, Q = outer
    p, q = inner
    sub = {z: p, w: q}
    return sp.expand(P.subs(sub, simultaneous=True)), sp.expand(Q.subs(sub, simultaneous=True))


def iterate(f, n):
    F = f
    for _ in range(n - 1):
        F = compose(f, F)
    return F


def _tord(expr):
    num, den = sp.fraction(sp.together(expr))
    o = lambda e: min(m[0] for m in sp.Poly(sp.expand(e), t).monoms())
    return o(num) - o(den)


def _coeffs(F, D):
    pz = sp.Poly(F, z, w)
    return [sp.together(pz.coeff_monomial(z ** (D - i) * w**i)) for i in range(D + 1)]


def _normalize(P, Q, D):
    m = min(_tord(c) for c in _coeffs(P, D) + _coeffs(Q, D) if c != 0)
    return sp.expand(sp.cancel(P / t**m)), sp.expand(sp.cancel(Q / t**m))


def _red(F, D):
    return sp.expand(sum(sp.limit(c, t, 0) * z ** (D - i) * w**i for i, c in enumerate(_coeffs(F, D))))


def reduction(P, Q, D):
    """(H, deg phi) for the normalized, non-constant reduction of (P, Q)."""
    while True:
        P, Q = _normalize(P, Q, D)
        P0, Q0 = _red(P, D), _red(Q, D)
        if P0 == 0 or Q0 == 0:
            mp = min(_tord(c) for c in _coeffs(P, D) if c != 0)
            mq = min(_tord(c) for c in _coeffs(Q, D) if c != 0)
            if P0 == 0:
                Q = sp.expand(Q * t ** (mp - mq))
            else:
                P = sp.expand(P * t ** (mq - mp))
            continue
        H = sp.gcd(P0, Q0)
        ph = sp.cancel(P0 / H)
        dphi = sp.Poly(ph, z, w).total_degree() if ph.free_symbols else 0
        if dphi == 0:
            k = sp.degree(Q0, z)
            c = sp.cancel(_coeffs(P, D)[D - k] / _coeffs(Q, D)[D - k])
            P = sp.expand(sp.cancel(P - c * Q))
            den = sp.denom(sp.together(c))
            P, Q = sp.expand(P * den), sp.expand(Q * den)
            continue
        return H, dphi


def surplus_at(H, point):
    """Order of vanishing of H at a point of P^1 (point = None for infinity)."""
    if point is None:
        Hz = sp.expand(H.subs(z, 1))
        return 0 if Hz == 0 else min(m[0] for m in sp.Poly(Hz, w).monoms())
    h = sp.Poly(sp.expand(H.subs(w, 1)), z)
    k = 0
    while h.degree() > 0 and h.eval(point) == 0:
        h = sp.Poly(sp.quo(h.as_expr(), z - point), z)
        k += 1
    return k
