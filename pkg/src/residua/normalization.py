"""Post-composition by Mobius maps over K until the reduction is nonconstant."""

from __future__ import annotations

from dataclasses import dataclass

from .homogeneous import (
    HomPair,
    MobiusK,
    ReducedMap,
    compose,
    mobius_compose,
    normalize_pair,
    precompose_mobius,
    reduce_pair,
    split_reduction,
)
from .scalars import FieldScalar


class IterationCapExceeded(RuntimeError):
    pass


class ConstantFactor(ArithmeticError):
    pass


@dataclass(frozen=True)
class NormalizationResult:
    A: MobiusK
    g: HomPair
    reduced: ReducedMap
    steps: int

    def to_json(self) -> dict:
        return {
            "A": self.A.to_json(),
            "steps": self.steps,
            **self.reduced.to_json(),
        }


def iteration_cap(f: HomPair) -> int:
    # engineering bound only; a breach means a defect, not bad data
    return 4 * (1 + f.res_val) + 4 * f.degree


def make_nonconstant(f: HomPair, cap: int | None = None) -> NormalizationResult:
    if cap is None:
        cap = iteration_cap(f)
    A = MobiusK.identity()
    g = normalize_pair(f)
    steps = 0
    while True:
        red = split_reduction(g)
        if red.deg_phi >= 1:
            return NormalizationResult(A.normalized(), g, red, steps)
        if steps >= cap:
            raise IterationCapExceeded(f"no nonconstant reduction after {steps} steps (cap {cap})")
        P0, Q0 = reduce_pair(g)
        vP, vQ = g.side_valuation(0), g.side_valuation(1)
        if Q0.is_zero():
            B = MobiusK.diag(1, FieldScalar.t_power(vP - vQ))
        elif P0.is_zero():
            B = MobiusK.diag(FieldScalar.t_power(vQ - vP), 1)
        else:
            # P0 = c0 Q0: cancel the coefficient of z^m w^(D-m), m = deg_z Q0
            m = Q0.poly.degree()
            k = g.degree - m
            c = g.P[k] / g.Q[k]
            B = MobiusK(1, -c, 0, 1)
        A = B @ A
        g = normalize_pair(mobius_compose(B, g))
        steps += 1


def composition_factor(A_next: MobiusK, f: HomPair, A_prev: MobiusK) -> ReducedMap:
    """Reduction of A_next o f o A_prev^-1."""
    h = mobius_compose(A_next, precompose_mobius(f, A_prev.inverse()))
    red = split_reduction(normalize_pair(h))
    if red.deg_phi == 0:
        raise ConstantFactor("A_next o f o A_prev^-1 has constant reduction")
    return red


def iterate(f: HomPair, n: int) -> HomPair:
    g = f
    for _ in range(n - 1):
        g = compose(f, g)
    return g
