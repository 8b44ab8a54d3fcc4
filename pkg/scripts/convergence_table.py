"""Sampled atom masses of the maximal measure at shrinking t, next to the
certified lower bounds of the residual measure.

    python3 scripts/convergence_table.py families/t_z_plus_inv_z.json
"""

import argparse
from fractions import Fraction

from residua.config import FamilySpec
from residua.residual import residual_measure
from residua.verifier import atom_mass_estimate, sample_max_measure, specialize


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("family")
    ap.add_argument("--t", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--depth", type=int, default=20)
    ap.add_argument("--radius", type=float, default=0.2)
    ap.add_argument("--eps", type=Fraction, default=Fraction(1, 100))
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    f = FamilySpec.load(args.family).to_pair()
    mu, _ = residual_measure(f, args.eps, args.max_n)
    labels = [a.location.label() if a.location.is_rational or a.location.is_infinity else f"{a.location.approx:.3f}" for a in mu.atoms]
    centers = [complex("inf") if a.location.is_infinity else a.location.approx for a in mu.atoms]
    print(f"branch {mu.branch}, slack {mu.slack}")
    print(f"{'t':>8}  " + "  ".join(f"{lab:>14}" for lab in labels))
    print(f"{'bound':>8}  " + "  ".join(f"{float(a.mass_lower):>14.4f}" for a in mu.atoms))
    for t0 in args.t:
        g = specialize(f, t0)
        cloud = sample_max_measure(g, args.samples, args.depth, args.seed)
        est = atom_mass_estimate(cloud, centers, args.radius)
        cells = [f"{m:.4f}+-{2 * s:.4f}" for m, s in zip(est.masses, est.sigmas)]
        print(f"{t0:>8.0e}  " + "  ".join(f"{c:>14}" for c in cells))


if __name__ == "__main__":
    main()
