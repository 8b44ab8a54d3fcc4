"""Print deg phi_n, deg H_n and the surplus profile of f^n for a family.

    python3 scripts/profile_table.py families/t_z_plus_inv_z.json --max-n 6
"""

import argparse
from fractions import Fraction

from residua.config import FamilySpec
from residua.residual import iterate_profile


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("family")
    ap.add_argument("--max-n", type=int, default=5)
    args = ap.parse_args()

    fam = FamilySpec.load(args.family)
    report = iterate_profile(fam.to_pair(), args.max_n)
    d = report.d
    print(f"# {fam.label or args.family}")
    print(f"{'n':>2} {'deg phi':>8} {'deg H':>6} {'factor':>6}  surplus s(x)/d^n")
    for n in range(1, len(report) + 1):
        step = report[n]
        prof = step.profile
        cells = ", ".join(
            f"{x.label()}: {Fraction(prof.s(x), d**n)}" for x in prof.points() if prof.s(x)
        )
        fac = "-" if step.factor_deg is None else str(step.factor_deg)
        print(f"{n:>2} {step.reduced.deg_phi:>8} {step.reduced.H.degree:>6} {fac:>6}  {cells or '(none)'}")


if __name__ == "__main__":
    main()
