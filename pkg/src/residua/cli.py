"""Command-line entry point: ``residua <command> <family.json> [options]``.

Exit codes: 0 success, 2 invalid family, 3 non-degenerate family,
4 budget exceeded or partial result, 5 exceptional ambiguity.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import FamilySpec, RunConfig, VerifyConfig
from .forms import INFINITY, parse_point
from .gamma import GammaMeasure, check_fixed
from .homogeneous import DegenerateComposite, InvalidPair
from .multiplicities import AtomicMeasure, _q, mult_profile, paired_pullback
from .normalization import IterationCapExceeded, iterate, iteration_cap, make_nonconstant
from .residual import (
    Budget,
    ExceptionalAmbiguity,
    IterationReport,
    NonDegenerate,
    ResidualMeasure,
    UncertifiedExceptional,
    detect_exceptional,
    iterate_profile,
    red_star,
    residual_measure,
)
from .verifier import atom_mass_estimate, sample_max_measure, specialize

EXIT_OK, EXIT_INVALID, EXIT_NONDEGENERATE, EXIT_BUDGET, EXIT_AMBIGUOUS = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_reduce(fam: FamilySpec, cfg: RunConfig, args) -> tuple[dict, int]:
    f = fam.to_pair()
    g = iterate(f, args.iterate)
    r = make_nonconstant(g)
    return {
        "family": fam.to_json(),
        "n": args.iterate,
        "degree": g.degree,
        "resultant_valuation": g.res_val,
        "iteration_cap": iteration_cap(g),
        **r.to_json(),
    }, EXIT_OK


def cmd_surplus(fam: FamilySpec, cfg: RunConfig, args) -> tuple[dict, int]:
    f = fam.to_pair()
    report = iterate_profile(f, args.n, cfg.degree_ceiling)
    prof = report[args.n].profile
    return {"family": fam.to_json(), "n": args.n, **prof.to_json(), "report": report.to_json()}, EXIT_OK


def _residual(fam: FamilySpec, cfg: RunConfig) -> tuple[ResidualMeasure, IterationReport]:
    return residual_measure(
        fam.to_pair(), cfg.eps, cfg.max_n, window=cfg.exceptional_window, ceiling=cfg.degree_ceiling
    )


def cmd_residual(fam: FamilySpec, cfg: RunConfig, args) -> tuple[dict, int]:
    mu, report = _residual(fam, cfg)
    out = {"family": fam.to_json(), "config": cfg.to_json(), **mu.to_json(), "report": report.to_json()}
    if args.plot_data:
        _write_atoms_csv(args.plot_data, mu)
    return out, EXIT_BUDGET if mu.partial else EXIT_OK


def cmd_exceptional(fam: FamilySpec, cfg: RunConfig, args) -> tuple[dict, int]:
    f = fam.to_pair()
    try:
        orbit = detect_exceptional(f, cfg.exceptional_window)
        status = "certified" if orbit is not None else "none"
    except UncertifiedExceptional as exc:
        orbit, status = None, f"uncertified: {exc}"
    return {"family": fam.to_json(), "status": status, "orbit": orbit.to_json() if orbit else None}, EXIT_OK


def _centers(mu: ResidualMeasure):
    return [complex("inf") if a.location.is_infinity else a.location.approx for a in mu.atoms]


def cmd_verify(fam: FamilySpec, cfg: RunConfig, args) -> tuple[dict, int]:
    f = fam.to_pair()
    if args.against:
        mu = ResidualMeasure.from_json(json.loads(Path(args.against).read_text()))
    else:
        mu, _ = _residual(fam, cfg)
    v = cfg.verify
    g = specialize(f, v.t)
    cloud = sample_max_measure(g, v.samples, v.depth, v.seed)
    est = atom_mass_estimate(cloud, _centers(mu), v.radius)
    atoms = []
    for a, m, s in zip(mu.atoms, est.masses, est.sigmas):
        atoms.append({
            "point": a.location.label(),
            "certified_lower": _q(a.mass_lower),
            "estimate": round(m, 12),
            "sigma": round(s, 12),
            "delta": round(m - float(a.mass_lower), 12),
        })
    if args.plot_data:
        _write_samples_csv(args.plot_data, cloud.points)
    return {
        "family": fam.to_json(),
        "t": v.t,
        "samples": v.samples,
        "depth": v.depth,
        "seed": v.seed,
        "radius": v.radius,
        "atoms": atoms,
        "diffuse": round(est.diffuse, 12),
    }, EXIT_OK


def _parse_atomic(text: str | None) -> AtomicMeasure:
    """'0=1/2,inf=1/2' or a path to a JSON measure; 'diffuse=...' is accepted."""
    if text is None:
        return AtomicMeasure({}, 1)
    p = Path(text)
    if p.exists():
        return AtomicMeasure.from_json(json.loads(p.read_text()))
    atoms, diffuse = {}, Fraction(0)
    for part in text.split(","):
        key, _, val = part.partition("=")
        if key.strip() == "diffuse":
            diffuse += Fraction(val.strip())
        else:
            x = parse_point(key)
            atoms[x] = atoms.get(x, Fraction(0)) + Fraction(val.strip())
    return AtomicMeasure(atoms, diffuse)


def cmd_paired_pullback(fam: FamilySpec, cfg: RunConfig, args) -> tuple[dict, int]:
    f = fam.to_pair()
    r = make_nonconstant(iterate(f, args.n))
    mu_E = _parse_atomic(args.mu_E)
    mu_C = _parse_atomic(args.mu_C) if args.mu_C else mu_E
    out = paired_pullback(r.reduced, mu_C, mu_E)
    return {
        "family": fam.to_json(),
        "n": args.n,
        "reduction": r.reduced.to_json(),
        "mu_E": mu_E.to_json(),
        "pullback": out.to_json(),
        "total": _q(out.total),
    }, EXIT_OK


def cmd_check_fixed(fam: FamilySpec, cfg: RunConfig, args) -> tuple[dict, int]:
    f = fam.to_pair()
    if args.measure:
        nu = GammaMeasure.from_json(json.loads(Path(args.measure).read_text()))
        source = "measure"
    else:
        if args.against:
            mu = ResidualMeasure.from_json(json.loads(Path(args.against).read_text()))
        else:
            mu, _ = _residual(fam, cfg)
        nu = red_star(mu)
        source = f"residual ({mu.branch})"
    ns = range(1, args.n + 1) if args.all else [args.n]
    checks = [check_fixed(f, nu, n).to_json() for n in ns]
    return {"family": fam.to_json(), "source": source, "measure": nu.to_json(), "checks": checks,
            "passed": all(c["passed"] for c in checks)}, EXIT_OK


# --------------------------------------------------------------------------
# plot data
# --------------------------------------------------------------------------


def _write_atoms_csv(path: str, mu: ResidualMeasure) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["point", "re", "im", "at_infinity", "mass_lower"])
        for a in mu.atoms:
            x = a.location
            re_, im_ = ("", "") if x.is_infinity else (f"{x.approx.real:.12g}", f"{x.approx.imag:.12g}")
            w.writerow([x.label(), re_, im_, int(x.is_infinity), _q(a.mass_lower)])


def _write_samples_csv(path: str, pts: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im", "at_infinity"])
        for z in pts:
            if np.isfinite(z):
                w.writerow([f"{z.real:.12g}", f"{z.imag:.12g}", 0])
            else:
                w.writerow(["", "", 1])


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


COMMANDS = {
    "reduce": cmd_reduce,
    "surplus": cmd_surplus,
    "residual": cmd_residual,
    "exceptional": cmd_exceptional,
    "verify": cmd_verify,
    "paired-pullback": cmd_paired_pullback,
    "check-fixed": cmd_check_fixed,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="residua", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("family", help="family JSON: {degree, numerator, denominator}")
        p.add_argument("--eps", default="1/100", help="target slack for the generic branch")
        p.add_argument("--max-n", type=int, default=6)
        p.add_argument("--degree-ceiling", type=int, default=None)
        p.add_argument("--window", type=int, default=3, help="consecutive full-degree factors required")
        p.add_argument("--json", action="store_true", default=True, help="JSON output (always on)")
        return p

    p = common(sub.add_parser("reduce", help="normalizer A, reduction phi and gcd H of f^n"))
    p.add_argument("--iterate", type=int, default=1)
    p = common(sub.add_parser("surplus", help="multiplicity profile of f^N"))
    p.add_argument("--n", type=int, required=True)
    p = common(sub.add_parser("residual", help="certified residual measure"))
    p.add_argument("--plot-data", help="write atoms as CSV to this path")
    common(sub.add_parser("exceptional", help="certified exceptional orbit, if any"))
    p = common(sub.add_parser("verify", help="compare against sampled measures at small t"))
    p.add_argument("--t", type=float, default=VerifyConfig.t)
    p.add_argument("--samples", type=int, default=VerifyConfig.samples)
    p.add_argument("--depth", type=int, default=VerifyConfig.depth)
    p.add_argument("--seed", type=int, default=VerifyConfig.seed)
    p.add_argument("--radius", type=float, default=VerifyConfig.radius)
    p.add_argument("--against", help="residual JSON produced by 'residua residual'")
    p.add_argument("--plot-data", help="write samples as CSV to this path")
    p = common(sub.add_parser("paired-pullback", help="phi^* mu_E + sum s(x) delta_x for f^n"))
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--mu-E", dest="mu_E", help="'0=1/2,inf=1/2', 'diffuse=1', or a JSON path")
    p.add_argument("--mu-C", dest="mu_C", help="same syntax; defaults to mu_E")
    p = common(sub.add_parser("check-fixed", help="fixed-point identity for a measure at iterate n"))
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--all", action="store_true", help="check every iterate 1..n")
    p.add_argument("--measure", help="Gamma-measure JSON (default: red_star of the residual measure)")
    p.add_argument("--against", help="residual JSON to use instead of recomputing")
    return ap


def run(argv=None) -> tuple[str, int]:
    args = build_parser().parse_args(argv)
    try:
        fam = FamilySpec.load(args.family)
        verify = VerifyConfig(
            getattr(args, "t", VerifyConfig.t),
            getattr(args, "samples", VerifyConfig.samples),
            getattr(args, "depth", VerifyConfig.depth),
            getattr(args, "seed", VerifyConfig.seed),
            getattr(args, "radius", VerifyConfig.radius),
        )
        cfg = RunConfig(Fraction(args.eps), args.max_n, args.degree_ceiling, args.window, verify)
    except (OSError, KeyError, ValueError) as exc:
        return dumps({"error": f"invalid family or configuration: {exc}"}), EXIT_INVALID
    try:
        out, code = COMMANDS[args.command](fam, cfg, args)
    except (InvalidPair, DegenerateComposite) as exc:
        return dumps({"error": f"invalid family: {exc}"}), EXIT_INVALID
    except NonDegenerate as exc:
        return dumps({"error": f"non-degenerate family: {exc}"}), EXIT_NONDEGENERATE
    except (Budget, IterationCapExceeded) as exc:
        return dumps({"error": f"budget exceeded: {exc}"}), EXIT_BUDGET
    except ExceptionalAmbiguity as exc:
        return dumps({"error": f"exceptional ambiguity: {exc}"}), EXIT_AMBIGUOUS
    return dumps(out), code


def main(argv=None) -> int:
    text, code = run(argv)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
