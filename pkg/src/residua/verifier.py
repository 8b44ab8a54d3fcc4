"""Floating-point cross-checks at small nonzero t.

All floating point in the package lives here.  Points of the Riemann sphere
are complex numbers with ``complex('inf')`` standing for infinity, and every
distance is chordal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forms import chordal
from .homogeneous import HomPair

INF = complex("inf")


class BadParameter(ValueError):
    pass


class RootSolveFailure(ArithmeticError):
    pass


class InconclusiveClustering(RuntimeError):
    pass


@dataclass(frozen=True)
class NumericMap:
    degree: int
    num: np.ndarray  # entries highest-first: coefficient of z^(d-i) w^i
    den: np.ndarray
    t_value: complex
    condition: float  # |Res| / (|P|^d |Q|^d) after scaling

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.empty_like(z)
        fin = np.isfinite(z)
        p = np.polyval(self.num, z[fin])
        q = np.polyval(self.den, z[fin])
        with np.errstate(divide="ignore", invalid="ignore"):
            out[fin] = np.where(q != 0, p / np.where(q != 0, q, 1), INF)
        out[~fin] = self.num[0] / self.den[0] if self.den[0] != 0 else INF
        return out


def _sylvester_det(p: np.ndarray, q: np.ndarray) -> complex:
    d = len(p) - 1
    M = np.zeros((2 * d, 2 * d), dtype=complex)
    for k in range(d):
        M[k, k:k + d + 1] = p
        M[d + k, k:k + d + 1] = q
    return complex(np.linalg.det(M))


def specialize(f: HomPair, t0: complex, threshold: float = 1e-40) -> NumericMap:
    try:
        P, Q = f.evaluate(complex(t0))
    except ZeroDivisionError as exc:
        raise BadParameter(f"t0 = {t0} is a pole of a coefficient") from exc
    P, Q = np.array(P, dtype=complex), np.array(Q, dtype=complex)
    if not (np.all(np.isfinite(P)) and np.all(np.isfinite(Q))):
        raise BadParameter(f"t0 = {t0} is a pole of a coefficient")
    scale = max(np.abs(P).max(), np.abs(Q).max())
    if scale == 0:
        raise BadParameter("both forms vanish at t0")
    P, Q = P / scale, Q / scale
    d = f.degree
    nP, nQ = np.linalg.norm(P), np.linalg.norm(Q)
    if nP == 0 or nQ == 0:
        raise BadParameter("one form vanishes at t0")
    cond = abs(_sylvester_det(P, Q)) / (nP ** d * nQ ** d)
    if cond < threshold:
        raise BadParameter(f"numeric resultant {cond:.3e} below threshold {threshold:.1e}")
    return NumericMap(d, P, Q, complex(t0), cond)


# --------------------------------------------------------------------------
# batched root solving
# --------------------------------------------------------------------------


def _roots_batch(c: np.ndarray) -> np.ndarray:
    """Roots of each row of c (highest-first coefficients), on the sphere.

    Rows whose constant term dominates the leading one are solved in the
    chart u = 1/z, which keeps roots near infinity well conditioned.
    """
    N, m = c.shape
    d = m - 1
    out = np.empty((N, d), dtype=complex)
    use_z = np.abs(c[:, 0]) >= np.abs(c[:, d])
    exact = (c[:, 0] == 0) & (c[:, d] == 0)
    for k in np.nonzero(exact)[0]:
        out[k] = _roots_deflated(c[k])
    for flag in (True, False):
        idx = np.nonzero((use_z == flag) & ~exact)[0]
        if idx.size == 0:
            continue
        cc = c[idx] if flag else c[idx, ::-1]
        lead = cc[:, 0:1]
        if np.any(lead == 0):
            raise RootSolveFailure("vanishing leading coefficient in both charts")
        a = cc[:, 1:] / lead
        comp = np.zeros((idx.size, d, d), dtype=complex)
        comp[:, 0, :] = -a
        if d > 1:
            comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
        r = np.linalg.eigvals(comp)
        r = _newton_polish(cc, r)
        if flag:
            out[idx] = r
        else:
            with np.errstate(divide="ignore"):
                out[idx] = np.where(r == 0, INF, 1.0 / np.where(r == 0, 1, r))
    if not np.all(np.isfinite(out) | np.isinf(out)):
        raise RootSolveFailure("NaN root")
    return out


def _roots_deflated(row: np.ndarray) -> np.ndarray:
    """Roots of one row with exact zeros at both ends (roots at 0 and infinity)."""
    nz = np.nonzero(row)[0]
    if nz.size == 0:
        raise RootSolveFailure("identically zero equation")
    lo, hi = nz[0], nz[-1]
    d = row.size - 1
    mid = np.roots(row[lo:hi + 1]) if hi > lo else np.empty(0, dtype=complex)
    return np.concatenate([np.full(lo, INF), mid.astype(complex), np.zeros(d - hi, dtype=complex)])


def _newton_polish(c: np.ndarray, r: np.ndarray) -> np.ndarray:
    d = c.shape[1] - 1
    val = np.zeros_like(r)
    der = np.zeros_like(r)
    for k in range(d + 1):
        der = der * r + val
        val = val * r + c[:, k:k + 1]
    ok = np.abs(der) > 1e-300
    step = np.where(ok, val / np.where(ok, der, 1), 0)
    # only accept steps that are small relative to the root scale
    small = np.abs(step) < 0.1 * (1 + np.abs(r))
    return np.where(small, r - step, r)


def solve_preimages(g: NumericMap, y: np.ndarray) -> np.ndarray:
    """All d solutions of g(z) = y for each entry of y (shape (N, d))."""
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    fin = np.isfinite(y)
    big = ~fin | (np.abs(np.where(fin, y, 0)) > 1)
    c = np.empty((y.size, g.degree + 1), dtype=complex)
    ys = np.where(big, 0, y)
    c[~big] = g.num[None, :] - ys[~big, None] * g.den[None, :]
    inv = np.where(fin & big, 1 / np.where(fin & big, y, 1), 0)
    c[big] = g.den[None, :] - inv[big, None] * g.num[None, :]
    return _roots_batch(c)


# --------------------------------------------------------------------------
# sampling the maximal measure
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SampleCloud:
    points: np.ndarray
    t_value: complex
    depth: int
    seed: int

    def __len__(self):
        return self.points.size

    def sphere(self) -> np.ndarray:
        """Unit-sphere coordinates (x1, x2, x3) with infinity at the north pole."""
        z = self.points
        fin = np.isfinite(z)
        zf = np.where(fin, z, 0)
        r2 = np.abs(zf) ** 2
        out = np.empty((z.size, 3))
        out[:, 0] = np.where(fin, 2 * zf.real / (1 + r2), 0.0)
        out[:, 1] = np.where(fin, 2 * zf.imag / (1 + r2), 0.0)
        out[:, 2] = np.where(fin, (r2 - 1) / (1 + r2), 1.0)
        return out


def sample_max_measure(g: NumericMap, n_samples: int = 100_000, depth: int = 20, seed: int = 0) -> SampleCloud:
    """Endpoints of random backward orbits of length ``depth``."""
    rng = np.random.default_rng(seed)
    z = np.exp(2j * np.pi * rng.random(n_samples))
    for _ in range(depth):
        roots = solve_preimages(g, z)
        pick = rng.integers(0, g.degree, n_samples)
        z = roots[np.arange(n_samples), pick]
    if np.any(np.isnan(z)):
        raise RootSolveFailure("NaN sample")
    return SampleCloud(z, g.t_value, depth, seed)


def chordal_to(points: np.ndarray, c: complex) -> np.ndarray:
    z = np.asarray(points, dtype=complex)
    fin = np.isfinite(z)
    zf = np.where(fin, z, 0)
    if np.isinf(c):
        return np.where(fin, 2 / np.sqrt(1 + np.abs(zf) ** 2), 0.0)
    num = 2 * np.abs(zf - c)
    den = np.sqrt(1 + np.abs(zf) ** 2) * np.sqrt(1 + abs(c) ** 2)
    return np.where(fin, num / den, 2 / np.sqrt(1 + abs(c) ** 2))


@dataclass(frozen=True)
class MassEstimate:
    masses: tuple[float, ...]
    sigmas: tuple[float, ...]
    diffuse: float
    n: int

    def to_json(self) -> dict:
        return {
            "masses": [round(m, 12) for m in self.masses],
            "sigmas": [round(s, 12) for s in self.sigmas],
            "diffuse": round(self.diffuse, 12),
            "samples": self.n,
        }


def atom_mass_estimate(cloud: SampleCloud, centers, radius: float) -> MassEstimate:
    centers = [complex(c) for c in centers]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if chordal(centers[i], centers[j]) <= 2 * radius:
                raise ValueError("centers must be separated by more than twice the radius")
    n = len(cloud)
    masses, sigmas = [], []
    for c in centers:
        p = float(np.count_nonzero(chordal_to(cloud.points, c) < radius)) / n
        masses.append(p)
        sigmas.append((p * (1 - p) / n) ** 0.5)
    return MassEstimate(tuple(masses), tuple(sigmas), 1.0 - sum(masses), n)


# --------------------------------------------------------------------------
# preimage counting near a point
# --------------------------------------------------------------------------


def preimage_count_check(g: NumericMap, x: complex, loop_radius: float, y: complex, band: float = 0.25) -> int:
    """Number of solutions of g(z) = y in the disk of radius ``loop_radius`` about x.

    The disk is Euclidean in z for finite x and in 1/z for x = infinity.
    Any root within ``band * loop_radius`` of the boundary makes the count
    inconclusive.
    """
    roots = solve_preimages(g, np.array([y]))[0]
    if np.isinf(complex(x)):
        with np.errstate(divide="ignore"):
            dist = np.where(np.isfinite(roots), 1 / np.abs(np.where(roots == 0, 1e-300, roots)), 0.0)
    else:
        dist = np.where(np.isfinite(roots), np.abs(roots - complex(x)), np.inf)
    lo, hi = (1 - band) * loop_radius, (1 + band) * loop_radius
    if np.any((dist > lo) & (dist < hi)):
        raise InconclusiveClustering(f"roots at distances {np.sort(dist)} straddle radius {loop_radius}")
    return int(np.count_nonzero(dist <= lo))
