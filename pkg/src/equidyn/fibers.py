"""Fibers f^{-1}(a), pullback measures, and backward-orbit sampling.

Pullback measures are built by n successive fiber computations (never
by solving one degree-d^n polynomial); degree-2 levels take a
vectorized quadratic-formula fast path. Torus fibers are exact lattice
coset enumerations.

Torus note: the compactified indeterminacy locus of a monomial map
lives on the axes |z_i| in {0, inf}, which the real angle chart never
approaches; the near-indeterminacy guard is therefore vacuously
satisfied for TorusPoint inputs and is recorded as such in experiment
metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AtomBudgetExceeded, ExceptionalStart
from .roots import CLUSTER_TOL, roots_homogeneous
from .sphere import SphereMap, SpherePoint, chordal_distance
from .torus import TorusMap, TorusPoint, lattice_solutions

#: starting points within this chordal distance of E are refused
EXCEPTIONAL_START_TOL = 1e-8


@dataclass(frozen=True)
class FiberPoint:
    point: object  # SpherePoint | TorusPoint
    multiplicity: int


class AtomicMeasure:
    """Finite weighted point set on the sphere or torus.

    ``points`` is (N, 2): normalized homogeneous complex pairs for the
    sphere, angle pairs for the torus. Probability measures (pullbacks,
    equilibrium samples) satisfy mass == 1 within 1e-9; periodic-point
    measures may carry mass < 1, which is meaningful and reported.
    """

    __slots__ = ("space", "points", "weights")

    def __init__(self, space: str, points: np.ndarray, weights: np.ndarray):
        if space not in ("sphere", "torus"):
            raise ValueError(f"unknown space {space!r}")
        dtype = np.complex128 if space == "sphere" else np.float64
        points = np.ascontiguousarray(points, dtype=dtype).reshape(-1, 2)
        weights = np.ascontiguousarray(weights, dtype=np.float64).reshape(-1)
        if len(points) != len(weights):
            raise ValueError("points and weights length mismatch")
        if len(weights) and weights.min() <= 0:
            raise ValueError("atom weights must be positive")
        order = self._canonical_order(space, points)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "points", points[order])
        object.__setattr__(self, "weights", weights[order])

    def __setattr__(self, name, value):
        raise AttributeError("AtomicMeasure is immutable")

    @staticmethod
    def _canonical_order(space, points):
        if space == "torus":
            return np.lexsort((points[:, 1], points[:, 0]))
        aff = _affine_coords(points)
        is_inf = ~np.isfinite(aff.real)
        re = np.where(is_inf, 0.0, aff.real)
        im = np.where(is_inf, 0.0, aff.imag)
        return np.lexsort((im, re, is_inf.astype(np.int8)))

    def __len__(self):
        return len(self.weights)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def require_probability(self):
        if abs(self.mass - 1.0) > 1e-9:
            raise ValueError(f"measure mass {self.mass} is not 1 within 1e-9")
        return self

    def affine(self) -> np.ndarray:
        """Sphere atoms as affine complex numbers (inf for [1:0])."""
        if self.space != "sphere":
            raise ValueError("affine() only applies to sphere measures")
        return _affine_coords(self.points)

    def sphere_points(self) -> list[SpherePoint]:
        return [SpherePoint(z0, z1) for z0, z1 in self.points]

    def torus_points(self) -> list[TorusPoint]:
        return [TorusPoint(t1, t2) for t1, t2 in self.points]

    def rows(self):
        """(re, im, weight) or (theta1, theta2, weight) per atom."""
        if self.space == "sphere":
            aff = self.affine()
            return [(float(z.real), float(z.imag), float(w))
                    for z, w in zip(aff, self.weights)]
        return [(float(t1), float(t2), float(w))
                for (t1, t2), w in zip(self.points, self.weights)]

    @classmethod
    def from_sphere_points(cls, points, weights) -> "AtomicMeasure":
        arr = np.array([[pt.z0, pt.z1] for pt in points], dtype=np.complex128)
        return cls("sphere", arr.reshape(-1, 2), weights)

    @classmethod
    def from_torus_points(cls, points, weights) -> "AtomicMeasure":
        arr = np.array([[pt.theta1, pt.theta2] for pt in points],
                       dtype=np.float64)
        return cls("torus", arr.reshape(-1, 2), weights)


def _affine_coords(points: np.ndarray) -> np.ndarray:
    z0, z1 = points[:, 0], points[:, 1]
    out = np.full(len(points), complex(math.inf, 0.0), dtype=np.complex128)
    finite = z1 != 0
    out[finite] = z0[finite] / z1[finite]
    return out


# ---------------------------------------------------------------------------
# fibers
# ---------------------------------------------------------------------------


def fiber_sphere(f: SphereMap, a: SpherePoint) -> list[FiberPoint]:
    """All d solutions of f(x) = a, clustered with multiplicity."""
    coeffs = a.z1 * f.p - a.z0 * f.q
    clustered = roots_homogeneous(coeffs)
    return [FiberPoint(pt, mult) for pt, mult in clustered]


def fiber_torus(f: TorusMap, a: TorusPoint) -> list[FiberPoint]:
    """The |det A| solutions of A theta = a (mod 2 pi), multiplicity 1."""
    sols = lattice_solutions(f.matrix, a.angles())
    return [FiberPoint(TorusPoint(t1, t2), 1) for t1, t2 in sols]


def _quad_roots_batch(c0, c1, c2):
    """Stable quadratic roots per row; returns (r1, r2, ok_mask)."""
    disc = c1 * c1 - 4.0 * c2 * c0
    sq = np.sqrt(disc)
    flip = np.real(np.conj(c1) * sq) < 0
    sq = np.where(flip, -sq, sq)
    u = -(c1 + sq) / 2.0
    sup = np.maximum(np.maximum(np.abs(c0), np.abs(c1)), np.abs(c2))
    ok = (np.abs(c2) > 1e-12 * sup) & np.isfinite(sup) & (sup > 0)
    safe_c2 = np.where(ok, c2, 1.0)
    r1 = u / safe_c2
    zero_u = u == 0
    safe_u = np.where(zero_u, 1.0, u)
    r2 = np.where(zero_u, 0.0, c0 / safe_u)  # u == 0 forces c0 == 0 here
    ok &= np.isfinite(r1) & np.isfinite(r2)
    return r1, r2, ok


def _pullback_level_sphere(f: SphereMap, points: np.ndarray,
                           mults: np.ndarray):
    """One backward step: fiber of every atom, multiplicities multiplied."""
    d = f.degree
    coeffs = points[:, 1:2] * f.p[None, :] - points[:, 0:1] * f.q[None, :]
    new_pts = []
    new_mults = []
    slow = np.zeros(len(points), dtype=bool)
    if d == 2:
        r1, r2, ok = _quad_roots_batch(coeffs[:, 0], coeffs[:, 1],
                                       coeffs[:, 2])
        slow = ~ok
        idx = np.nonzero(ok)[0]
        if len(idx):
            a1, a2 = r1[idx], r2[idx]
            dd = np.abs(a1 - a2) / np.sqrt(
                (1.0 + np.abs(a1) ** 2) * (1.0 + np.abs(a2) ** 2))
            double = dd < CLUSTER_TOL
            for k, i in enumerate(idx):
                if double[k]:
                    mid = 0.5 * (a1[k] + a2[k])
                    new_pts.append((mid, 1.0))
                    new_mults.append(2 * mults[i])
                else:
                    new_pts.append((a1[k], 1.0))
                    new_mults.append(mults[i])
                    new_pts.append((a2[k], 1.0))
                    new_mults.append(mults[i])
    else:
        slow[:] = True
    for i in np.nonzero(slow)[0]:
        for fp in fiber_sphere(f, SpherePoint(points[i, 0], points[i, 1])):
            new_pts.append((fp.point.z0, fp.point.z1))
            new_mults.append(fp.multiplicity * mults[i])
    pts = np.array(new_pts, dtype=np.complex128)
    # renormalize pairs: larger component to exactly 1
    z0, z1 = pts[:, 0], pts[:, 1]
    use_aff = np.abs(z1) >= np.abs(z0)
    denom = np.where(use_aff, z1, z0)
    pts = pts / denom[:, None]
    pts[use_aff, 1] = 1.0
    pts[~use_aff, 0] = 1.0
    return pts, np.array(new_mults, dtype=np.int64)


def pullback_measure(f, a, n: int, atom_budget: int = 10 ** 6
                     ) -> AtomicMeasure:
    """mu_n^a = d_t^{-n} (f^n)^* delta_a, built by n fiber steps."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if isinstance(f, TorusMap):
        return _pullback_torus(f, a, n, atom_budget)
    d_t = f.degree
    if d_t ** n > atom_budget:
        raise AtomBudgetExceeded(
            f"{d_t}**{n} atoms exceed budget {atom_budget}")
    points = np.array([[a.z0, a.z1]], dtype=np.complex128)
    mults = np.array([1], dtype=np.int64)
    for _ in range(n):
        points, mults = _pullback_level_sphere(f, points, mults)
    weights = mults.astype(np.float64) / float(d_t) ** n
    return AtomicMeasure("sphere", points, weights).require_probability()


def _pullback_torus(f: TorusMap, a: TorusPoint, n: int,
                    atom_budget: int) -> AtomicMeasure:
    d_t = abs(f.det)
    if d_t ** n > atom_budget:
        raise AtomBudgetExceeded(
            f"{d_t}**{n} atoms exceed budget {atom_budget}")
    pts = np.array([a.angles()], dtype=np.float64)
    for _ in range(n):
        nxt = [lattice_solutions(f.matrix, (t1, t2)) for t1, t2 in pts]
        pts = np.concatenate(nxt, axis=0)
    weights = np.full(len(pts), 1.0 / float(d_t) ** n)
    return AtomicMeasure("torus", pts, weights).require_probability()


# ---------------------------------------------------------------------------
# backward-orbit sampling of the equilibrium measure
# ---------------------------------------------------------------------------


def _quad_roots_scalar(c0: complex, c1: complex, c2: complex):
    r1, r2, ok = _quad_roots_batch(np.array([c0]), np.array([c1]),
                                   np.array([c2]))
    if not ok[0]:
        return None
    return complex(r1[0]), complex(r2[0])


def sample_equilibrium(f, a, burn_in: int, count: int, seed: int
                       ) -> AtomicMeasure:
    """Monte Carlo backward orbit: one fiber point per step, chosen with
    probability proportional to multiplicity; deterministic in seed."""
    if count < 1:
        raise ValueError("count must be >= 1 (the empty measure is not a "
                         "probability measure)")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    rng = np.random.default_rng(seed)
    if isinstance(f, TorusMap):
        return _sample_torus(f, a, burn_in, count, rng)
    return _sample_sphere(f, a, burn_in, count, rng)


def _sample_sphere(f: SphereMap, a: SpherePoint, burn_in, count, rng):
    from .exceptional import find_exceptional  # cycle: exceptional uses fibers

    exc = find_exceptional(f)
    for e in exc.points:
        if chordal_distance(a, e) <= EXCEPTIONAL_START_TOL:
            raise ExceptionalStart(
                f"start {a!r} lies in the detected exceptional set")
    d = f.degree
    current = a
    samples = np.empty((count, 2), dtype=np.complex128)
    for step in range(burn_in + count):
        fast = None
        if d == 2:
            c = current.z1 * f.p - current.z0 * f.q
            fast = _quad_roots_scalar(c[0], c[1], c[2])
        if fast is not None:
            pick = rng.random()
            z = fast[0] if pick < 0.5 else fast[1]
            current = SpherePoint(z, 1.0) if abs(z) <= 1.0 \
                else SpherePoint(1.0, 1.0 / z)
        else:
            fiber = fiber_sphere(f, current)
            probs = np.array([fp.multiplicity for fp in fiber],
                             dtype=np.float64) / d
            k = rng.choice(len(fiber), p=probs)
            current = fiber[k].point
        if step >= burn_in:
            samples[step - burn_in] = (current.z0, current.z1)
    weights = np.full(count, 1.0 / count)
    return AtomicMeasure("sphere", samples, weights).require_probability()


def _sample_torus(f: TorusMap, a: TorusPoint, burn_in, count, rng):
    current = np.array(a.angles(), dtype=np.float64)
    d = abs(f.det)
    samples = np.empty((count, 2), dtype=np.float64)
    for step in range(burn_in + count):
        sols = lattice_solutions(f.matrix, (current[0], current[1]))
        current = sols[rng.integers(d)]
        if step >= burn_in:
            samples[step - burn_in] = current
    weights = np.full(count, 1.0 / count)
    return AtomicMeasure("torus", samples, weights).require_probability()
