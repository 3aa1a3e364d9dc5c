"""Periodic points: algebraic enumeration, branch-based construction,
exact torus lattice counts, and the associated empirical measures."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import lattice_bin_counts
from .branches import track_branches
from .errors import (AtomBudgetExceeded, DegeneratePeriod,
                     DegreeBudgetExceeded, NoBranchSurvived, SolverDiverged)
from .fibers import AtomicMeasure, sample_equilibrium
from .roots import CLUSTER_TOL, cluster_points
from .sphere import (SphereMap, SpherePoint, chordal_distance, multiplier)
from .torus import (TorusMap, TorusPoint, coset_offsets, mat_det,
                    mat_pow, lattice_solutions)

#: repelling requires min eigen-modulus > 1 + this; +-tol of 1 is indifferent
CLASSIFICATION_TOL = 1e-6
#: moduli below this count as superattracting (exactly critical cycles)
SUPERATTRACTING_TOL = 1e-9
#: chordal radius of the support-membership test
ON_SUPPORT_RADIUS = 0.02
ON_SUPPORT_SAMPLES = 10_000
#: default cap for d**n + 1 in the algebraic route
ALGEBRAIC_DEGREE_BUDGET = 5000
#: default cap for enumerated torus periodic points
TORUS_POINT_BUDGET = 2_000_000

DEDUP_TOL = 1e-6


@dataclass(frozen=True)
class PeriodicPoint:
    point: object  # SpherePoint | TorusPoint
    period: int
    multiplicity: int
    multiplier_eigenvalues: tuple[complex, ...]
    classification: str  # repelling | attracting | indifferent | superattracting
    on_support: bool

    @property
    def min_modulus(self) -> float:
        return min(abs(e) for e in self.multiplier_eigenvalues)


def classify(eigenvalues) -> str:
    lo = min(abs(e) for e in eigenvalues)
    if lo > 1.0 + CLASSIFICATION_TOL:
        return "repelling"
    if lo >= 1.0 - CLASSIFICATION_TOL:
        return "indifferent"
    if lo < SUPERATTRACTING_TOL:
        return "superattracting"
    return "attracting"


@functools.lru_cache(maxsize=32)
def support_sampler(f: SphereMap, seed: int = 947,
                    count: int = ON_SUPPORT_SAMPLES):
    """Callable testing chordal proximity to a sampled equilibrium measure."""
    start = SpherePoint.affine(0.41 + 0.23j)
    mu = sample_equilibrium(f, start, burn_in=100, count=count, seed=seed)
    pts = mu.points

    def on_support(x: SpherePoint) -> bool:
        cross = np.abs(x.z0 * pts[:, 1] - x.z1 * pts[:, 0])
        nx = math.hypot(abs(x.z0), abs(x.z1))
        ns = np.hypot(np.abs(pts[:, 0]), np.abs(pts[:, 1]))
        return bool((cross / (nx * ns) <= ON_SUPPORT_RADIUS).any())

    return on_support


def periodic_algebraic(f: SphereMap, n: int,
                       degree_budget: int = ALGEBRAIC_DEGREE_BUDGET,
                       support_seed: int = 947) -> list[PeriodicPoint]:
    """All period-n points: the d**n + 1 roots of p_n z1 - q_n z0.

    The resultant form is solved by simultaneous iteration, but its
    values and derivatives come from a rescaled pointwise recursion of
    the homogeneous pair rather than from expanded coefficients: the
    monomial coefficients of high iterates span too many orders of
    magnitude to hold the fixed-point term in double precision (for
    interval-type maps the spread reaches ~1e13 by d**n = 64). Total
    multiplicity is d**n + 1 exactly; each distinct point is classified
    through the chain-rule multiplier of f^n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if f.degree ** n + 1 > degree_budget:
        raise DegreeBudgetExceeded(
            f"{f.degree}**{n} + 1 exceeds degree budget {degree_budget}")
    clustered = fixed_point_roots(f, n)
    on_support = support_sampler(f, seed=support_seed)
    out = []
    for pt, mult in clustered:
        pt = _polish_against_dynamics(f, pt, n, mult)
        lam = multiplier(f, pt, n)
        out.append(PeriodicPoint(
            point=pt, period=n, multiplicity=mult,
            multiplier_eigenvalues=(lam,),
            classification=classify((lam,)),
            on_support=on_support(pt)))
    assert sum(p.multiplicity for p in out) == f.degree ** n + 1
    return out


# ---------------------------------------------------------------------------
# oracle-evaluated root solve for the fixed-point form
# ---------------------------------------------------------------------------


def _homogeneous_eval_partials(c: np.ndarray, p: np.ndarray, q: np.ndarray):
    """Value and both partials of sum_j c_j p^j q^(d-j), |p|,|q| <= 1."""
    d = len(c) - 1
    p_pow = [np.ones_like(p)]
    q_pow = [np.ones_like(q)]
    for _ in range(d):
        p_pow.append(p_pow[-1] * p)
        q_pow.append(q_pow[-1] * q)
    val = np.zeros_like(p)
    dvp = np.zeros_like(p)
    dvq = np.zeros_like(p)
    for j in range(d + 1):
        cj = c[j]
        if cj == 0:
            continue
        val += cj * p_pow[j] * q_pow[d - j]
        if j >= 1:
            dvp += cj * j * p_pow[j - 1] * q_pow[d - j]
        if d - j >= 1:
            dvq += cj * (d - j) * p_pow[j] * q_pow[d - j - 1]
    return val, dvp, dvq


def _iterate_pair_values(f: SphereMap, n: int, z0, z1, dz0, dz1):
    """(p_n, q_n) and their chart derivatives at the given pairs, all up
    to one positive rescale per point; also the log of that rescale."""
    p = np.array(z0, dtype=np.complex128, copy=True)
    q = np.array(z1, dtype=np.complex128, copy=True)
    dp = np.full_like(p, complex(dz0))
    dq = np.full_like(p, complex(dz1))
    log_scale = np.zeros(p.shape, dtype=np.float64)
    for _ in range(n):
        a, ap, aq = _homogeneous_eval_partials(f.p, p, q)
        b, bp, bq = _homogeneous_eval_partials(f.q, p, q)
        da = ap * dp + aq * dq
        db = bp * dp + bq * dq
        p, q, dp, dq = a, b, da, db
        s = np.maximum(np.abs(p), np.abs(q))
        s = np.where(s == 0, 1.0, s)
        p /= s
        q /= s
        dp /= s
        dq /= s
        log_scale += np.log(s)
    return p, q, dp, dq, log_scale


def _phi_newton_steps(f: SphereMap, n: int, z: np.ndarray) -> np.ndarray:
    """Newton corrections Phi/Phi' for the fixed-point form at affine
    estimates z, evaluated in the chart adapted to each point."""
    out = np.empty_like(z)
    inner = np.abs(z) <= 1.0
    if inner.any():
        t = z[inner]
        p, q, dp, dq, _ = _iterate_pair_values(f, n, t, np.ones_like(t),
                                               1.0, 0.0)
        phi = p - q * t
        dphi = dp - q - dq * t
        dphi = np.where(dphi == 0, 1e-300, dphi)
        out[inner] = phi / dphi
    outer = ~inner
    if outer.any():
        zo = z[outer]
        u = 1.0 / zo
        p, q, dp, dq, _ = _iterate_pair_values(f, n, np.ones_like(u), u,
                                               0.0, 1.0)
        big_d = f.degree ** n + 1
        t_val = p * u - q
        t_der = dp * u + p - dq
        # phi/phi' in the z chart: T / (u (D T - u T')), from
        # phi(z) = u^D T(u) with u = 1/z
        denom = u * (big_d * t_val - u * t_der)
        denom = np.where(denom == 0, 1e-300, denom)
        out[outer] = t_val / denom
    return out


def _infinity_multiplicity(f: SphereMap, n: int) -> int:
    """Order of vanishing of the fixed-point form at [1:0], capped at 3."""
    one = np.ones(1, dtype=np.complex128)
    zero = np.zeros(1, dtype=np.complex128)
    p, q, dp, dq, _ = _iterate_pair_values(f, n, one, zero, 0.0, 1.0)
    if abs(q[0]) > 1e-8:
        return 0
    deriv_scale = max(1.0, abs(dp[0]), abs(dq[0]))
    if abs(p[0] - dq[0]) > 1e-8 * deriv_scale:  # Phi'(u=0) = P - dQ/du
        return 1
    logs = []
    for u_probe in (1e-3, 1e-5):
        u = np.array([u_probe], dtype=np.complex128)
        p, q, _, _, ls = _iterate_pair_values(f, n, one, u, 0.0, 1.0)
        phi = p * u - q
        logs.append(math.log(max(abs(phi[0]), 1e-300)) + ls[0])
    order = (logs[0] - logs[1]) / (math.log(1e-3) - math.log(1e-5))
    return min(3, max(2, int(round(order))))


def _initial_estimates(f: SphereMap, n: int, m: int) -> np.ndarray:
    """Aberth starting points: backward-orbit atoms of a generic point
    (each sits within one branch diameter of a periodic point), padded
    with circle points and deterministically jittered."""
    k = np.arange(m)
    circle = 3.0 * np.exp(2j * np.pi * (k + 0.3799) / m)
    try:
        from .fibers import pullback_measure
        mu = pullback_measure(f, SpherePoint.affine(0.4137 + 0.2637j), n,
                              atom_budget=4 * m + 16)
    except Exception:
        return circle
    seeds = []
    for (z0, z1), w in zip(mu.points, mu.weights):
        copies = max(1, int(round(w * f.degree ** n)))
        val = z0 / z1 if z1 != 0 else 1e6
        seeds.extend([complex(val)] * copies)
    z = np.array(seeds[:m], dtype=np.complex128)
    if len(z) < m:
        z = np.concatenate([z, circle[: m - len(z)]])
    jitter = 1e-5 * np.exp(2j * np.pi * (k * 0.61803398875 % 1.0))
    return z + jitter * (1.0 + np.abs(z))


def fixed_point_roots(f: SphereMap, n: int, max_sweeps: int = 800
                      ) -> list[tuple[SpherePoint, int]]:
    """Roots of p_n z1 - q_n z0 on P^1, clustered with multiplicity,
    found by Aberth-Ehrlich sweeps on the dynamically-evaluated form."""
    total = f.degree ** n + 1
    inf_mult = _infinity_multiplicity(f, n)
    m = total - inf_mult
    points: list[SpherePoint] = []
    mults: list[int] = []
    scores: list[float] = []
    if m > 0:
        z = _initial_estimates(f, n, m)
        done = np.zeros(m, dtype=bool)
        converged = False
        for _ in range(max_sweeps):
            idx = np.nonzero(~done)[0]
            if len(idx) == 0:
                converged = True
                break
            za = z[idx]
            steps = _phi_newton_steps(f, n, za)
            now_done = np.abs(steps) <= 1e-13 * (1.0 + np.abs(za))
            done[idx[now_done]] = True
            act = idx[~now_done]
            if len(act) == 0:
                continue
            steps = steps[~now_done]
            diff = z[act][:, None] - z[None, :]
            diff[np.arange(len(act)), act] = np.inf
            s = (1.0 / diff).sum(axis=1)
            denom = 1.0 - steps * s
            denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
            z[act] = z[act] - steps / denom
            if not np.isfinite(z[act]).all():
                raise SolverDiverged("fixed-point iteration left the sphere")
        for _ in range(80):
            steps = _phi_newton_steps(f, n, z)
            frozen = np.abs(steps) <= 1e-15 * (1.0 + np.abs(z))
            if frozen.all():
                break
            z = np.where(frozen, z, z - steps)
        steps = _phi_newton_steps(f, n, z)
        if not converged and not (
                np.abs(steps) <= 1e-10 * (1.0 + np.abs(z))).all():
            raise SolverDiverged(
                f"period-{n} roots did not converge in {max_sweeps} sweeps")
        for zi, st in zip(z, steps):
            if abs(zi) > 1e8:  # numerically escaped to [1:0]
                points.append(SpherePoint.infinity())
            elif abs(zi) <= 1.0:
                points.append(SpherePoint(zi, 1.0))
            else:
                points.append(SpherePoint(1.0, 1.0 / zi))
            mults.append(1)
            scores.append(abs(st))
    if inf_mult:
        points.append(SpherePoint.infinity())
        mults.append(inf_mult)
        scores.append(0.0)
    clustered = cluster_points(points, mults, CLUSTER_TOL, scores=scores)
    assert sum(mult for _, mult in clustered) == total
    return clustered


def _polish_against_dynamics(f: SphereMap, pt: SpherePoint, n: int,
                             mult: int) -> SpherePoint:
    """Newton on f^n(z) - z from an algebraic root.

    High iterates are ill-conditioned in coefficient form near points of
    large |z| curvature, while the pointwise-iterated residual is well
    conditioned at non-parabolic cycles; simple finite roots are snapped
    to the dynamics. Multiple roots (parabolic-type) keep the cluster
    centroid, where Newton on f^n - z is singular.
    """
    if mult != 1 or pt.is_infinity:
        return pt
    z0 = complex(pt.to_affine())
    z = _newton_fixed_point(f, z0, n)
    if z is None or abs(z - z0) > 1e-2 * (1.0 + abs(z0)):
        return pt
    return SpherePoint(z, 1.0) if abs(z) <= 1.0 else SpherePoint(1.0, 1.0 / z)


def _fn_with_derivative(f: SphereMap, z: complex, n: int):
    """(f^n(z), (f^n)'(z)) in the affine chart; None on chart escape."""
    w = z
    deriv = 1.0 + 0.0j
    for _ in range(n):
        num = complex(f.p[-1])
        dnum = 0.0 + 0.0j
        for j in range(len(f.p) - 2, -1, -1):
            dnum = dnum * w + num
            num = num * w + complex(f.p[j])
        den = complex(f.q[-1])
        dden = 0.0 + 0.0j
        for j in range(len(f.q) - 2, -1, -1):
            dden = dden * w + den
            den = den * w + complex(f.q[j])
        if abs(den) < 1e-14 * max(1.0, abs(num)):
            return None
        deriv *= (dnum * den - num * dden) / (den * den)
        w = num / den
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            return None
    return w, deriv


def _newton_fixed_point(f: SphereMap, z0: complex, n: int):
    z = z0
    for _ in range(60):
        res = _fn_with_derivative(f, z, n)
        if res is None:
            return None
        w, deriv = res
        g = w - z
        gp = deriv - 1.0
        if abs(gp) < 1e-14:
            return None
        step = g / gp
        z = z - step
        if abs(step) <= 1e-13 * (1.0 + abs(z)):
            return z
    return None


def periodic_via_branches(f: SphereMap, n: int, ball_cover, seed: int = 0
                          ) -> list[PeriodicPoint]:
    """Repelling period-n points from inverse branches: every surviving
    order-n branch whose image sits compactly inside its own ball is
    contracted to its attracting fixed point, then polished with Newton
    on f^n(z) - z. Points are deduplicated across balls.

    ball_cover: sequence of (center: SpherePoint, radius: float).
    """
    if n == 0:
        return []
    found: list[tuple[SpherePoint, complex]] = []
    any_alive = False
    for center, radius in ball_cover:
        tracking = track_branches(f, center, radius, n, seed=seed)
        alive = tracking.alive
        if alive:
            any_alive = True
        c_aff = complex(center.to_affine())
        for rec in alive:
            loop = rec.boundary_samples
            reach = np.abs(loop - c_aff) / np.sqrt(
                (1.0 + np.abs(loop) ** 2) * (1.0 + abs(c_aff) ** 2))
            if reach.max() >= 0.98 * radius:
                continue  # image not compactly inside the ball
            z = _newton_fixed_point(f, complex(rec.anchor.to_affine()), n)
            if z is None:
                continue
            pt = SpherePoint(z, 1.0) if abs(z) <= 1.0 \
                else SpherePoint(1.0, 1.0 / z)
            if chordal_distance(pt, center) > radius:
                continue
            lam = multiplier(f, pt, n)
            if abs(lam) <= 1.0 + CLASSIFICATION_TOL:
                continue
            found.append((pt, lam))
    if not any_alive:
        raise NoBranchSurvived(
            "no inverse branch survived over any ball in the cover")
    found.sort(key=lambda item: (item[0].to_affine().real
                                 if not item[0].is_infinity else math.inf,
                                 item[0].to_affine().imag
                                 if not item[0].is_infinity else 0.0))
    out: list[PeriodicPoint] = []
    for pt, lam in found:
        if any(chordal_distance(pt, prev.point) < DEDUP_TOL for prev in out):
            continue
        out.append(PeriodicPoint(
            point=pt, period=n, multiplicity=1,
            multiplier_eigenvalues=(lam,), classification="repelling",
            on_support=True))
    return out


# ---------------------------------------------------------------------------
# torus periodic points (exact integer lattice algebra)
# ---------------------------------------------------------------------------


def _period_matrix(f: TorusMap, n: int):
    an = mat_pow(f.matrix, n)
    m = [[an[0][0] - 1, an[0][1]], [an[1][0], an[1][1] - 1]]
    det = mat_det(m)
    if det == 0:
        raise DegeneratePeriod(
            f"det(A^{n} - I) = 0: period-{n} points are not isolated")
    return an, m, det


def periodic_torus_count(f: TorusMap, n: int) -> int:
    """|det(A^n - I)| exactly, for any n."""
    _, _, det = _period_matrix(f, n)
    return abs(det)


def periodic_torus(f: TorusMap, n: int,
                   point_budget: int = TORUS_POINT_BUDGET
                   ) -> tuple[int, list[PeriodicPoint]]:
    """Exact count and enumerated period-n points of the monomial map.

    Classification comes from the eigenvalues of A^n; every torus point
    lies in supp(mu) = the torus (Haar), so on_support is always true.
    """
    an, m, det = _period_matrix(f, n)
    count = abs(det)
    if count > point_budget:
        raise AtomBudgetExceeded(
            f"{count} points exceed the enumeration budget {point_budget}; "
            "use periodic_torus_count for the count alone")
    eig = np.linalg.eigvals(np.array(an, dtype=np.float64))
    eig_t = tuple(complex(e) for e in eig)
    cls = classify(eig_t)
    sols = lattice_solutions(m, (0.0, 0.0))
    pts = [PeriodicPoint(point=TorusPoint(t1, t2), period=n, multiplicity=1,
                         multiplier_eigenvalues=eig_t, classification=cls,
                         on_support=True)
           for t1, t2 in sols]
    return count, pts


def torus_periodic_bin_masses(f: TorusMap, n: int, bins: int) -> np.ndarray:
    """Bin-mass grid of the period-n measure, mass = count / d_t**n.

    Streams the exact lattice enumeration through the integer binning
    kernel, so arbitrarily large counts never materialize point lists.
    """
    _, m, _ = _period_matrix(f, n)
    w, det_abs, d1, d2 = coset_offsets(m)
    counts = lattice_bin_counts(w[0][0], w[0][1], w[1][0], w[1][1],
                                det_abs, d1, d2, bins)
    d_t = abs(f.det)
    return counts.astype(np.float64) / float(d_t) ** n


# ---------------------------------------------------------------------------
# empirical measures of periodic points
# ---------------------------------------------------------------------------


def periodic_measure(points, filter: str = "all",
                     normalizer: float | None = None) -> AtomicMeasure:
    """Atomic measure of a periodic-point list divided by d_t**n.

    filter 'all' weights by multiplicity; 'repelling' and
    'repelling_on_support' give each selected point weight
    1/normalizer. Total mass at most 1 + 1/normalizer; mass below 1 is
    expected and meaningful.
    """
    if filter not in ("all", "repelling", "repelling_on_support"):
        raise ValueError(f"unknown filter {filter!r}")
    if normalizer is None or normalizer <= 0:
        raise ValueError("normalizer d_t**n must be positive")
    selected = []
    weights = []
    for pp in points:
        if filter == "repelling" and pp.classification != "repelling":
            continue
        if filter == "repelling_on_support" and not (
                pp.classification == "repelling" and pp.on_support):
            continue
        selected.append(pp.point)
        weights.append((pp.multiplicity if filter == "all" else 1)
                       / normalizer)
    if not selected:
        return AtomicMeasure("sphere", np.empty((0, 2), dtype=np.complex128),
                             np.empty(0))
    if isinstance(selected[0], TorusPoint):
        return AtomicMeasure.from_torus_points(selected, weights)
    return AtomicMeasure.from_sphere_points(selected, weights)
