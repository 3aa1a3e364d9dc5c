"""Acceptance suite: the checks the laboratory must pass, with pinned
tolerances. Used by the CLI ``acceptance`` subcommand and by the test
suite; each criterion yields one or more CriterionCheck rows."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .branches import branch_statistics, critical_orbit, is_safe_disc, \
    track_branches
from .degrees import profile_torus, verify_degree_growth
from .fibers import pullback_measure, sample_equilibrium
from .lyapunov import estimate_sphere, estimate_torus
from .measures import (ReferenceMeasure, binned_tv, binned_tv_grid,
                       ks_distance, torus_haar_grid)
from .periodic import (periodic_algebraic, periodic_measure, periodic_torus,
                       periodic_torus_count, periodic_via_branches,
                       torus_periodic_bin_masses)
from .sphere import SpherePoint, chebyshev_map, chordal_distance, power_map
from .torus import TorusMap

DEFAULT_SEED = 12345

FLAGSHIP_TORUS = [[3, 1], [1, 2]]


@dataclass(frozen=True)
class CriterionCheck:
    criterion: int
    check: str
    value: float
    threshold: float
    op: str  # one of "<=", ">=", "=="
    passed: bool

    @classmethod
    def le(cls, criterion, check, value, threshold):
        return cls(criterion, check, float(value), float(threshold), "<=",
                   bool(value <= threshold))

    @classmethod
    def ge(cls, criterion, check, value, threshold):
        return cls(criterion, check, float(value), float(threshold), ">=",
                   bool(value >= threshold))

    @classmethod
    def eq(cls, criterion, check, value, threshold):
        return cls(criterion, check, float(value), float(threshold), "==",
                   bool(value == threshold))


def criterion_1(seed: int) -> list[CriterionCheck]:
    """Backward-orbit equidistribution off the exceptional set."""
    cheb = chebyshev_map(2)
    arc = ReferenceMeasure.arcsine(-2.0, 2.0)
    tvs = {}
    for n in (10, 12, 14):
        mu = pullback_measure(cheb, SpherePoint.affine(0.3), n)
        tvs[n] = binned_tv(mu, arc, 32)
    out = [
        CriterionCheck.le(1, "cheb a=0.3 binned_tv at n=14", tvs[14], 0.06),
        CriterionCheck.le(1, "cheb binned_tv n=12 vs n=10 (+0.01 noise)",
                          tvs[12], tvs[10] + 0.01),
        CriterionCheck.le(1, "cheb binned_tv n=14 vs n=12 (+0.01 noise)",
                          tvs[14], tvs[12] + 0.01),
    ]
    f2 = power_map(2)
    mu = pullback_measure(f2, SpherePoint.affine(1.0 + 0.3j), 14)
    ks = ks_distance(mu, ReferenceMeasure.circle_haar())
    out.append(CriterionCheck.le(1, "z^2 a=1+0.3i ks vs circle at n=14",
                                 ks, 0.03))
    return out


def criterion_2(seed: int) -> list[CriterionCheck]:
    """Exceptional start: mu_n^0 stays a Dirac mass at 0 for z^2."""
    f2 = power_map(2)
    worst = 0.0
    for n in range(1, 15):
        mu = pullback_measure(f2, SpherePoint.affine(0.0), n)
        if len(mu) != 1:
            worst = math.inf
            break
        worst = max(worst, abs(mu.affine()[0]))
    out = [CriterionCheck.le(2, "mu_n^0 is a single atom at 0 for n<=14",
                             worst, 1e-12)]
    mu = pullback_measure(f2, SpherePoint.affine(0.0), 14)
    tv = binned_tv(mu, ReferenceMeasure.circle_haar(), 32)
    out.append(CriterionCheck.ge(2, "binned_tv(delta_0, circle_haar)", tv,
                                 0.9))
    return out


def criterion_3(seed: int) -> list[CriterionCheck]:
    """Periodic point counting."""
    out = []
    for name, f in (("z^2", power_map(2)), ("cheb", chebyshev_map(2))):
        bad = 0
        for n in range(1, 11):
            pts = periodic_algebraic(f, n)
            if sum(p.multiplicity for p in pts) != 2 ** n + 1:
                bad += 1
        out.append(CriterionCheck.eq(
            3, f"{name}: multiplicity sum == 2^n + 1 failures, n<=10", bad, 0))
    a = TorusMap(FLAGSHIP_TORUS)
    eig = a.eigenvalues()
    worst = 0.0
    for n in range(1, 16):
        count = periodic_torus_count(a, n)
        closed = abs((eig[0] ** n - 1) * (eig[1] ** n - 1))
        worst = max(worst, abs(count - closed) / closed)
    out.append(CriterionCheck.le(
        3, "torus count vs eigenvalue product, rel err n<=15", worst, 1e-9))
    cnt6, pts6 = periodic_torus(a, 6)
    out.append(CriterionCheck.eq(3, "torus n=6 enumeration matches count",
                                 len(pts6), cnt6))
    ratio = periodic_torus_count(a, 15) / 5.0 ** 15
    out.append(CriterionCheck.ge(3, "torus count/5^15 lower", ratio, 0.99))
    out.append(CriterionCheck.le(3, "torus count/5^15 upper", ratio, 1.0))
    return out


def criterion_4(seed: int) -> list[CriterionCheck]:
    """Repelling periodic points equidistribute with respect to mu."""
    cheb = chebyshev_map(2)
    pts = periodic_algebraic(cheb, 11)
    mu = periodic_measure(pts, filter="repelling_on_support",
                          normalizer=2.0 ** 11)
    ks = ks_distance(mu, ReferenceMeasure.arcsine(-2.0, 2.0))
    out = [
        CriterionCheck.le(4, "cheb n=11 repelling-on-support ks", ks, 0.05),
        CriterionCheck.ge(4, "cheb n=11 periodic_measure mass", mu.mass,
                          0.95),
    ]
    f2 = power_map(2)
    pts2 = periodic_algebraic(f2, 11)
    mu2 = periodic_measure(pts2, filter="repelling", normalizer=2.0 ** 11)
    tv = binned_tv(mu2, ReferenceMeasure.circle_haar(), 32)
    out.append(CriterionCheck.le(4, "z^2 n=11 repelling binned_tv", tv, 0.03))
    grid = torus_periodic_bin_masses(TorusMap(FLAGSHIP_TORUS), 12, 16)
    tv_t = binned_tv_grid(grid, torus_haar_grid(16))
    out.append(CriterionCheck.le(4, "torus n=12 binned_tv (16x16, exact)",
                                 tv_t, 0.05))
    return out


def _safe_centers(f, radius: float, count: int, seed: int, obstruction):
    """Equilibrium-sampled disc centers satisfying the safe-radius
    condition of the branch construction (rejection sampling)."""
    mu = sample_equilibrium(f, SpherePoint.affine(0.3), burn_in=100,
                            count=40 * count, seed=seed)
    centers = []
    for pt in mu.sphere_points():
        if is_safe_disc(pt, radius, obstruction):
            centers.append(pt)
            if len(centers) == count:
                break
    if len(centers) < count:
        raise RuntimeError("could not sample enough safe disc centers")
    return centers


def criterion_5(seed: int) -> list[CriterionCheck]:
    """Inverse branch survival and size control."""
    cheb = chebyshev_map(2)
    n, radius, eps = 10, 0.03, 0.1
    obstruction = critical_orbit(cheb, n)
    centers = _safe_centers(cheb, radius, 20, seed, obstruction)
    survivals = []
    size_fracs = []
    monotone_ok = 0
    for center in centers:
        tr = track_branches(cheb, center, radius, n, seed=seed,
                            obstruction=obstruction)
        surv, size_frac = branch_statistics(tr, eps)
        survivals.append(surv)
        if tr.alive_per_depth[-1] > 0:
            size_fracs.append(size_frac)
        fr = tr.survival_fractions()
        if all(fr[i + 1] <= fr[i] + 1e-12 for i in range(len(fr) - 1)):
            monotone_ok += 1
    out = [
        CriterionCheck.ge(5, "mean survival fraction over 20 centers",
                          float(np.mean(survivals)), 0.85),
        CriterionCheck.eq(5, "size_bound_fraction == 1 among alive",
                          float(min(size_fracs)) if size_fracs else 0.0, 1.0),
        CriterionCheck.eq(5, "centers with monotone survival in depth",
                          monotone_ok, len(centers)),
    ]
    return out


def criterion_6(seed: int) -> list[CriterionCheck]:
    """Branch-to-periodic-point cross validation at n = 8."""
    cheb = chebyshev_map(2)
    n, radius, eps = 8, 0.05, 0.1
    obstruction = critical_orbit(cheb, n)
    centers = _safe_centers(cheb, radius, 20, seed, obstruction)
    branch_pts = periodic_via_branches(cheb, n,
                                       [(c, radius) for c in centers],
                                       seed=seed)
    algebraic = periodic_algebraic(cheb, n)
    worst = 0.0
    for bp in branch_pts:
        dist = min(chordal_distance(bp.point, ap.point) for ap in algebraic)
        worst = max(worst, dist)
    moduli = [bp.min_modulus for bp in branch_pts]
    bound = (1.0 / 2.0 + eps) ** (-n / 2.0)
    return [
        CriterionCheck.ge(6, "branch periodic points found",
                          len(branch_pts), 1),
        CriterionCheck.le(6, "max distance to an algebraic periodic point",
                          worst, 1e-6),
        CriterionCheck.ge(6, "min multiplier modulus vs (0.6)^(-4)",
                          min(moduli) if moduli else 0.0, bound),
    ]


def criterion_7(seed: int) -> list[CriterionCheck]:
    """Lyapunov exponents against the degree floor."""
    out = []
    for name, f, start in (
            ("z^2", power_map(2), SpherePoint.affine(1.0 + 0.3j)),
            ("cheb", chebyshev_map(2), SpherePoint.affine(0.3))):
        mu = sample_equilibrium(f, start, burn_in=100, count=10_000,
                                seed=seed)
        est = estimate_sphere(f, mu)
        out.append(CriterionCheck.le(
            7, f"{name}: |chi - log 2| with 10^4 samples",
            abs(est.chi - math.log(2.0)), 0.02))
        out.append(CriterionCheck.eq(
            7, f"{name}: floor_satisfied", float(est.floor_satisfied), 1.0))
    a = TorusMap(FLAGSHIP_TORUS)
    est = estimate_torus(a)
    exact = math.log((5.0 - math.sqrt(5.0)) / 2.0)
    out.append(CriterionCheck.le(7, "torus chi vs closed form",
                                 abs(est.chi - exact), 1e-12))
    floor = 0.5 * math.log(5.0 / a.spectral_radius())
    out.append(CriterionCheck.ge(7, "torus chi >= (1/2) log(5/rho)",
                                 est.chi, floor))
    return out


def criterion_8(seed: int) -> list[CriterionCheck]:
    """Degree profiles, log-concavity, and norm-growth verification."""
    a = TorusMap(FLAGSHIP_TORUS)
    prof = profile_torus(a)
    d1_exact = (5.0 + math.sqrt(5.0)) / 2.0
    out = [
        CriterionCheck.le(8, "flagship d1 vs (5+sqrt(5))/2",
                          abs(prof.degrees[1] - d1_exact), 1e-12),
        CriterionCheck.le(8, "flagship d2 vs 5",
                          abs(prof.degrees[2] - 5.0), 1e-12),
        CriterionCheck.eq(8, "flagship dominant", float(prof.dominant), 1.0),
    ]
    rng = np.random.default_rng(seed)
    violations = 0
    tested = 0
    while tested < 100:
        m = rng.integers(-5, 6, size=(2, 2))
        if m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] == 0:
            continue
        tested += 1
        g = TorusMap(m.tolist())
        p = profile_torus(g)
        if p.degrees[1] ** 2 < p.degrees[0] * p.degrees[2] - 1e-12:
            violations += 1
    out.append(CriterionCheck.eq(
        8, "log-concavity violations over 100 random maps", violations, 0))
    growth = verify_degree_growth(a, 1, 20)
    out.append(CriterionCheck.le(
        8, "p=1 20th root of norm growth, rel err vs d1",
        abs(growth[-1] - prof.degrees[1]) / prof.degrees[1], 0.05))
    growth2 = verify_degree_growth(a, 2, 20)
    out.append(CriterionCheck.le(
        8, "p=2 20th root vs |det| = 5", abs(growth2[-1] - 5.0), 1e-9))
    return out


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}

DESCRIPTIONS = {
    1: "backward-orbit equidistribution",
    2: "exceptional obstruction (Dirac stays Dirac)",
    3: "periodic point counts",
    4: "repelling periodic equidistribution",
    5: "inverse branch survival and size",
    6: "branch/algebraic periodic cross-validation",
    7: "Lyapunov bound",
    8: "degree profiles and growth",
}


def run_criteria(seed: int = DEFAULT_SEED, which=None
                 ) -> list[CriterionCheck]:
    which = sorted(CRITERIA) if which is None else sorted(which)
    rows: list[CriterionCheck] = []
    for k in which:
        rows.extend(CRITERIA[k](seed))
    return rows


def summarize(rows: list[CriterionCheck]) -> list[tuple[int, str, bool]]:
    """One (criterion, description, passed) line per criterion present."""
    seen = sorted({r.criterion for r in rows})
    return [(k, DESCRIPTIONS[k],
             all(r.passed for r in rows if r.criterion == k))
            for k in seen]
