"""Inverse branches of chordal discs under f^n.

Breadth-first over the fiber tree: at each depth the boundary loop of
every alive branch is pulled back by root continuation (nearest-root
matching, bisecting the step when matching is ambiguous). A branch dies
``near_critical`` when its pulled-back region touches the obstruction
set (critical-value orbit): by kill-radius proximity, by containing an
obstruction point (loop winding number), or by monodromy (the lifted
loop fails to close). ``collided`` flags branches that continued onto
the same fiber point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContinuationAmbiguous
from .fibers import _quad_roots_batch
from .roots import roots_homogeneous
from .sphere import (SphereMap, SpherePoint, chordal_distance,
                     chordal_distance_affine, wronskian_coefficients,
                     eval_sphere)

#: branch dies when its region comes this chordal-close to the obstruction
KILL_RADIUS = 1e-5
#: continuation step subdivision floor, as a fraction of the disc radius
SUBDIVISION_FLOOR = 2.0 ** -20
#: affine coordinates beyond this are treated as escaping toward infinity
FAR_FIELD = 1e9

DEFAULT_BOUNDARY_SAMPLES = 128


@dataclass(frozen=True)
class ObstructionSet:
    """Forward orbit of the critical values, the branch obstruction."""

    points: tuple[SpherePoint, ...]
    depth: int
    critical_points: tuple[SpherePoint, ...]

    def min_distance(self, x: SpherePoint) -> float:
        return min((chordal_distance(x, pt) for pt in self.points),
                   default=math.inf)


def critical_orbit(f: SphereMap, depth: int) -> ObstructionSet:
    """Critical points from the homogeneous Wronskian, their images
    iterated ``depth`` times, duplicates merged."""
    if not 1 <= depth <= 60:
        raise ValueError("depth must be in 1..60")
    crit = [pt for pt, _ in roots_homogeneous(wronskian_coefficients(f))]
    orbit: list[SpherePoint] = []
    for c in crit:
        cur = c
        for _ in range(depth):
            cur = eval_sphere(f, cur)
            if all(chordal_distance(cur, o) > 1e-9 for o in orbit):
                orbit.append(cur)
    orbit.sort(key=lambda pt: (pt.is_infinity, pt.to_affine().real
                               if not pt.is_infinity else 0.0,
                               pt.to_affine().imag
                               if not pt.is_infinity else 0.0))
    return ObstructionSet(points=tuple(orbit), depth=depth,
                          critical_points=tuple(crit))


@dataclass
class BranchRecord:
    order: int
    anchor: SpherePoint
    boundary_samples: np.ndarray  # affine complex, one per boundary sample
    diameters: np.ndarray  # chordal diameter of B_{-i}, i = 0..depth reached
    status: str  # alive | collided | near_critical | near_indeterminate
    death_depth: int | None = None


class BranchTracking:
    """Sequence of BranchRecord plus per-depth alive counts."""

    def __init__(self, f, center, radius, order, records, alive_per_depth):
        self.map = f
        self.center = center
        self.radius = radius
        self.order = order
        self.records = records
        self.alive_per_depth = alive_per_depth

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def __iter__(self):
        return iter(self.records)

    @property
    def alive(self):
        return [r for r in self.records if r.status == "alive"]

    def survival_fractions(self) -> list[float]:
        d = self.map.degree
        return [count / d ** i
                for i, count in enumerate(self.alive_per_depth)]


# ---------------------------------------------------------------------------
# geometry helpers
# ---------------------------------------------------------------------------


def _rotation_from_zero(center: SpherePoint) -> np.ndarray:
    """Unitary sending [0:1] to center (inverse of the centering rotation)."""
    v = np.array([center.z0, center.z1], dtype=np.complex128)
    v = v / math.hypot(abs(v[0]), abs(v[1]))
    # U = [[v1, -v0], [conj(v0), conj(v1)]] sends center to [0:1]
    u = np.array([[v[1], -v[0]], [np.conj(v[0]), np.conj(v[1])]])
    return np.conj(u.T)


def disc_boundary(center: SpherePoint, radius: float, m: int) -> np.ndarray:
    """m affine points on the chordal circle of the given radius."""
    if not 0.0 < radius < 0.999:
        raise ValueError("radius must lie in (0, 1) in the chordal metric")
    rho = radius / math.sqrt(1.0 - radius * radius)
    ang = 2.0 * np.pi * np.arange(m) / m
    w = rho * np.exp(1j * ang)
    u = _rotation_from_zero(center)
    num = u[0, 0] * w + u[0, 1]
    den = u[1, 0] * w + u[1, 1]
    if np.any(np.abs(den) < 1e-15):
        raise ValueError("disc touches infinity; shrink the radius")
    return num / den


def _chordal_to_point_set(z: np.ndarray, pts: tuple[SpherePoint, ...]
                          ) -> np.ndarray:
    """Min chordal distance from each affine z to a finite set of points."""
    z = np.asarray(z, dtype=np.complex128)
    norm = np.sqrt(1.0 + np.abs(z) ** 2)
    best = np.full(z.shape, math.inf)
    for pt in pts:
        cross = np.abs(z * pt.z1 - pt.z0)
        scale = math.hypot(abs(pt.z0), abs(pt.z1))
        np.minimum(best, cross / (norm * scale), out=best)
    return best


def _max_pairwise_chordal(z: np.ndarray) -> float:
    z = np.asarray(z, dtype=np.complex128)
    norm = np.sqrt(1.0 + np.abs(z) ** 2)
    diff = np.abs(z[:, None] - z[None, :])
    return float((diff / (norm[:, None] * norm[None, :])).max())


def _winding_number(loop: np.ndarray, v: complex) -> int:
    delta = loop - v
    if np.min(np.abs(delta)) < 1e-14:
        return 1  # boundary touches the point; treated as containment
    ratios = np.roll(delta, -1) / delta
    return int(round(np.angle(ratios).sum() / (2.0 * np.pi)))


# ---------------------------------------------------------------------------
# fiber roots for continuation
# ---------------------------------------------------------------------------


def _fiber_roots_affine(f: SphereMap, t: complex) -> np.ndarray:
    """The d preimage coordinates of an affine target, with multiplicity
    expanded, infinity as complex inf."""
    coeffs = f.p - t * f.q
    out = []
    for pt, mult in roots_homogeneous(coeffs):
        val = complex(math.inf, 0.0) if pt.is_infinity else pt.to_affine()
        out.extend([val] * mult)
    return np.array(out, dtype=np.complex128)


def _fiber_roots_batch(f: SphereMap, targets: np.ndarray) -> np.ndarray:
    """Preimages of many affine targets; shape targets.shape + (d,)."""
    flat = np.ascontiguousarray(targets, dtype=np.complex128).ravel()
    d = f.degree
    out = np.empty((flat.size, d), dtype=np.complex128)
    if d == 2:
        c0 = f.p[0] - flat * f.q[0]
        c1 = f.p[1] - flat * f.q[1]
        c2 = f.p[2] - flat * f.q[2]
        r1, r2, ok = _quad_roots_batch(c0, c1, c2)
        out[:, 0] = r1
        out[:, 1] = r2
        for i in np.nonzero(~ok)[0]:
            out[i] = _fiber_roots_affine(f, complex(flat[i]))
    else:
        for i, t in enumerate(flat):
            out[i] = _fiber_roots_affine(f, complex(t))
    return out.reshape(targets.shape + (d,))


def _match_step(cur: np.ndarray, roots: np.ndarray):
    """Nearest-root assignment for one branch; returns (assigned, ok)."""
    d = len(cur)
    dist = np.abs(cur[:, None] - roots[None, :])
    dist = np.where(np.isnan(dist), math.inf, dist)
    if d == 2:
        if abs(roots[0] - roots[1]) <= 1e-12 * (1.0 + abs(roots[0])):
            return roots.copy(), True  # double root: assignments coincide
        straight = dist[0, 0] + dist[1, 1]
        crossed = dist[0, 1] + dist[1, 0]
        lo, hi = min(straight, crossed), max(straight, crossed)
        if lo > 0.5 * hi and hi > 0:
            return cur, False
        if straight <= crossed:
            return roots.copy(), True
        return roots[::-1].copy(), True
    assigned = np.empty(d, dtype=np.complex128)
    used = np.zeros(d, dtype=bool)
    order = np.argsort(dist.min(axis=1))
    for c in order:
        row = np.where(used, math.inf, dist[c])
        j = int(np.argmin(row))
        srt = np.sort(row[np.isfinite(row)])
        if len(srt) > 1 and srt[0] > 0.45 * srt[1]:
            return cur, False
        assigned[c] = roots[j]
        used[j] = True
    return assigned, True


def _lift_segment(f: SphereMap, cur: np.ndarray, t0: complex, t1: complex,
                  floor_len: float) -> np.ndarray:
    """Continue the d preimages from target t0 to t1, bisecting on
    ambiguity down to the subdivision floor."""
    stack = [(t0, t1)]
    state = cur
    guard = 0
    while stack:
        guard += 1
        if guard > 200000:  # pragma: no cover
            raise ContinuationAmbiguous("continuation stack exploded")
        a, b = stack.pop()
        roots = _fiber_roots_batch(f, np.array([b]))[0]
        assigned, ok = _match_step(state, roots)
        if ok:
            state = assigned
            continue
        if abs(b - a) < floor_len:
            raise ContinuationAmbiguous(
                f"root matching unresolved at step length {abs(b - a):.3e}")
        mid = 0.5 * (a + b)
        stack.append((mid, b))
        stack.append((a, mid))
    return state


# ---------------------------------------------------------------------------
# the tracker
# ---------------------------------------------------------------------------


class _LiveBranch:
    __slots__ = ("anchor", "loop", "diameters")

    def __init__(self, anchor, loop, diameters):
        self.anchor = anchor  # affine complex
        self.loop = loop  # (M,) affine complex
        self.diameters = diameters  # list of floats


def track_branches(f: SphereMap, center: SpherePoint, radius: float,
                   n: int, boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES,
                   seed: int = 0, obstruction: ObstructionSet | None = None,
                   kill_radius: float = KILL_RADIUS) -> BranchTracking:
    """All order-n inverse branches of the chordal disc around center.

    ``seed`` is accepted for interface stability; the construction is
    deterministic. Dead subtrees are reported as a single record at the
    death depth; statistics normalize by d**n regardless.
    """
    if boundary_samples < 64:
        raise ValueError("boundary_samples must be >= 64")
    if n < 0:
        raise ValueError("n must be >= 0")
    if obstruction is None:
        obstruction = critical_orbit(f, max(n, 1))
    # discs violating the safe-radius condition are allowed to run: their
    # branches die near_critical instead (obstructed discs are data too)
    d = f.degree
    base_loop = disc_boundary(center, radius, boundary_samples)
    if center.is_infinity:
        raise ValueError("center must be finite in the affine chart")
    floor_len = SUBDIVISION_FLOOR * radius
    diam0 = _max_pairwise_chordal(base_loop)
    records: list[BranchRecord] = []
    alive = [_LiveBranch(complex(center.to_affine()), base_loop, [diam0])]
    alive_per_depth = [1]
    finite_obstruction = tuple(pt for pt in obstruction.points
                               if not pt.is_infinity)
    inf_in_obstruction = any(pt.is_infinity for pt in obstruction.points)

    for depth in range(1, n + 1):
        children: list[_LiveBranch] = []
        dead: list[tuple[_LiveBranch, str]] = []
        if alive:
            anchors = np.array([br.anchor for br in alive])
            anchor_roots = _fiber_roots_batch(f, anchors)  # (A, d)
            loops = np.stack([br.loop for br in alive])  # (A, M)
            loop_roots = _fiber_roots_batch(f, loops)  # (A, M, d)
        for a_idx, parent in enumerate(alive):
            cand = anchor_roots[a_idx]
            starts, ok = _match_step(cand, loop_roots[a_idx, 0])
            if not ok:
                # radial continuation from the anchor out to the boundary
                starts = _lift_segment(f, cand, parent.anchor,
                                       parent.loop[0], floor_len)
            cur = starts.copy()
            lifted = np.empty((boundary_samples, d), dtype=np.complex128)
            lifted[0] = cur
            for k in range(1, boundary_samples):
                assigned, ok = _match_step(cur, loop_roots[a_idx, k])
                if not ok:
                    assigned = _lift_segment(f, cur, parent.loop[k - 1],
                                             parent.loop[k], floor_len)
                cur = assigned
                lifted[k] = cur
            # closure: continue back to sample 0 and compare with starts
            assigned, ok = _match_step(cur, loop_roots[a_idx, 0])
            if not ok:
                assigned = _lift_segment(f, cur, parent.loop[-1],
                                         parent.loop[0], floor_len)
            closure_gap = np.abs(assigned - starts)
            spread = np.abs(starts[:, None] - starts[None, :]).max()
            closed = np.all(closure_gap <= max(1e-9, 0.25 * spread)) \
                if d > 1 else True
            for c_idx in range(d):
                anchor_c = cand[c_idx]
                loop_c = lifted[:, c_idx]
                child = _LiveBranch(complex(anchor_c), loop_c.copy(),
                                    parent.diameters.copy())
                status = None
                pts_all = np.append(loop_c, anchor_c)
                if not np.isfinite(pts_all).all() or \
                        np.abs(pts_all).max() > FAR_FIELD:
                    status = "near_critical" if inf_in_obstruction \
                        else "collided"
                elif not closed:
                    status = "near_critical"
                else:
                    prox = _chordal_to_point_set(
                        pts_all, obstruction.points).min()
                    if prox < kill_radius:
                        status = "near_critical"
                    else:
                        reach = np.abs(loop_c - anchor_c).max()
                        for pt in finite_obstruction:
                            v = pt.to_affine()
                            if abs(v - anchor_c) <= 1.5 * reach + 1e-12 and \
                                    _winding_number(loop_c, v) != 0:
                                status = "near_critical"
                                break
                if status is None:
                    child.diameters.append(_max_pairwise_chordal(loop_c))
                    children.append(child)
                else:
                    dead.append((child, status))
        # collision: two surviving branches continued onto the same point
        if children:
            anchors_new = np.array([c.anchor for c in children])
            dd = chordal_distance_affine(anchors_new[:, None],
                                         anchors_new[None, :])
            np.fill_diagonal(dd, math.inf)
            collided = dd.min(axis=1) < 1e-9
            for i in np.nonzero(collided)[0][::-1]:
                dead.append((children[i], "collided"))
            children = [c for i, c in enumerate(children) if not collided[i]]
        for child, status in dead:
            records.append(BranchRecord(
                order=n, anchor=_to_sphere_point(child.anchor),
                boundary_samples=child.loop,
                diameters=np.array(child.diameters), status=status,
                death_depth=depth))
        alive = children
        alive_per_depth.append(len(alive))

    for br in alive:
        records.append(BranchRecord(
            order=n, anchor=_to_sphere_point(br.anchor),
            boundary_samples=br.loop, diameters=np.array(br.diameters),
            status="alive", death_depth=None))
    records.sort(key=lambda r: (r.status != "alive",
                                r.anchor.to_affine().real
                                if not r.anchor.is_infinity else math.inf,
                                r.anchor.to_affine().imag
                                if not r.anchor.is_infinity else 0.0))
    return BranchTracking(f, center, radius, n, records, alive_per_depth)


def is_safe_disc(center: SpherePoint, radius: float,
                 obstruction: ObstructionSet) -> bool:
    """Initial condition for the survival guarantees: radius below half
    the chordal distance from the center to the obstruction set."""
    return radius < 0.5 * obstruction.min_distance(center)


def _to_sphere_point(z: complex) -> SpherePoint:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return SpherePoint.infinity()
    if abs(z) <= 1.0:
        return SpherePoint(z, 1.0)
    return SpherePoint(1.0, 1.0 / z)


def branch_statistics(tracking: BranchTracking, epsilon: float
                      ) -> tuple[float, float]:
    """(survival_fraction, size_bound_fraction) for one tracking run.

    The size bound on P^1 is (1/d_t + epsilon)^(n/2).
    """
    if len(tracking) == 0:
        raise ValueError("no branch records")
    d = tracking.map.degree
    n = tracking.order
    alive = tracking.alive
    survival = len(alive) / d ** n
    if alive:
        bound = (1.0 / d + epsilon) ** (n / 2.0)
        within = sum(1 for r in alive if r.diameters[-1] <= bound)
        size_fraction = within / len(alive)
    else:
        size_fraction = 0.0
    return survival, size_fraction


def statistics_row(tracking: BranchTracking, epsilon: float) -> dict:
    """CSV row: (n, d^n, alive, survival_fraction, max_diameter, bound,
    size_bound_fraction)."""
    survival, size_fraction = branch_statistics(tracking, epsilon)
    alive = tracking.alive
    max_diam = max((r.diameters[-1] for r in alive), default=math.nan)
    d = tracking.map.degree
    return {
        "n": tracking.order,
        "d_pow_n": d ** tracking.order,
        "alive": len(alive),
        "survival_fraction": survival,
        "max_diameter": max_diam,
        "bound": (1.0 / d + epsilon) ** (tracking.order / 2.0),
        "size_bound_fraction": size_fraction,
    }
