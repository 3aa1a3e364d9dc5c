"""The exceptional set E of a sphere map and the backward-orbit counter.

On P^1 every exceptional point has period at most 2 and E has at most
two elements, so candidates are searched among the fixed points of f
and f^2 and filtered by total invariance of the fiber.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import AtomBudgetExceeded
from .fibers import fiber_sphere
from .roots import cluster_points, roots_homogeneous
from .sphere import (SphereMap, SpherePoint, chordal_distance, eval_sphere,
                     fixed_point_polynomial)

#: chordal tolerance for matching solver outputs against the set Y
MATCH_TOL = 1e-7


@dataclass(frozen=True)
class ExceptionalSet:
    points: tuple[SpherePoint, ...]
    verified_depth: int

    def __contains__(self, x: SpherePoint) -> bool:
        return any(chordal_distance(x, e) <= MATCH_TOL for e in self.points)

    def __len__(self):
        return len(self.points)


def _candidate_points(f: SphereMap) -> list[SpherePoint]:
    pts = []
    mults = []
    for n in (1, 2):
        for pt, _ in roots_homogeneous(fixed_point_polynomial(f, n)):
            pts.append(pt)
            mults.append(1)
    return [pt for pt, _ in cluster_points(pts, mults, MATCH_TOL)]


def _totally_invariant_image(f: SphereMap, a: SpherePoint):
    """The single point carrying the whole fiber of a, or None."""
    fiber = fiber_sphere(f, a)
    if len(fiber) != 1:
        return None
    return fiber[0].point


@functools.lru_cache(maxsize=64)
def find_exceptional(f: SphereMap) -> ExceptionalSet:
    """Maximal finite totally invariant set: points whose full backward
    orbit is a single candidate point at each step."""
    if f.degree < 2:
        raise ValueError("exceptional detection requires degree >= 2")
    candidates = _candidate_points(f)
    images = {}
    for i, a in enumerate(candidates):
        img = _totally_invariant_image(f, a)
        if img is None:
            continue
        match = None
        for j, b in enumerate(candidates):
            if chordal_distance(img, b) <= MATCH_TOL:
                match = j
                break
        images[i] = match
    # keep candidates whose backward chain stays inside the kept set
    keep = {i for i, tgt in images.items() if tgt is not None}
    changed = True
    while changed:
        changed = False
        for i in list(keep):
            if images[i] not in keep:
                keep.discard(i)
                changed = True
    points = tuple(candidates[i] for i in sorted(keep))
    assert len(points) <= 2, "exceptional set on P^1 has at most 2 points"
    exc = ExceptionalSet(points=points, verified_depth=3)
    assert verify_invariance(f, exc)
    return exc


def verify_invariance(f: SphereMap, exc: ExceptionalSet) -> bool:
    """True iff f^{-1}(E) lies in E (to tolerance) and f(E) lies in E."""
    for a in exc.points:
        for fp in fiber_sphere(f, a):
            if fp.point not in exc:
                return False
        if eval_sphere(f, a) not in exc:
            return False
    return True


def lambda_n(f: SphereMap, a: SpherePoint, y, n: int,
             atom_budget: int = 10 ** 6) -> int:
    """Number of depth-n backward orbit chains of a staying inside Y,
    counted with multiplicity.

    Computed exactly as a column sum of the n-th power of the integer
    transfer matrix T[b, c] = multiplicity of b in f^{-1}(c) matched
    against Y; equivalent to enumerating the chains but without the
    d_t^n blow-up.
    """
    y = list(y)
    a_idx = None
    for i, pt in enumerate(y):
        if chordal_distance(a, pt) <= MATCH_TOL:
            a_idx = i
            break
    if a_idx is None:
        raise ValueError("a must belong to Y")
    if f.degree ** n > atom_budget:
        raise AtomBudgetExceeded(
            f"{f.degree}**{n} chains exceed budget {atom_budget}")
    k = len(y)
    t = [[0] * k for _ in range(k)]
    for c, pt in enumerate(y):
        for fp in fiber_sphere(f, pt):
            for b, other in enumerate(y):
                if chordal_distance(fp.point, other) <= MATCH_TOL:
                    t[b][c] += fp.multiplicity
                    break
    vec = [0] * k
    vec[a_idx] = 1
    for _ in range(n):
        vec = [sum(t[b][c] * vec[c] for c in range(k)) for b in range(k)]
    return sum(vec)
