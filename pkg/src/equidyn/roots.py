"""All-roots solver for homogeneous bivariate polynomials on P^1.

Simultaneous (Aberth-Ehrlich) iteration on the dehomogenized
polynomial, explicit bookkeeping for roots at infinity (near-zero
leading coefficients), Newton polishing, and multiplicity clustering in
the chordal metric.
"""

from __future__ import annotations

import numpy as np

from ._kernels import all_roots
from .errors import SolverDiverged
from .sphere import SpherePoint, chordal_distance

#: leading coefficients below this (relative to sup-norm) count as zero
INFINITY_STRIP_TOL = 1e-12
#: multiplicity clustering radius in the chordal metric, after polishing
CLUSTER_TOL = 1e-6


def roots_homogeneous(coeffs, cluster_tol: float = CLUSTER_TOL
                      ) -> list[tuple[SpherePoint, int]]:
    """Roots of sum_j c[j] z0^j z1^(d-j) on P^1, clustered with multiplicity.

    Multiplicities over the output sum to d = len(coeffs) - 1 exactly.
    """
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    d = len(c) - 1
    sup = np.abs(c).max()
    if sup == 0:
        raise ValueError("zero polynomial has no well-defined root set")
    c = c / sup
    m = d
    while m > 0 and abs(c[m]) <= INFINITY_STRIP_TOL:
        m -= 1
    inf_mult = d - m
    if m == 0:
        return [(SpherePoint.infinity(), inf_mult)] if inf_mult else []
    finite, ok = all_roots(c[:m + 1])
    if not ok:
        raise SolverDiverged(
            f"root residuals did not converge for degree {m}")
    points = [SpherePoint(z, 1.0) if abs(z) <= 1.0 else SpherePoint(1.0, 1.0 / z)
              for z in finite]
    mults = [1] * len(points)
    if inf_mult:
        points.append(SpherePoint.infinity())
        mults.append(inf_mult)
    clustered = cluster_points(points, mults, cluster_tol)
    assert sum(mult for _, mult in clustered) == d
    return clustered


def cluster_points(points: list[SpherePoint], mults: list[int],
                   tol: float, scores=None) -> list[tuple[SpherePoint, int]]:
    """Single-linkage clustering under the chordal metric.

    Without scores, representatives average the members' chart
    coordinates (in the first member's chart). With scores (lower is
    better, e.g. residuals), the best-scoring member represents the
    cluster, which keeps dynamics-accurate roots unpolluted by
    sub-resolution neighbors.
    """
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if chordal_distance(points[i], points[j]) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        head = points[members[0]]
        total = sum(mults[i] for i in members)
        if len(members) == 1:
            out.append((head, total))
            continue
        if scores is not None:
            best = min(members, key=lambda i: scores[i])
            out.append((points[best], total))
            continue
        acc = 0.0 + 0.0j
        weight = 0
        for i in members:
            pt = points[i]
            if head.is_affine_chart:
                coord = pt.z0 / pt.z1 if pt.z1 != 0 else None
            else:
                coord = pt.z1 / pt.z0
            if coord is None:  # infinity mixed into an affine cluster
                continue
            acc += mults[i] * coord
            weight += mults[i]
        if weight == 0:
            rep = head
        elif head.is_affine_chart:
            rep = SpherePoint(acc / weight, 1.0)
        else:
            rep = SpherePoint(1.0, acc / weight)
        out.append((rep, total))
    # deterministic order: by affine real, imag, infinity last
    def key(item):
        pt = item[0]
        if pt.is_infinity:
            return (1, 0.0, 0.0)
        z = pt.to_affine()
        return (0, z.real, z.imag)

    out.sort(key=key)
    return out
