"""Monomial self-maps of the 2-torus: theta -> A theta mod 2*pi.

All lattice algebra is exact over Python integers; angles are reduced
into [0, 2*pi) after every arithmetic step.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def _reduce_angle(t: float) -> float:
    r = math.fmod(float(t), TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:  # fmod can land exactly on 2*pi after the add
        r -= TWO_PI
    return r


class TorusPoint:
    """Angle pair (theta1, theta2), each reduced mod 2*pi."""

    __slots__ = ("theta1", "theta2")

    def __init__(self, theta1: float, theta2: float):
        if not (math.isfinite(theta1) and math.isfinite(theta2)):
            raise ValueError("angles must be finite")
        object.__setattr__(self, "theta1", _reduce_angle(theta1))
        object.__setattr__(self, "theta2", _reduce_angle(theta2))

    def __setattr__(self, name, value):
        raise AttributeError("TorusPoint is immutable")

    def angles(self) -> tuple[float, float]:
        return (self.theta1, self.theta2)

    def __repr__(self):
        return f"TorusPoint({self.theta1!r}, {self.theta2!r})"

    def __eq__(self, other):
        return (isinstance(other, TorusPoint)
                and self.theta1 == other.theta1
                and self.theta2 == other.theta2)

    def __hash__(self):
        return hash((self.theta1, self.theta2))


def angle_distance(x: TorusPoint, y: TorusPoint) -> float:
    """Flat torus distance: Euclidean norm of minimal angle differences."""
    d1 = abs(x.theta1 - y.theta1)
    d2 = abs(x.theta2 - y.theta2)
    d1 = min(d1, TWO_PI - d1)
    d2 = min(d2, TWO_PI - d2)
    return math.hypot(d1, d2)


class TorusMap:
    """Integer matrix A = [[a, b], [c, d]] acting on angles."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, matrix):
        rows = [[int(v) for v in row] for row in matrix]
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("matrix must be 2x2 integer")
        (a, b), (c, d) = rows
        if a * d - b * c == 0:
            raise ValueError("det A must be nonzero (map must be dominant)")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("TorusMap is immutable")

    @property
    def matrix(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def spectral_radius(self) -> float:
        return max(abs(e) for e in self.eigenvalues())

    def eigenvalues(self) -> tuple[complex, complex]:
        tr = self.a + self.d
        disc = tr * tr - 4 * self.det
        if disc >= 0:
            s = math.sqrt(disc)
            return ((tr + s) / 2.0 + 0.0j, (tr - s) / 2.0 + 0.0j)
        s = math.sqrt(-disc)
        return (complex(tr / 2.0, s / 2.0), complex(tr / 2.0, -s / 2.0))

    def __call__(self, x: TorusPoint) -> TorusPoint:
        return eval_torus(self, x)

    def __repr__(self):
        return f"TorusMap({self.matrix})"


def eval_torus(f: TorusMap, x: TorusPoint) -> TorusPoint:
    t1, t2 = x.theta1, x.theta2
    return TorusPoint(f.a * t1 + f.b * t2, f.c * t1 + f.d * t2)


# ---------------------------------------------------------------------------
# exact integer matrix algebra
# ---------------------------------------------------------------------------


def mat_mul(x, y):
    return [[x[0][0] * y[0][0] + x[0][1] * y[1][0],
             x[0][0] * y[0][1] + x[0][1] * y[1][1]],
            [x[1][0] * y[0][0] + x[1][1] * y[1][0],
             x[1][0] * y[0][1] + x[1][1] * y[1][1]]]


def mat_pow(m, n: int):
    """Exact n-th power of a 2x2 integer matrix (Python ints, no overflow)."""
    result = [[1, 0], [0, 1]]
    base = [row[:] for row in m]
    while n > 0:
        if n & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        n >>= 1
    return result


def mat_det(m) -> int:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def mat_adjugate(m):
    return [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]


def smith_normal_form(m):
    """U, D, V with M = U @ D @ V, U and V unimodular, D = diag(d1, d2),
    d1 | d2, both nonnegative. Exact over Python integers."""
    work = [row[:] for row in m]
    u = [[1, 0], [0, 1]]
    v = [[1, 0], [0, 1]]

    def _inv_unimodular(l):
        det = mat_det(l)
        assert det in (1, -1)
        return [[l[1][1] // det, -l[0][1] // det],
                [-l[1][0] // det, l[0][0] // det]]

    def row_op(l):  # work <- L work, with M = U L^-1 (L work) V
        nonlocal work, u
        work = mat_mul(l, work)
        u = mat_mul(u, _inv_unimodular(l))

    def col_op(r):  # work <- work R
        nonlocal work, v
        work = mat_mul(work, r)
        v = mat_mul(_inv_unimodular(r), v)

    def clear_row():
        a, b = work[0][0], work[1][0]
        if b == 0:
            return
        if a != 0 and b % a == 0:
            row_op([[1, 0], [-b // a, 1]])  # shear keeps |a| fixed
        else:
            g, s, t = _extended_gcd(a, b)
            row_op([[s, t], [-b // g, a // g]])

    def clear_col():
        a, b = work[0][0], work[0][1]
        if b == 0:
            return
        if a != 0 and b % a == 0:
            col_op([[1, -b // a], [0, 1]])
        else:
            g, s, t = _extended_gcd(a, b)
            col_op([[s, -b // g], [t, a // g]])

    for _ in range(256):
        clear_row()
        clear_col()
        if work[1][0] == 0 and work[0][1] == 0:
            if work[0][0] != 0 and work[1][1] % work[0][0] != 0:
                row_op([[1, 1], [0, 1]])  # expose d2 next to d1, re-reduce
                continue
            break
    else:  # pragma: no cover
        raise RuntimeError("Smith reduction did not terminate")

    for i in range(2):
        if work[i][i] < 0:
            sign = [[1, 0], [0, 1]]
            sign[i][i] = -1
            row_op(sign)
    return u, work, v


def _extended_gcd(a: int, b: int):
    """g, s, t with s*a + t*b = g = gcd(a, b), g >= 0 (g > 0 unless both 0)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def lattice_solutions(m, rhs: tuple[float, float]) -> np.ndarray:
    """All theta in [0, 2*pi)^2 with M theta = rhs (mod 2*pi).

    Returns a (|det M|, 2) float array. Distinct solutions correspond to
    cosets Z^2 / M Z^2, enumerated through the Smith normal form.
    """
    det = mat_det(m)
    if det == 0:
        raise ValueError("matrix must be nonsingular")
    w, det_abs, d1, d2 = coset_offsets(m)
    adj = mat_adjugate(m)
    base1 = (adj[0][0] * rhs[0] + adj[0][1] * rhs[1]) / det
    base2 = (adj[1][0] * rhs[0] + adj[1][1] * rhs[1]) / det
    i = np.repeat(np.arange(d1, dtype=np.int64), d2)
    j = np.tile(np.arange(d2, dtype=np.int64), d1)
    r1 = (w[0][0] * i + w[0][1] * j) % det_abs
    r2 = (w[1][0] * i + w[1][1] * j) % det_abs
    t1 = base1 + TWO_PI * r1.astype(np.float64) / det_abs
    t2 = base2 + TWO_PI * r2.astype(np.float64) / det_abs
    out = np.stack([np.mod(t1, TWO_PI), np.mod(t2, TWO_PI)], axis=1)
    return out


def coset_offsets(m):
    """Reduced offset matrix for enumerating Z^2 / M Z^2.

    Returns (W, |det|, d1, d2): lattice coset representative (i, j) with
    0 <= i < d1, 0 <= j < d2 has fractional angle (W @ (i, j)) mod |det|
    over |det|, per axis. Entries of W lie in [0, |det|) so int64
    arithmetic stays exact for desk-scale determinants.
    """
    det = mat_det(m)
    u, d, _ = smith_normal_form(m)
    d1, d2 = abs(d[0][0]), abs(d[1][1])
    w = mat_mul(mat_adjugate(m), u)
    det_abs = abs(det)
    if det < 0:
        w = [[-e for e in row] for row in w]
    w = [[e % det_abs for e in row] for row in w]
    return w, det_abs, d1, d2
