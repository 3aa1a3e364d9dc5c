"""Homogeneous-coordinate kernel for rational self-maps of P^1.

Points are pairs [z0 : z1] normalized so the larger-modulus component
is exactly 1.0; maps are pairs of degree-d homogeneous bivariate
polynomials stored as ascending z0-power coefficient vectors
(coeff[j] multiplies z0**j * z1**(d-j)). Derivatives are always taken
by the chain rule along orbits in adapted affine charts, never by
differentiating composed coefficient polynomials.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (ChartSingularity, DegenerateImage, DegenerateMap,
                     NotPeriodic, PrecisionExhausted)

#: relative tolerance for resultant / near-indeterminacy degeneracy
DEGENERACY_TOL = 1e-10
#: residual below which a point counts as fixed for f^n
FIXED_POINT_TOL = 1e-8


def _require_finite_complex(z: complex, what: str) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} must have finite components, got {z!r}")
    return z


class SpherePoint:
    """A point of P^1 in normalized homogeneous coordinates."""

    __slots__ = ("z0", "z1")

    def __init__(self, z0: complex, z1: complex):
        z0 = _require_finite_complex(z0, "z0")
        z1 = _require_finite_complex(z1, "z1")
        if z0 == 0 and z1 == 0:
            raise ValueError("(0, 0) is not a point of P^1")
        if abs(z1) >= abs(z0):
            object.__setattr__(self, "z0", z0 / z1)
            object.__setattr__(self, "z1", 1.0 + 0.0j)
        else:
            object.__setattr__(self, "z0", 1.0 + 0.0j)
            object.__setattr__(self, "z1", z1 / z0)

    def __setattr__(self, name, value):
        raise AttributeError("SpherePoint is immutable")

    @classmethod
    def affine(cls, z: complex) -> "SpherePoint":
        return cls(complex(z), 1.0)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(1.0, 0.0)

    @property
    def is_infinity(self) -> bool:
        return self.z1 == 0

    @property
    def is_affine_chart(self) -> bool:
        """True when stored as (t, 1), i.e. |z0| <= |z1|."""
        return self.z1 == 1.0 + 0.0j

    def to_affine(self) -> complex:
        """Affine coordinate z0/z1; complex infinity for [1:0]."""
        if self.is_affine_chart:
            return self.z0
        if self.z1 == 0:
            return complex(math.inf, 0.0)
        return 1.0 / self.z1

    def __repr__(self):
        return f"SpherePoint({self.z0!r}, {self.z1!r})"

    def __eq__(self, other):
        return (isinstance(other, SpherePoint)
                and self.z0 == other.z0 and self.z1 == other.z1)

    def __hash__(self):
        return hash((self.z0, self.z1))


def chordal_distance(x: SpherePoint, y: SpherePoint) -> float:
    """|z0(x)z1(y) - z1(x)z0(y)| / (||x|| ||y||), in [0, 1]."""
    cross = x.z0 * y.z1 - x.z1 * y.z0
    nx = math.hypot(abs(x.z0), abs(x.z1))
    ny = math.hypot(abs(y.z0), abs(y.z1))
    return min(1.0, abs(cross) / (nx * ny))


def chordal_distance_affine(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Vectorized chordal distance between finite affine points."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    az2 = np.abs(z) ** 2
    aw2 = np.abs(w) ** 2
    return np.abs(z - w) / np.sqrt((1.0 + az2) * (1.0 + aw2))


def _sylvester_log_abs_resultant(p: np.ndarray, q: np.ndarray, d: int) -> float:
    n = 2 * d
    syl = np.zeros((n, n), dtype=np.complex128)
    # rows are shifted copies; vectors taken in descending z0-power
    pd = p[::-1]
    qd = q[::-1]
    for i in range(d):
        syl[i, i:i + d + 1] = pd
        syl[d + i, i:i + d + 1] = qd
    sign, logabs = np.linalg.slogdet(syl)
    if sign == 0:
        return -math.inf
    return float(logabs)


class SphereMap:
    """Rational self-map [p : q] of P^1, both of homogeneous degree d."""

    __slots__ = ("p", "q", "degree")

    def __init__(self, p, q, *, check: bool = True):
        p = np.ascontiguousarray(p, dtype=np.complex128)
        q = np.ascontiguousarray(q, dtype=np.complex128)
        if p.ndim != 1 or q.ndim != 1 or len(p) != len(q):
            raise ValueError("p and q must be coefficient vectors of equal length")
        if len(p) < 2:
            raise ValueError("degree must be at least 1")
        if not (np.isfinite(p).all() and np.isfinite(q).all()):
            raise ValueError("coefficients must be finite")
        scale = max(np.abs(p).max(), np.abs(q).max())
        if scale == 0:
            raise ValueError("zero map")
        d = len(p) - 1
        p = p / scale
        q = q / scale
        if check:
            logres = _sylvester_log_abs_resultant(p, q, d)
            if logres < math.log(DEGENERACY_TOL):
                raise DegenerateMap(
                    f"p and q share a root on P^1 (log|Res| = {logres:.2f})")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "degree", d)

    def __setattr__(self, name, value):
        raise AttributeError("SphereMap is immutable")

    def __repr__(self):
        return f"SphereMap(degree={self.degree})"

    def __call__(self, x: SpherePoint) -> SpherePoint:
        return eval_sphere(self, x)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def from_affine_polynomial(coeffs) -> SphereMap:
    """Map z -> P(z) for an affine polynomial, ascending coefficients."""
    c = np.asarray(coeffs, dtype=np.complex128)
    d = len(c) - 1
    if d < 1:
        raise ValueError("polynomial degree must be >= 1")
    q = np.zeros(d + 1, dtype=np.complex128)
    q[0] = 1.0
    return SphereMap(c, q)


def power_map(d: int) -> SphereMap:
    """z -> z**d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    c = np.zeros(d + 1, dtype=np.complex128)
    c[d] = 1.0
    return from_affine_polynomial(c)


def chebyshev_map(d: int = 2) -> SphereMap:
    """Degree-d Chebyshev map on [-2, 2]: C_d(2 cos t) = 2 cos(d t)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    prev = np.array([2.0], dtype=np.complex128)   # C_0 = 2
    cur = np.array([0.0, 1.0], dtype=np.complex128)  # C_1 = z
    for _ in range(d - 1):
        nxt = np.zeros(len(cur) + 1, dtype=np.complex128)
        nxt[1:] = cur
        nxt[:len(prev)] -= prev
        prev, cur = cur, nxt
    return from_affine_polynomial(cur)


def quadratic_map(c: complex) -> SphereMap:
    """z -> z**2 + c."""
    return from_affine_polynomial([complex(c), 0.0, 1.0])


def mobius_map(a: complex, b: complex, c: complex, d: complex) -> SphereMap:
    """z -> (a z + b)/(c z + d)."""
    return SphereMap([b, a], [d, c])


# ---------------------------------------------------------------------------
# evaluation and derivatives
# ---------------------------------------------------------------------------


def _chart_values(f: SphereMap, x: SpherePoint):
    """(a, b) = (p, q) at x, evaluated in x's adapted chart."""
    if x.is_affine_chart:
        t = x.z0
        a = complex(np.polynomial.polynomial.polyval(t, f.p))
        b = complex(np.polynomial.polynomial.polyval(t, f.q))
    else:
        u = x.z1
        a = complex(np.polynomial.polynomial.polyval(u, f.p[::-1]))
        b = complex(np.polynomial.polynomial.polyval(u, f.q[::-1]))
    return a, b


def eval_sphere(f: SphereMap, x: SpherePoint) -> SpherePoint:
    """Evaluate [p(x) : q(x)], renormalized."""
    a, b = _chart_values(f, x)
    if max(abs(a), abs(b)) < DEGENERACY_TOL:
        raise DegenerateImage(
            f"both components below {DEGENERACY_TOL} at {x!r}")
    return SpherePoint(a, b)


def _horner_with_derivative(c: np.ndarray, t: complex):
    v = complex(c[-1])
    d = 0.0 + 0.0j
    for j in range(len(c) - 2, -1, -1):
        d = d * t + v
        v = v * t + complex(c[j])
    return v, d


def _local_step(f: SphereMap, x: SpherePoint, force_affine_target=None):
    """One application of f with the local chart derivative.

    Returns (image, local derivative, kappa_src, kappa_dst) where kappa
    is 1 + |t|^2 in the respective adapted chart, so the spherical
    derivative norm is |D| * kappa_src / kappa_dst.
    """
    if x.is_affine_chart:
        t = x.z0
        a, da = _horner_with_derivative(f.p, t)
        b, db = _horner_with_derivative(f.q, t)
    else:
        t = x.z1
        a, da = _horner_with_derivative(f.p[::-1], t)
        b, db = _horner_with_derivative(f.q[::-1], t)
    if max(abs(a), abs(b)) < DEGENERACY_TOL:
        raise ChartSingularity(f"orbit too close to indeterminacy at {x!r}")
    w = da * b - a * db
    affine_target = abs(b) >= abs(a) if force_affine_target is None \
        else force_affine_target
    if affine_target:
        if b == 0:
            raise ChartSingularity("affine target chart unusable at pole")
        deriv = w / (b * b)
        t_dst = a / b
    else:
        if a == 0:
            raise ChartSingularity("inverse target chart unusable at pole")
        deriv = -w / (a * a)
        t_dst = b / a
    kappa_src = 1.0 + abs(t) ** 2
    kappa_dst = 1.0 + abs(t_dst) ** 2
    return SpherePoint(a, b), deriv, kappa_src, kappa_dst


def orbit(f: SphereMap, x: SpherePoint, n: int) -> list[SpherePoint]:
    pts = [x]
    for _ in range(n):
        pts.append(eval_sphere(f, pts[-1]))
    return pts


def multiplier(f: SphereMap, x: SpherePoint, n: int) -> complex:
    """Derivative of f^n at a (numerically) period-n point of f.

    Chain rule along the orbit with chart-consistent local derivatives;
    the last step is forced back into x's own chart so the product is
    the genuine cycle multiplier.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = orbit(f, x, n)
    res = chordal_distance(pts[-1], x)
    if res > FIXED_POINT_TOL:
        raise NotPeriodic(
            f"residual {res:.3e} exceeds {FIXED_POINT_TOL} for period {n}")
    prod = 1.0 + 0.0j
    cur = x
    for i in range(n):
        force = x.is_affine_chart if i == n - 1 else None
        cur, deriv, _, _ = _local_step(f, cur, force_affine_target=force)
        prod *= deriv
    return prod


def spherical_derivative_norm(f: SphereMap, x: SpherePoint) -> float:
    """Norm of Df at x in the spherical (stereographic) metric."""
    _, deriv, ks, kd = _local_step(f, x)
    return abs(deriv) * ks / kd


# ---------------------------------------------------------------------------
# iteration by homogeneous composition
# ---------------------------------------------------------------------------


def _compose(outer: SphereMap, inner_p: np.ndarray, inner_q: np.ndarray):
    """Coefficients of outer o [inner_p : inner_q], jointly sup-normalized."""
    d = outer.degree
    e = len(inner_p) - 1
    ppow = [np.ones(1, dtype=np.complex128)]
    qpow = [np.ones(1, dtype=np.complex128)]
    for _ in range(d):
        ppow.append(np.convolve(ppow[-1], inner_p))
        qpow.append(np.convolve(qpow[-1], inner_q))
    out_deg = d * e
    rp = np.zeros(out_deg + 1, dtype=np.complex128)
    rq = np.zeros(out_deg + 1, dtype=np.complex128)
    for j in range(d + 1):
        term = np.convolve(ppow[j], qpow[d - j])
        rp += outer.p[j] * term
        rq += outer.q[j] * term
    scale = max(np.abs(rp).max(), np.abs(rq).max())
    if scale == 0 or not (np.isfinite(rp).all() and np.isfinite(rq).all()):
        raise PrecisionExhausted("coefficient blow-up during composition")
    return rp / scale, rq / scale


def iterate_sphere(f: SphereMap, n: int, max_degree: int = 16384) -> SphereMap:
    """f^n as a homogeneous map of degree d**n, rescaled per step."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return SphereMap([0.0, 1.0], [1.0, 0.0], check=False)
    if f.degree ** n > max_degree:
        raise PrecisionExhausted(
            f"degree {f.degree}**{n} exceeds budget {max_degree}")
    p, q = f.p, f.q
    for _ in range(n - 1):
        p, q = _compose(f, p, q)
    return SphereMap(p, q, check=False)


def fixed_point_polynomial(f: SphereMap, n: int,
                           max_degree: int = 16384) -> np.ndarray:
    """Coefficients of p_n(z0,z1) z1 - q_n(z0,z1) z0 for (p_n, q_n) = f^n.

    Homogeneous of degree d**n + 1; its P^1 roots are the period-n
    points counted with multiplicity.
    """
    g = iterate_sphere(f, n, max_degree=max_degree)
    deg = len(g.p)  # d**n + 1 coefficients -> output has deg + 1
    phi = np.zeros(deg + 1, dtype=np.complex128)
    phi[:deg] += g.p
    phi[1:] -= g.q
    return phi


def wronskian_coefficients(f: SphereMap) -> np.ndarray:
    """Homogeneous Wronskian p_z0 q_z1 - p_z1 q_z0 of degree 2d - 2."""
    d = f.degree
    j = np.arange(d)
    p_z0 = (j + 1) * f.p[1:]
    q_z0 = (j + 1) * f.q[1:]
    p_z1 = (d - j) * f.p[:-1]
    q_z1 = (d - j) * f.q[:-1]
    return np.convolve(p_z0, q_z1) - np.convolve(p_z1, q_z0)
