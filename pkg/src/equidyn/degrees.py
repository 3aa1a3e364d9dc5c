"""Dynamical degree profiles and the Lyapunov lower-bound constant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sphere import SphereMap
from .torus import TorusMap, mat_pow


@dataclass(frozen=True)
class DegreeProfile:
    """(d_0, ..., d_k) with d_k = d_t; dominant iff d_t > d_{k-1}."""

    degrees: tuple[float, ...]
    topological: float
    dominant: bool
    lyapunov_floor: float

    def __post_init__(self):
        assert self.degrees[0] == 1.0
        assert self.degrees[-1] == self.topological
        # log-concavity d_p^2 >= d_{p-1} d_{p+1}
        for p in range(1, len(self.degrees) - 1):
            assert (self.degrees[p] ** 2
                    >= self.degrees[p - 1] * self.degrees[p + 1] - 1e-12)


def _make_profile(degrees: tuple[float, ...]) -> DegreeProfile:
    d_t = degrees[-1]
    d_prev = degrees[-2]
    dominant = d_t > max(degrees[:-1])
    floor = 0.5 * math.log(d_t / d_prev) if d_prev > 0 else math.inf
    return DegreeProfile(degrees=degrees, topological=d_t,
                         dominant=dominant, lyapunov_floor=floor)


def profile_sphere(f: SphereMap) -> DegreeProfile:
    """(1, d); dominant iff d > 1."""
    return _make_profile((1.0, float(f.degree)))


def profile_torus(f: TorusMap) -> DegreeProfile:
    """(1, rho(A), |det A|), in closed form from trace and determinant."""
    rho = f.spectral_radius()
    return _make_profile((1.0, rho, float(abs(f.det))))


def verify_degree_growth(f: TorusMap, p: int, n_max: int) -> list[float]:
    """n-th roots of the norm growth of A^n (p=1) or |det A^n| (p=2)."""
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    if not 1 <= n_max <= 40:
        raise ValueError("n_max must be in 1..40")
    out = []
    for n in range(1, n_max + 1):
        an = mat_pow(f.matrix, n)
        if p == 1:
            norm = np.linalg.norm(np.array(an, dtype=np.float64), ord=2)
        else:
            norm = float(abs(an[0][0] * an[1][1] - an[0][1] * an[1][0]))
        out.append(norm ** (1.0 / n))
    return out
