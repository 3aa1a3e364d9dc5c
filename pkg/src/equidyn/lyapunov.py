"""Lyapunov exponent of the equilibrium measure and the degree bound.

On P^1 the smallest exponent is estimated as the spatial average of
log ||Df|| (spherical derivative norm) over equilibrium samples; for
monomial torus maps the exponents are exact logs of eigenvalue moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .degrees import profile_sphere, profile_torus
from .errors import DerivativeSingular, NotDominant
from .fibers import AtomicMeasure
from .sphere import SphereMap, spherical_derivative_norm
from .torus import TorusMap

#: atoms with spherical derivative below this are skipped (and counted)
SINGULAR_NORM_TOL = 1e-12
#: estimates abort above this skipped fraction
MAX_SKIP_FRACTION = 0.01


@dataclass(frozen=True)
class LyapunovEstimate:
    chi: float
    stderr: float
    sample_count: int
    floor: float
    floor_satisfied: bool
    skipped: int = 0

    def rows(self):
        return [("chi", self.chi), ("stderr", self.stderr),
                ("sample_count", self.sample_count), ("floor", self.floor),
                ("floor_satisfied", self.floor_satisfied),
                ("skipped", self.skipped)]


def _finish(chi: float, stderr: float, count: int, floor: float,
            skipped: int = 0) -> LyapunovEstimate:
    return LyapunovEstimate(chi=chi, stderr=stderr, sample_count=count,
                            floor=floor,
                            floor_satisfied=chi >= floor - 2.0 * stderr,
                            skipped=skipped)


def estimate_sphere(f: SphereMap, samples: AtomicMeasure) -> LyapunovEstimate:
    """chi = mean of log ||Df|| over equilibrium samples, with standard
    error; floor = (1/2) log d."""
    if samples.space != "sphere":
        raise ValueError("samples must live on the sphere")
    if len(samples) < 1000:
        raise ValueError("need at least 1000 samples")
    profile = profile_sphere(f)
    if not profile.dominant:
        raise NotDominant("Lyapunov bound requires degree >= 2")
    logs = []
    skipped = 0
    for pt in samples.sphere_points():
        norm = spherical_derivative_norm(f, pt)
        if norm < SINGULAR_NORM_TOL:
            skipped += 1
            continue
        logs.append(math.log(norm))
    n = len(logs)
    if skipped > MAX_SKIP_FRACTION * len(samples):
        raise DerivativeSingular(
            f"{skipped} of {len(samples)} atoms sat on critical points")
    mean = sum(logs) / n
    var = sum((v - mean) ** 2 for v in logs) / max(n - 1, 1)
    stderr = math.sqrt(var / n)
    return _finish(mean, stderr, n, profile.lyapunov_floor, skipped)


def estimate_torus(f: TorusMap) -> LyapunovEstimate:
    """Exact: chi = log of the smallest eigenvalue modulus of A; floor =
    (1/2) log(|det A| / rho(A))."""
    profile = profile_torus(f)
    if not profile.dominant:
        raise NotDominant(
            "torus map is not of dominant topological degree; the "
            "Lyapunov floor is undefined")
    moduli = sorted(abs(e) for e in f.eigenvalues())
    chi = math.log(moduli[0])
    return _finish(chi, 0.0, 0, profile.lyapunov_floor)
