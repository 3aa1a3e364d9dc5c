"""equidyn: numerical laboratory for equidistribution phenomena of
rational self-maps of the Riemann sphere and monomial self-maps of the
2-torus."""

from ._kernels import backend_name
from .branches import (BranchRecord, BranchTracking, ObstructionSet,
                       branch_statistics, critical_orbit, is_safe_disc,
                       track_branches)
from .degrees import DegreeProfile, profile_sphere, profile_torus, \
    verify_degree_growth
from .exceptional import (ExceptionalSet, find_exceptional, lambda_n,
                          verify_invariance)
from .fibers import (AtomicMeasure, FiberPoint, fiber_sphere, fiber_torus,
                     pullback_measure, sample_equilibrium)
from .lyapunov import LyapunovEstimate, estimate_sphere, estimate_torus
from .measures import (MeasureDistanceReport, ReferenceMeasure, binned_tv,
                       ks_distance, lipschitz_gap, measure_report)
from .periodic import (PeriodicPoint, periodic_algebraic, periodic_measure,
                       periodic_torus, periodic_torus_count,
                       periodic_via_branches, torus_periodic_bin_masses)
from .sphere import (SphereMap, SpherePoint, chebyshev_map, chordal_distance,
                     eval_sphere, from_affine_polynomial, iterate_sphere,
                     mobius_map, multiplier, power_map, quadratic_map,
                     spherical_derivative_norm)
from .torus import TorusMap, TorusPoint, eval_torus

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure", "BranchRecord", "BranchTracking", "DegreeProfile",
    "ExceptionalSet", "FiberPoint", "LyapunovEstimate",
    "MeasureDistanceReport", "ObstructionSet", "PeriodicPoint",
    "ReferenceMeasure", "SphereMap", "SpherePoint", "TorusMap", "TorusPoint",
    "backend_name", "binned_tv", "branch_statistics", "chebyshev_map",
    "chordal_distance", "critical_orbit", "estimate_sphere", "estimate_torus",
    "eval_sphere", "eval_torus", "fiber_sphere", "fiber_torus",
    "find_exceptional", "from_affine_polynomial", "is_safe_disc",
    "iterate_sphere", "ks_distance", "lambda_n", "lipschitz_gap",
    "measure_report", "mobius_map", "multiplier", "periodic_algebraic",
    "periodic_measure", "periodic_torus", "periodic_torus_count",
    "periodic_via_branches", "power_map", "profile_sphere", "profile_torus",
    "pullback_measure", "quadratic_map", "sample_equilibrium",
    "spherical_derivative_norm", "torus_periodic_bin_masses",
    "track_branches", "verify_degree_growth", "verify_invariance",
    "__version__",
]
