import math

import numpy as np
import pytest

from equidyn.errors import NotDominant
from equidyn.fibers import sample_equilibrium
from equidyn.lyapunov import estimate_sphere, estimate_torus
from equidyn.sphere import (SpherePoint, chebyshev_map, power_map,
                            spherical_derivative_norm)
from equidyn.torus import TorusMap


def test_power_map_exact():
    # ||Df|| = 2 at every point of the unit circle, so chi = log 2 exactly
    f = power_map(2)
    mu = sample_equilibrium(f, SpherePoint.affine(1 + 0.3j), 50, 2000, seed=1)
    est = estimate_sphere(f, mu)
    assert abs(est.chi - math.log(2.0)) < 1e-12
    assert est.stderr < 1e-12
    assert est.floor == pytest.approx(0.5 * math.log(2.0))
    assert est.floor_satisfied


def test_chebyshev_vs_quadrature_oracle():
    # oracle: integrate log ||Df|| against arcsine via theta = arccos(z/2)
    cheb = chebyshev_map(2)
    theta = (np.arange(200001) + 0.5) * math.pi / 200001
    z = 2.0 * np.cos(theta)
    fz = z * z - 2.0
    norm = np.abs(2 * z) * (1 + z ** 2) / (1 + fz ** 2)
    oracle = np.log(norm).mean()
    assert abs(oracle - math.log(2.0)) < 1e-3  # capacity identity
    mu = sample_equilibrium(cheb, SpherePoint.affine(0.3), 100, 4000, seed=2)
    est = estimate_sphere(cheb, mu)
    assert abs(est.chi - oracle) < 0.02
    assert est.floor_satisfied


def test_spherical_norm_chart_independent():
    f = chebyshev_map(2)
    rng = np.random.default_rng(4)
    for _ in range(50):
        z = complex(rng.normal(), rng.normal())
        a = spherical_derivative_norm(f, SpherePoint.affine(z))
        # same point built from a scaled homogeneous pair
        lam = complex(rng.normal(), rng.normal())
        if abs(lam) < 1e-3:
            continue
        b = spherical_derivative_norm(f, SpherePoint(lam * z, lam))
        assert abs(a - b) <= 1e-9 * max(1.0, a)


def test_stderr_scaling():
    cheb = chebyshev_map(2)
    ests = []
    for count in (2000, 4000):
        mu = sample_equilibrium(cheb, SpherePoint.affine(0.3), 100, count,
                                seed=7)
        ests.append(estimate_sphere(cheb, mu))
    ratio = ests[1].stderr / ests[0].stderr
    assert abs(ratio - 1.0 / math.sqrt(2.0)) < 0.2


def test_sample_count_floor():
    f = power_map(2)
    mu = sample_equilibrium(f, SpherePoint.affine(1 + 0.3j), 10, 100, seed=1)
    with pytest.raises(ValueError):
        estimate_sphere(f, mu)


def test_torus_exact():
    a = TorusMap([[3, 1], [1, 2]])
    est = estimate_torus(a)
    assert abs(est.chi - math.log((5.0 - math.sqrt(5.0)) / 2.0)) < 1e-14
    assert abs(est.floor - 0.5 * math.log(5.0 / ((5 + math.sqrt(5)) / 2))) \
        < 1e-14
    assert est.floor_satisfied and est.stderr == 0.0
    two_i = estimate_torus(TorusMap([[2, 0], [0, 2]]))
    assert abs(two_i.chi - math.log(2.0)) < 1e-14
    assert abs(two_i.floor - 0.5 * math.log(2.0)) < 1e-14


def test_torus_not_dominant_refused():
    with pytest.raises(NotDominant):
        estimate_torus(TorusMap([[2, 1], [1, 1]]))
