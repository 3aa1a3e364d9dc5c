import math

import numpy as np
import pytest

from equidyn.errors import AtomBudgetExceeded, ExceptionalStart
from equidyn.fibers import (AtomicMeasure, fiber_sphere, fiber_torus,
                            pullback_measure, sample_equilibrium)
from equidyn.roots import roots_homogeneous
from equidyn.sphere import (SpherePoint, chebyshev_map, chordal_distance,
                            eval_sphere, iterate_sphere, power_map,
                            quadratic_map)
from equidyn.torus import TorusMap, TorusPoint, angle_distance


def _fiber_set(fiber):
    return sorted((round(fp.point.to_affine().real, 8),
                   round(fp.point.to_affine().imag, 8), fp.multiplicity)
                  for fp in fiber if not fp.point.is_infinity)


def test_fiber_sphere_examples():
    f2 = power_map(2)
    assert _fiber_set(fiber_sphere(f2, SpherePoint.affine(1.0))) == [
        (-1.0, 0.0, 1), (1.0, 0.0, 1)]
    double = fiber_sphere(f2, SpherePoint.affine(0.0))
    assert len(double) == 1 and double[0].multiplicity == 2
    assert abs(double[0].point.to_affine()) < 1e-8
    inf_fiber = fiber_sphere(f2, SpherePoint.infinity())
    assert len(inf_fiber) == 1 and inf_fiber[0].point.is_infinity
    assert inf_fiber[0].multiplicity == 2
    cheb = chebyshev_map(2)
    assert _fiber_set(fiber_sphere(cheb, SpherePoint.affine(2.0))) == [
        (-2.0, 0.0, 1), (2.0, 0.0, 1)]


def test_fiber_round_trip():
    rng = np.random.default_rng(2)
    for f in (quadratic_map(0.3 + 0.2j), chebyshev_map(3)):
        for _ in range(25):
            a = SpherePoint.affine(complex(rng.normal(), rng.normal()))
            for fp in fiber_sphere(f, a):
                assert chordal_distance(eval_sphere(f, fp.point), a) < 1e-8
            total = sum(fp.multiplicity for fp in fiber_sphere(f, a))
            assert total == f.degree


def test_fiber_torus_counts():
    a = TorusMap([[3, 1], [1, 2]])
    fib = fiber_torus(a, TorusPoint(0.0, 0.0))
    assert len(fib) == 5
    assert all(fp.multiplicity == 1 for fp in fib)
    for fp in fib:
        img = TorusPoint(3 * fp.point.theta1 + fp.point.theta2,
                         fp.point.theta1 + 2 * fp.point.theta2)
        assert angle_distance(img, TorusPoint(0.0, 0.0)) < 1e-8
    ident = TorusMap([[1, 0], [0, 1]])
    x = TorusPoint(1.0, 2.0)
    assert fiber_torus(ident, x)[0].point == x


def test_pullback_examples():
    f2 = power_map(2)
    mu0 = pullback_measure(f2, SpherePoint.affine(0.7), 0)
    assert len(mu0) == 1 and mu0.mass == 1.0
    mu3 = pullback_measure(f2, SpherePoint.affine(1.0), 3)
    assert len(mu3) == 8
    roots = np.sort(np.mod(np.angle(mu3.affine()), 2 * np.pi))
    assert np.allclose(roots, 2 * np.pi * np.arange(8) / 8, atol=1e-9)
    assert np.allclose(mu3.weights, 1 / 8)
    # totally invariant point stays a Dirac mass
    mu_d = pullback_measure(f2, SpherePoint.affine(0.0), 2)
    assert len(mu_d) == 1 and abs(mu_d.mass - 1.0) < 1e-12


def test_pullback_mass_and_refinement():
    cheb = chebyshev_map(2)
    a = SpherePoint.affine(0.3)
    for n in range(5):
        assert abs(pullback_measure(cheb, a, n).mass - 1.0) < 1e-9
    # refinement: atoms of level n+1 = union of fibers of level-n atoms
    mu4 = pullback_measure(cheb, a, 4)
    manual = []
    for pt in pullback_measure(cheb, a, 3).sphere_points():
        manual.extend(fp.point for fp in fiber_sphere(cheb, pt)
                      for _ in range(fp.multiplicity))
    got = np.sort_complex(mu4.affine())
    exp = np.sort_complex(np.array([p.to_affine() for p in manual]))
    assert np.abs(got - exp).max() < 1e-7


def test_pullback_vs_one_shot_polynomial_oracle():
    # independent route: all roots of the degree-d^n fixed equation
    f2 = power_map(2)
    mu = pullback_measure(f2, SpherePoint.affine(1.0), 3)
    g = iterate_sphere(f2, 3)
    coeffs = 1.0 * g.p - 1.0 * g.q  # fiber polynomial of a = 1
    oracle = []
    for pt, mult in roots_homogeneous(coeffs):
        oracle.extend([pt.to_affine()] * mult)
    exp = np.array(oracle)
    for z in mu.affine():
        assert np.abs(exp - z).min() < 1e-9
    assert len(exp) == len(mu)


def test_pullback_budget():
    with pytest.raises(AtomBudgetExceeded):
        pullback_measure(power_map(2), SpherePoint.affine(1.0), 10,
                         atom_budget=100)


def test_pullback_torus():
    a = TorusMap([[3, 1], [1, 2]])
    mu = pullback_measure(a, TorusPoint(0.5, 1.5), 3)
    assert len(mu) == 125
    assert abs(mu.mass - 1.0) < 1e-9


def test_sample_equilibrium_circle():
    f2 = power_map(2)
    mu = sample_equilibrium(f2, SpherePoint.affine(1 + 0.3j), burn_in=50,
                            count=500, seed=4)
    assert np.abs(np.abs(mu.affine()) - 1.0).max() < 1e-6
    again = sample_equilibrium(f2, SpherePoint.affine(1 + 0.3j), burn_in=50,
                               count=500, seed=4)
    assert np.array_equal(mu.points, again.points)


def test_sample_equilibrium_guards():
    f2 = power_map(2)
    with pytest.raises(ExceptionalStart):
        sample_equilibrium(f2, SpherePoint.affine(0.0), 10, 10, seed=1)
    with pytest.raises(ValueError):
        sample_equilibrium(f2, SpherePoint.affine(0.5), 10, 0, seed=1)


def test_sample_equilibrium_torus():
    a = TorusMap([[3, 1], [1, 2]])
    mu = sample_equilibrium(a, TorusPoint(0.3, 0.4), burn_in=20, count=400,
                            seed=9)
    assert abs(mu.mass - 1.0) < 1e-9
    assert mu.points.min() >= 0.0 and mu.points.max() < 2 * math.pi


def test_atomic_measure_validation():
    with pytest.raises(ValueError):
        AtomicMeasure("sphere", np.array([[1.0 + 0j, 1.0 + 0j]]),
                      np.array([-0.5]))
    mu = AtomicMeasure("sphere", np.array([[1.0 + 0j, 1.0 + 0j]]),
                       np.array([0.5]))
    with pytest.raises(ValueError):
        mu.require_probability()
