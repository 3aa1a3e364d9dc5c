import math

import numpy as np
import pytest

from equidyn.errors import DegenerateMap, NotPeriodic, PrecisionExhausted
from equidyn.sphere import (SphereMap, SpherePoint, chebyshev_map,
                            chordal_distance, eval_sphere,
                            fixed_point_polynomial, iterate_sphere,
                            mobius_map, multiplier, power_map, quadratic_map,
                            wronskian_coefficients)


def rand_point(rng):
    if rng.random() < 0.1:
        return SpherePoint.infinity()
    z = complex(rng.normal(), rng.normal())
    return SpherePoint.affine(z)


def test_normalization_invariant():
    x = SpherePoint(3.0 + 4.0j, 1.0)
    assert max(abs(x.z0), abs(x.z1)) == 1.0
    y = SpherePoint(1e-200, 2e-200)
    assert max(abs(y.z0), abs(y.z1)) == 1.0
    with pytest.raises(ValueError):
        SpherePoint(0.0, 0.0)
    with pytest.raises(ValueError):
        SpherePoint(math.nan, 1.0)


def test_chordal_examples():
    x = SpherePoint.affine(1.0)
    assert chordal_distance(x, x) == 0.0
    assert chordal_distance(SpherePoint.affine(0.0),
                            SpherePoint.infinity()) == 1.0
    # |1*1 - (-1)*1| / (sqrt2 * sqrt2)
    d = chordal_distance(SpherePoint.affine(1.0), SpherePoint.affine(-1.0))
    assert abs(d - 1.0) < 1e-12


def test_chordal_metric_properties():
    rng = np.random.default_rng(5)
    for _ in range(200):
        x, y, z = (rand_point(rng) for _ in range(3))
        dxy = chordal_distance(x, y)
        assert abs(dxy - chordal_distance(y, x)) < 1e-14
        assert dxy <= chordal_distance(x, z) + chordal_distance(z, y) + 1e-12
        assert chordal_distance(x, x) < 1e-15


def test_eval_examples():
    f2 = power_map(2)
    assert chordal_distance(eval_sphere(f2, SpherePoint.affine(1.0)),
                            SpherePoint.affine(1.0)) < 1e-15
    assert chordal_distance(eval_sphere(f2, SpherePoint.affine(0.0)),
                            SpherePoint.affine(0.0)) < 1e-15
    cheb = chebyshev_map(2)
    # z^2 - 2 fixes 2 (solve z^2 - 2 = z by hand: roots 2 and -1)
    assert chordal_distance(eval_sphere(cheb, SpherePoint.affine(2.0)),
                            SpherePoint.affine(2.0)) < 1e-14


def test_eval_projective_invariance():
    rng = np.random.default_rng(11)
    f = quadratic_map(0.2 + 0.1j)
    for _ in range(100):
        z0 = complex(rng.normal(), rng.normal())
        z1 = complex(rng.normal(), rng.normal())
        if abs(z0) + abs(z1) < 1e-3:
            continue
        lam = complex(rng.normal(), rng.normal())
        if abs(lam) < 1e-3:
            continue
        a = eval_sphere(f, SpherePoint(z0, z1))
        b = eval_sphere(f, SpherePoint(lam * z0, lam * z1))
        assert chordal_distance(a, b) < 1e-10


def test_degenerate_map_rejected():
    # p and q share the root z = 1
    with pytest.raises(DegenerateMap):
        SphereMap([-1.0, 1.0, 0.0], [0.0, -1.0, 1.0])


def test_multiplier_examples():
    cheb = chebyshev_map(2)
    assert abs(multiplier(cheb, SpherePoint.affine(2.0), 1) - 4.0) < 1e-12
    assert abs(multiplier(cheb, SpherePoint.affine(-1.0), 1) + 2.0) < 1e-12
    f2 = power_map(2)
    assert abs(multiplier(f2, SpherePoint.affine(0.0), 1)) < 1e-12
    assert abs(multiplier(f2, SpherePoint.infinity(), 1)) < 1e-12
    # cycle multiplier: 7th roots of unity under z^2, period 3, |lambda| = 8
    w = SpherePoint.affine(np.exp(2j * np.pi / 7))
    assert abs(abs(multiplier(f2, w, 3)) - 8.0) < 1e-9


def test_multiplier_requires_periodicity():
    with pytest.raises(NotPeriodic):
        multiplier(power_map(2), SpherePoint.affine(0.5), 1)


def test_multiplier_vs_central_differences():
    # chain rule equals numerical derivative of the composed iterate
    for f in (power_map(2), chebyshev_map(2), quadratic_map(-0.4 + 0.1j)):
        for n, z in ((1, None), (2, None), (4, None)):
            pts = _periodic_samples(f, n)
            for z in pts:
                g = iterate_sphere(f, n)
                h = 1e-6
                p = np.polynomial.polynomial
                num = (p.polyval(z + h, g.p) / p.polyval(z + h, g.q)
                       - p.polyval(z - h, g.p) / p.polyval(z - h, g.q))
                approx = num / (2 * h)
                exact = multiplier(f, SpherePoint.affine(z), n)
                assert abs(approx - exact) <= 1e-6 * max(1.0, abs(exact))


def _periodic_samples(f, n):
    from equidyn.periodic import fixed_point_roots
    out = []
    for pt, mult in fixed_point_roots(f, n):
        if pt.is_infinity or mult != 1:
            continue
        z = pt.to_affine()
        if abs(z) < 3.0:
            out.append(complex(z))
    return out[:4]


def test_iterate_examples():
    f2 = power_map(2)
    ident = iterate_sphere(f2, 0)
    assert ident.degree == 1
    g = iterate_sphere(f2, 3)
    assert g.degree == 8
    scaled = g.p / g.p[-1]
    assert np.allclose(scaled, np.eye(9)[-1])  # z^8 exactly
    cheb = chebyshev_map(2)
    h = iterate_sphere(cheb, 2)
    # (z^2-2)^2 - 2 = z^4 - 4 z^2 + 2
    aff = h.p / h.p[-1]
    assert np.allclose(aff, [2.0, 0.0, -4.0, 0.0, 1.0], atol=1e-12)


def test_iterate_semigroup_pointwise():
    rng = np.random.default_rng(3)
    f = quadratic_map(0.1 - 0.2j)
    g23 = iterate_sphere(f, 5)
    g2, g3 = iterate_sphere(f, 2), iterate_sphere(f, 3)
    for _ in range(100):
        x = rand_point(rng)
        a = eval_sphere(g23, x)
        b = eval_sphere(g3, eval_sphere(g2, x))
        assert chordal_distance(a, b) < 1e-9


def test_iterate_budget():
    with pytest.raises(PrecisionExhausted):
        iterate_sphere(power_map(2), 20, max_degree=1000)


def test_wronskian_critical_points():
    w = wronskian_coefficients(power_map(2))
    # 4 z0 z1: critical points are 0 and infinity
    assert np.allclose(w, [0.0, 4.0, 0.0])


def test_fixed_point_polynomial_small():
    phi = fixed_point_polynomial(power_map(2), 1)
    # z0^2 z1 - z1^2 z0 -> roots 0, 1, infinity
    assert np.allclose(phi / phi[2], [0.0, -1.0, 1.0, 0.0])


def test_mobius_map_evaluates():
    m = mobius_map(1.0, 1.0, 0.0, 1.0)  # z + 1
    y = eval_sphere(m, SpherePoint.affine(1.0))
    assert abs(y.to_affine() - 2.0) < 1e-14
    assert eval_sphere(m, SpherePoint.infinity()).is_infinity
