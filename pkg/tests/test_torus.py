import math

import numpy as np
import pytest

from equidyn.torus import (TWO_PI, TorusMap, TorusPoint, eval_torus,
                           lattice_solutions, mat_det, mat_mul, mat_pow,
                           smith_normal_form)


def test_eval_examples():
    ident = TorusMap([[1, 0], [0, 1]])
    x = TorusPoint(1.2, 4.5)
    assert eval_torus(ident, x) == x
    a = TorusMap([[3, 1], [1, 2]])
    assert eval_torus(a, TorusPoint(0, 0)) == TorusPoint(0, 0)
    y = eval_torus(a, TorusPoint(math.pi, 0.0))
    # (3 pi mod 2 pi, pi) = (pi, pi)
    assert abs(y.theta1 - math.pi) < 1e-12
    assert abs(y.theta2 - math.pi) < 1e-12


def test_angle_reduction():
    p = TorusPoint(-0.5, 7.0)
    assert 0.0 <= p.theta1 < TWO_PI
    assert 0.0 <= p.theta2 < TWO_PI
    with pytest.raises(ValueError):
        TorusPoint(math.inf, 0.0)


def test_singular_matrix_rejected():
    with pytest.raises(ValueError):
        TorusMap([[1, 1], [1, 1]])


def test_smith_normal_form_properties():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 200:
        m = rng.integers(-9, 10, size=(2, 2)).tolist()
        if mat_det(m) == 0:
            continue
        checked += 1
        u, d, v = smith_normal_form(m)
        assert mat_mul(mat_mul(u, d), v) == m
        assert abs(mat_det(u)) == 1 and abs(mat_det(v)) == 1
        assert d[0][1] == 0 and d[1][0] == 0
        assert d[0][0] >= 0 and d[1][1] >= 0
        assert d[1][1] % max(d[0][0], 1) == 0
        assert d[0][0] * d[1][1] == abs(mat_det(m))


def _brute_force_fiber(m, rhs, det_abs):
    """Oracle: scan a large lattice window and dedupe angles mod 2 pi."""
    seen = set()
    out = []
    bound = 3 * det_abs + 5
    det = mat_det(m)
    adj = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
    for k1 in range(-bound, bound):
        for k2 in range(-bound, bound):
            t1 = (adj[0][0] * (rhs[0] + TWO_PI * k1)
                  + adj[0][1] * (rhs[1] + TWO_PI * k2)) / det
            t2 = (adj[1][0] * (rhs[0] + TWO_PI * k1)
                  + adj[1][1] * (rhs[1] + TWO_PI * k2)) / det
            key = (round((t1 / TWO_PI) % 1.0, 9) % 1.0,
                   round((t2 / TWO_PI) % 1.0, 9) % 1.0)
            if key not in seen:
                seen.add(key)
                out.append(key)
            if len(out) == det_abs:
                return sorted(out)
    return sorted(out)


@pytest.mark.parametrize("matrix,rhs", [
    ([[2, 0], [0, 2]], (0.0, 0.0)),
    ([[3, 1], [1, 2]], (0.0, 0.0)),
    ([[3, 1], [1, 2]], (1.1, 2.7)),
    ([[2, 1], [1, 1]], (0.3, 0.4)),
    ([[-2, 3], [1, 2]], (0.0, 5.0)),
])
def test_lattice_solutions_vs_brute_force(matrix, rhs):
    det_abs = abs(mat_det(matrix))
    sols = lattice_solutions(matrix, rhs)
    assert len(sols) == det_abs
    got = sorted((round((t1 / TWO_PI) % 1.0, 9) % 1.0,
                  round((t2 / TWO_PI) % 1.0, 9) % 1.0) for t1, t2 in sols)
    expect = _brute_force_fiber(matrix, rhs, det_abs)
    assert len(expect) == det_abs
    for a, b in zip(got, expect):
        assert abs(a[0] - b[0]) < 1e-7 and abs(a[1] - b[1]) < 1e-7


def test_halving_map_fiber():
    sols = lattice_solutions([[2, 0], [0, 2]], (0.0, 0.0))
    got = sorted((round(t1, 6), round(t2, 6)) for t1, t2 in sols)
    pi6 = round(math.pi, 6)
    assert got == [(0.0, 0.0), (0.0, pi6), (pi6, 0.0), (pi6, pi6)]


def test_mat_pow_exact():
    a = [[3, 1], [1, 2]]
    a2 = mat_pow(a, 2)
    assert a2 == [[10, 5], [5, 5]]
    a40 = mat_pow(a, 40)
    # stays exact far beyond int64
    assert mat_det(a40) == 5 ** 40
