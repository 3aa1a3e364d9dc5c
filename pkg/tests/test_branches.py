import numpy as np
import pytest

from equidyn.branches import (branch_statistics, critical_orbit, disc_boundary,
                              is_safe_disc, statistics_row, track_branches)
from equidyn.fibers import pullback_measure
from equidyn.sphere import (SpherePoint, chebyshev_map, chordal_distance,
                            eval_sphere, power_map, quadratic_map)


def _orbit_points(obs):
    return sorted((("inf" if p.is_infinity else
                    (round(p.to_affine().real, 6),
                     round(p.to_affine().imag, 6)))
                   for p in obs.points), key=str)


def test_critical_orbit_examples():
    obs2 = critical_orbit(power_map(2), 5)
    assert _orbit_points(obs2) == [(0.0, 0.0), "inf"]
    obs_c = critical_orbit(chebyshev_map(2), 5)
    assert _orbit_points(obs_c) == [(-2.0, 0.0), (2.0, 0.0), "inf"]
    # f = z^2 + i: critical value orbit i -> -1+i -> -i -> -1+i ...
    obs_i = critical_orbit(quadratic_map(1j), 3)
    pts = _orbit_points(obs_i)
    assert (0.0, 1.0) in pts and (-1.0, 1.0) in pts and (0.0, -1.0) in pts
    assert "inf" in pts
    # closure under one application of f up to depth
    for p in obs_i.points:
        img = eval_sphere(quadratic_map(1j), p)
        assert min(chordal_distance(img, q) for q in obs_i.points) < 1e-8


def test_disc_boundary_radius():
    center = SpherePoint.affine(0.5 + 0.2j)
    loop = disc_boundary(center, 0.07, 64)
    for z in loop:
        assert abs(chordal_distance(SpherePoint.affine(z), center)
                   - 0.07) < 1e-10


def test_track_all_alive_power_map():
    f = power_map(2)
    tr = track_branches(f, SpherePoint.affine(2.0), 0.1, 5)
    assert tr.alive_per_depth == [1, 2, 4, 8, 16, 32]
    surv, size_frac = branch_statistics(tr, 0.1)
    assert surv == 1.0 and size_frac == 1.0
    for rec in tr.alive:
        # anchor soundness: f^5(anchor) is the disc center
        cur = rec.anchor
        for _ in range(5):
            cur = eval_sphere(f, cur)
        assert chordal_distance(cur, SpherePoint.affine(2.0)) < 1e-7
        # monotone decay of diameters away from the critical set
        assert all(rec.diameters[i + 1] <= rec.diameters[i]
                   for i in range(len(rec.diameters) - 1))
        assert rec.diameters[-1] <= rec.diameters[0] / 16


def test_alive_anchors_subset_of_fiber():
    f = power_map(2)
    tr = track_branches(f, SpherePoint.affine(2.0), 0.1, 4)
    fiber_atoms = pullback_measure(f, SpherePoint.affine(2.0), 4).affine()
    for rec in tr.alive:
        z = rec.anchor.to_affine()
        assert np.abs(fiber_atoms - z).min() < 1e-6


def test_track_near_critical_dies_at_depth_one():
    tr = track_branches(power_map(2), SpherePoint.affine(0.05), 0.1, 3)
    assert tr.alive_per_depth[1] == 0
    assert all(r.status == "near_critical" and r.death_depth == 1
               for r in tr.records)


def test_track_order_zero():
    tr = track_branches(power_map(2), SpherePoint.affine(2.0), 0.1, 0)
    assert len(tr.records) == 1
    rec = tr.records[0]
    assert rec.status == "alive"
    assert abs(rec.diameters[0] - 0.2) < 5e-3  # disc diameter, two radii


def test_survival_monotone_across_orders():
    cheb = chebyshev_map(2)
    center = SpherePoint.affine(0.7)
    prev = 1.0
    for n in (2, 4, 6):
        tr = track_branches(cheb, center, 0.05, n)
        surv, _ = branch_statistics(tr, 0.1)
        assert surv <= prev + 1e-12
        prev = surv
    # per-depth fractions within one run are monotone too
    tr = track_branches(cheb, center, 0.05, 6)
    fr = tr.survival_fractions()
    assert all(fr[i + 1] <= fr[i] + 1e-12 for i in range(len(fr) - 1))


def test_statistics_row_and_empty_error():
    cheb = chebyshev_map(2)
    tr = track_branches(cheb, SpherePoint.affine(0.7), 0.05, 3)
    row = statistics_row(tr, 0.1)
    assert row["d_pow_n"] == 8
    assert 0.0 <= row["survival_fraction"] <= 1.0
    assert row["bound"] == pytest.approx((0.5 + 0.1) ** 1.5)
    tr.records = []
    with pytest.raises(ValueError):
        branch_statistics(tr, 0.1)


def test_is_safe_disc():
    cheb = chebyshev_map(2)
    obs = critical_orbit(cheb, 5)
    assert is_safe_disc(SpherePoint.affine(0.5), 0.03, obs)
    assert not is_safe_disc(SpherePoint.affine(1.99), 0.03, obs)


def test_boundary_samples_floor():
    with pytest.raises(ValueError):
        track_branches(power_map(2), SpherePoint.affine(2.0), 0.1, 2,
                       boundary_samples=32)
