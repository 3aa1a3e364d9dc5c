import math

import numpy as np
import pytest

from equidyn.errors import ProjectionFailure, SpaceMismatch
from equidyn.fibers import AtomicMeasure, pullback_measure
from equidyn.measures import (MeasureDistanceReport, ReferenceMeasure,
                              arcsine_cdf, binned_tv, ks_distance,
                              lipschitz_gap, measure_report, reference_atoms)
from equidyn.sphere import SpherePoint, chebyshev_map, chordal_distance


def circle_atoms(n, offset=0.0):
    ang = 2 * np.pi * np.arange(n) / n + offset
    pts = np.stack([np.exp(1j * ang), np.ones(n, complex)], axis=1)
    return AtomicMeasure("sphere", pts, np.full(n, 1.0 / n))


def dirac(z):
    return AtomicMeasure("sphere", np.array([[complex(z), 1.0 + 0j]]),
                         np.array([1.0]))


def test_binned_tv_examples():
    circ = ReferenceMeasure.circle_haar()
    assert binned_tv(circle_atoms(8), circ, 8) == 0.0
    assert abs(binned_tv(dirac(1.0), circ, 8) - 0.875) < 1e-12
    assert binned_tv(dirac(0.0), circ, 8) == 1.0  # off the circle entirely


def test_binned_tv_identical_atoms():
    mu = circle_atoms(16)
    assert binned_tv(mu, ReferenceMeasure.sampled(mu), 8) < 1e-12
    assert lipschitz_gap(mu, mu, seed=0) < 1e-12


def test_binned_tv_monotone_in_quantile_count():
    # quantile atoms: angles (k + 1/2) / N, i.e. half-spacing offset
    circ = ReferenceMeasure.circle_haar()
    last = math.inf
    for j in range(3, 9):
        n = 2 ** j
        tv = binned_tv(circle_atoms(n, offset=math.pi / n), circ, 8)
        assert tv <= last + 1e-12
        last = tv
    assert last == 0.0


def test_binned_tv_symmetry_between_atomic_measures():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = circle_atoms(rng.integers(4, 30))
        b = circle_atoms(rng.integers(4, 30), offset=0.3)
        assert abs(binned_tv(a, ReferenceMeasure.sampled(b), 8)
                   - binned_tv(b, ReferenceMeasure.sampled(a), 8)) < 1e-12


def test_space_mismatch():
    torus_mu = AtomicMeasure("torus", np.array([[0.1, 0.2]]),
                             np.array([1.0]))
    with pytest.raises(SpaceMismatch):
        binned_tv(torus_mu, ReferenceMeasure.circle_haar(), 8)
    with pytest.raises(SpaceMismatch):
        lipschitz_gap(torus_mu, dirac(1.0), seed=0)


def test_ks_examples():
    arc = ReferenceMeasure.arcsine(-2.0, 2.0)
    n = 64
    q = (np.arange(n) + 0.5) / n
    x = 2 * np.sin(np.pi * (q - 0.5))
    mu = AtomicMeasure(
        "sphere", np.stack([x.astype(complex), np.ones(n, complex)], 1),
        np.full(n, 1.0 / n))
    assert ks_distance(mu, arc) <= 1.0 / (2 * n) + 1e-9
    assert abs(ks_distance(dirac(0.0), arc) - 0.5) < 1e-12
    assert ks_distance(circle_atoms(32), ReferenceMeasure.circle_haar()) \
        <= 1.0 / 32 + 1e-12


def test_ks_projection_failure():
    arc = ReferenceMeasure.arcsine(-2.0, 2.0)
    with pytest.raises(ProjectionFailure):
        ks_distance(dirac(0.5 + 0.3j), arc)


def test_arcsine_cdf_endpoints():
    assert arcsine_cdf(np.array([-2.0]), -2, 2)[0] == 0.0
    assert arcsine_cdf(np.array([2.0]), -2, 2)[0] == 1.0
    assert abs(arcsine_cdf(np.array([0.0]), -2, 2)[0] - 0.5) < 1e-15


def test_lipschitz_properties():
    d0, d1 = dirac(0.0), dirac(1.0)
    gap = lipschitz_gap(d0, d1, seed=3)
    bound = chordal_distance(SpherePoint.affine(0.0), SpherePoint.affine(1.0))
    assert 0.0 < gap <= bound + 1e-12
    # symmetry and triangle inequality with a shared seed/test set
    rng = np.random.default_rng(8)
    for _ in range(5):
        a = circle_atoms(int(rng.integers(4, 20)))
        b = circle_atoms(int(rng.integers(4, 20)), offset=0.4)
        c = dirac(complex(rng.normal(), rng.normal()))
        gab = lipschitz_gap(a, b, seed=11)
        assert abs(gab - lipschitz_gap(b, a, seed=11)) < 1e-12
        assert gab <= lipschitz_gap(a, c, seed=11) \
            + lipschitz_gap(c, b, seed=11) + 1e-12


def test_pullback_gap_shrinks():
    cheb = chebyshev_map(2)
    a = SpherePoint.affine(0.3)
    mu10 = pullback_measure(cheb, a, 10)
    mu11 = pullback_measure(cheb, a, 11)
    assert lipschitz_gap(mu10, mu11, seed=5) < 0.05


def test_measure_report():
    quantile = reference_atoms(ReferenceMeasure.circle_haar(), 256)
    rep = measure_report(quantile, ReferenceMeasure.circle_haar(),
                         bins_per_axis=16, seed=2, test_count=64)
    assert isinstance(rep, MeasureDistanceReport)
    assert rep.binned_tv < 1e-9
    assert rep.ks_1d < 0.01
    assert rep.lipschitz_gap < 0.05
    tor = measure_report(reference_atoms(ReferenceMeasure.torus_haar(), 256),
                         ReferenceMeasure.torus_haar(), bins_per_axis=4,
                         seed=2, test_count=64)
    assert math.isnan(tor.ks_1d)
    assert tor.binned_tv < 1e-9


def test_bins_precondition():
    with pytest.raises(ValueError):
        binned_tv(circle_atoms(8), ReferenceMeasure.circle_haar(), 3)
