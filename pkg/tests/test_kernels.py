"""Backend agreement: the numba kernels and the numpy fallbacks must
produce the same answers (the benchmark script compares their speed)."""

import numpy as np
import pytest

from equidyn import _kernels
from equidyn.backend import numba_available

pytestmark = pytest.mark.skipif(not numba_available(),
                                reason="numba not importable")


@pytest.fixture(scope="module")
def both():
    return _kernels.build("numpy"), _kernels.build("numba")


def _sorted(z):
    return np.sort_complex(np.asarray(z))


def test_all_roots_agree(both):
    np_k, nb_k = both
    rng = np.random.default_rng(31)
    for _ in range(20):
        deg = int(rng.integers(2, 40))
        c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        r1, ok1 = np_k.all_roots(c)
        r2, ok2 = nb_k.all_roots(c)
        assert ok1 and ok2
        assert np.abs(_sorted(r1) - _sorted(r2)).max() < 1e-8


def test_all_roots_known_values(both):
    for kern in both:
        roots, ok = kern.all_roots(np.array([-1, 0, 0, 0, 0, 0, 0, 1],
                                            dtype=complex))
        assert ok
        expect = np.exp(2j * np.pi * np.arange(7) / 7)
        assert np.abs(_sorted(roots) - _sorted(expect)).max() < 1e-12
        double, ok = kern.all_roots(np.array([1.0, -2.0, 1.0], dtype=complex))
        assert ok
        assert np.abs(double - 1.0).max() < 1e-6


def test_horner_agree(both):
    np_k, nb_k = both
    rng = np.random.default_rng(7)
    c = rng.normal(size=12) + 1j * rng.normal(size=12)
    z = rng.normal(size=100) + 1j * rng.normal(size=100)
    a = np_k.horner_many(c, z)
    b = nb_k.horner_many(c, z)
    # numba may contract multiply-adds; compare relatively
    assert np.abs(a - b).max() <= 1e-10 * max(1.0, np.abs(a).max())


def test_lattice_counts_agree(both):
    np_k, nb_k = both
    cases = [
        (3, 1, 1, 2, 11, 1, 11, 8),
        (7, 2, 5, 3, 124, 4, 31, 16),
        (1, 0, 0, 1, 97, 97, 1, 8),
    ]
    for args in cases:
        a = np_k.lattice_bin_counts(*args)
        b = nb_k.lattice_bin_counts(*args)
        assert np.array_equal(a, b)
        assert a.sum() == args[5] * args[6]
