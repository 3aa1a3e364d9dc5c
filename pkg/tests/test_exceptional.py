import pytest

from equidyn.errors import AtomBudgetExceeded
from equidyn.exceptional import (ExceptionalSet, find_exceptional, lambda_n,
                                 verify_invariance)
from equidyn.sphere import SphereMap, SpherePoint, chebyshev_map, power_map


def _affine_set(exc):
    return sorted(("inf" if p.is_infinity else round(p.to_affine().real, 9)
                   for p in exc.points), key=str)


def test_find_exceptional_power():
    exc = find_exceptional(power_map(2))
    assert _affine_set(exc) == [0.0, "inf"]
    assert verify_invariance(power_map(2), exc)


def test_find_exceptional_chebyshev():
    exc = find_exceptional(chebyshev_map(2))
    assert _affine_set(exc) == ["inf"]


def test_find_exceptional_rational_empty():
    f = SphereMap([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0])  # (z^2-1)/(z^2+1)
    exc = find_exceptional(f)
    assert len(exc) == 0
    assert verify_invariance(f, exc)  # vacuous


def test_find_exceptional_inverse_power():
    f = SphereMap([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])  # z -> 1/z^2
    exc = find_exceptional(f)  # 2-cycle {0, inf} is totally invariant
    assert _affine_set(exc) == [0.0, "inf"]
    assert verify_invariance(f, exc)


def test_verify_invariance_negative():
    bad = ExceptionalSet(points=(SpherePoint.affine(1.0),), verified_depth=1)
    assert not verify_invariance(power_map(2), bad)
    empty = ExceptionalSet(points=(), verified_depth=1)
    assert verify_invariance(power_map(2), empty)


def test_lambda_n_examples():
    f = power_map(2)
    y = [SpherePoint.affine(0.0), SpherePoint.affine(1.0),
         SpherePoint.infinity()]
    for n in (1, 4, 8):
        assert lambda_n(f, SpherePoint.affine(1.0), y, n) == 1
    y2 = [SpherePoint.affine(0.0), SpherePoint.infinity()]
    for n in (1, 5, 9):
        assert lambda_n(f, SpherePoint.affine(0.0), y2, n) == 2 ** n
    with pytest.raises(ValueError):
        lambda_n(f, SpherePoint.affine(0.5), y, 3)


def test_lambda_decay_off_exceptional():
    # for a not in E and Y = E + {a}: d^-n lambda_n -> 0
    for f in (power_map(2), chebyshev_map(2)):
        exc = find_exceptional(f)
        a = SpherePoint.affine(1.0) if len(exc) < 2 else \
            SpherePoint.affine(0.5)
        y = list(exc.points) + [a]
        lam = lambda_n(f, a, y, 12)
        assert lam <= 2 ** 12 * 0.01


def test_lambda_saturates_on_exceptional():
    f = power_map(2)
    exc = find_exceptional(f)
    a = exc.points[0]
    for n in range(1, 13):
        assert lambda_n(f, a, list(exc.points), n) == 2 ** n


def test_lambda_budget():
    f = power_map(2)
    with pytest.raises(AtomBudgetExceeded):
        lambda_n(f, SpherePoint.affine(0.0),
                 [SpherePoint.affine(0.0)], 40)
