"""Closed-form reference measures and distances between atomic measures.

Weak-* convergence is quantified by three surrogates: binned total
variation on reference-adapted grids, Kolmogorov-Smirnov where the
reference carries 1-d structure (interval or circle), and a max gap
over random 1-Lipschitz test functions. Bin edges for circle and torus
grids are half-shifted so that roots of unity and lattice points sit at
bin centers rather than on edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ProjectionFailure, SpaceMismatch
from .fibers import AtomicMeasure
from .torus import TWO_PI

#: atoms farther than this from a 1-d reference support are off-support
OFF_SUPPORT_TOL = 0.05


@dataclass(frozen=True)
class ReferenceMeasure:
    kind: str  # circle_haar | torus_haar | arcsine_interval | sampled
    a: float = -2.0
    b: float = 2.0
    sample: AtomicMeasure | None = None

    def __post_init__(self):
        if self.kind not in ("circle_haar", "torus_haar",
                             "arcsine_interval", "sampled"):
            raise ValueError(f"unknown reference kind {self.kind!r}")
        if self.kind == "arcsine_interval":
            if not (math.isfinite(self.a) and math.isfinite(self.b)
                    and self.a < self.b):
                raise ValueError("arcsine endpoints must be finite with a < b")
        if self.kind == "sampled" and self.sample is None:
            raise ValueError("sampled reference needs an AtomicMeasure")

    @property
    def space(self) -> str:
        if self.kind == "torus_haar":
            return "torus"
        if self.kind == "sampled":
            return self.sample.space
        return "sphere"

    @classmethod
    def circle_haar(cls):
        return cls(kind="circle_haar")

    @classmethod
    def torus_haar(cls):
        return cls(kind="torus_haar")

    @classmethod
    def arcsine(cls, a: float = -2.0, b: float = 2.0):
        return cls(kind="arcsine_interval", a=a, b=b)

    @classmethod
    def sampled(cls, mu: AtomicMeasure):
        return cls(kind="sampled", sample=mu)


@dataclass(frozen=True)
class MeasureDistanceReport:
    binned_tv: float
    ks_1d: float  # nan when the reference has no 1-d structure
    lipschitz_gap: float
    bins: int
    test_function_count: int

    def __post_init__(self):
        assert 0.0 <= self.binned_tv <= 1.0 + 1e-12
        assert 0.0 <= self.lipschitz_gap <= 2.0 + 1e-12
        assert math.isnan(self.ks_1d) or 0.0 <= self.ks_1d <= 2.0

    def rows(self):
        return [("binned_tv", self.binned_tv), ("ks_1d", self.ks_1d),
                ("lipschitz_gap", self.lipschitz_gap), ("bins", self.bins),
                ("test_function_count", self.test_function_count)]

    csv_columns = ("binned_tv", "ks_1d", "lipschitz_gap", "bins",
                   "test_function_count")

    def csv_row(self):
        return (self.binned_tv, self.ks_1d, self.lipschitz_gap, self.bins,
                self.test_function_count)


# ---------------------------------------------------------------------------
# binning helpers
# ---------------------------------------------------------------------------


def _shifted_angle_bin(frac: np.ndarray, bins: int) -> np.ndarray:
    """Bin index on [0,1) with edges at (m + 1/2)/bins (points at centers)."""
    return (np.floor(frac * bins + 0.5).astype(np.int64)) % bins


def _circle_support_distance(points: np.ndarray) -> np.ndarray:
    a0 = np.abs(points[:, 0])
    a1 = np.abs(points[:, 1])
    return np.abs(a0 - a1) / (math.sqrt(2.0) * np.hypot(a0, a1))


def _interval_support_distance(points: np.ndarray, a: float, b: float
                               ) -> np.ndarray:
    z = _safe_affine(points)
    dx = np.maximum(np.maximum(a - z.real, 0.0), z.real - b)
    out = np.hypot(dx, z.imag)
    out[~np.isfinite(z.real)] = math.inf
    return out


def _safe_affine(points: np.ndarray) -> np.ndarray:
    z0, z1 = points[:, 0], points[:, 1]
    out = np.full(len(points), complex(math.inf, 0.0), dtype=np.complex128)
    finite = z1 != 0
    out[finite] = z0[finite] / z1[finite]
    return out


def _sphere_angles(points: np.ndarray) -> np.ndarray:
    """arg(z0 conj(z1)) in [0, 2 pi); projective-invariant longitude."""
    ang = np.angle(points[:, 0] * np.conj(points[:, 1]))
    return np.mod(ang, TWO_PI)


def arcsine_cdf(x: np.ndarray, a: float, b: float) -> np.ndarray:
    u = np.clip((2.0 * np.asarray(x, dtype=np.float64) - (a + b)) / (b - a),
                -1.0, 1.0)
    return 0.5 + np.arcsin(u) / math.pi


def _hist_circle(mu: AtomicMeasure, bins: int):
    """(angle-bin masses, off-support mass) for a sphere measure."""
    dist = _circle_support_distance(mu.points)
    on = dist <= OFF_SUPPORT_TOL
    masses = np.zeros(bins)
    if on.any():
        frac = _sphere_angles(mu.points[on]) / TWO_PI
        idx = _shifted_angle_bin(frac, bins)
        np.add.at(masses, idx, mu.weights[on])
    return masses, float(mu.weights[~on].sum())


def _hist_arcsine(mu: AtomicMeasure, bins: int, a: float, b: float):
    dist = _interval_support_distance(mu.points, a, b)
    on = dist <= OFF_SUPPORT_TOL
    masses = np.zeros(bins)
    if on.any():
        x = _safe_affine(mu.points[on]).real
        idx = np.minimum((arcsine_cdf(x, a, b) * bins).astype(np.int64),
                         bins - 1)
        np.add.at(masses, idx, mu.weights[on])
    return masses, float(mu.weights[~on].sum())


def torus_bin_indices(angles: np.ndarray, bins: int):
    frac = np.mod(angles, TWO_PI) / TWO_PI
    return _shifted_angle_bin(frac[:, 0], bins), \
        _shifted_angle_bin(frac[:, 1], bins)


def _hist_torus(mu: AtomicMeasure, bins: int) -> np.ndarray:
    grid = np.zeros((bins, bins))
    i, j = torus_bin_indices(mu.points, bins)
    np.add.at(grid, (i, j), mu.weights)
    return grid


def _hist_sphere_grid(mu: AtomicMeasure, bins: int) -> np.ndarray:
    """Equal-area latitude bands (uniform in height) x longitude sectors."""
    a0 = np.abs(mu.points[:, 0]) ** 2
    a1 = np.abs(mu.points[:, 1]) ** 2
    h = (a0 - a1) / (a0 + a1)
    lat = np.clip(((h + 1.0) / 2.0 * bins).astype(np.int64), 0, bins - 1)
    lon = _shifted_angle_bin(_sphere_angles(mu.points) / TWO_PI, bins)
    grid = np.zeros((bins, bins))
    np.add.at(grid, (lat, lon), mu.weights)
    return grid


def binned_tv_grid(mu_grid: np.ndarray, ref_grid: np.ndarray) -> float:
    """0.5 * sum |mu(bin) - ref(bin)|, plus any mass imbalance."""
    return float(0.5 * np.abs(np.asarray(mu_grid) - np.asarray(ref_grid)).sum())


def torus_haar_grid(bins: int) -> np.ndarray:
    return np.full((bins, bins), 1.0 / (bins * bins))


# ---------------------------------------------------------------------------
# the three distances
# ---------------------------------------------------------------------------


def binned_tv(mu: AtomicMeasure, ref, bins_per_axis: int) -> float:
    """Total variation over a reference-adapted equal-mass grid.

    For circle and arcsine references the grid is 1-d quantile bins plus
    one off-support bin (atoms farther than 0.05 from the support);
    torus and empirical references use uniform product grids.
    """
    if bins_per_axis < 4:
        raise ValueError("bins_per_axis must be >= 4")
    if isinstance(ref, AtomicMeasure):
        ref = ReferenceMeasure.sampled(ref)
    if mu.space != ref.space:
        raise SpaceMismatch(f"{mu.space} measure vs {ref.space} reference")
    bins = bins_per_axis
    if ref.kind == "circle_haar":
        masses, off = _hist_circle(mu, bins)
        return min(1.0, 0.5 * (np.abs(masses - 1.0 / bins).sum() + off))
    if ref.kind == "arcsine_interval":
        masses, off = _hist_arcsine(mu, bins, ref.a, ref.b)
        return min(1.0, 0.5 * (np.abs(masses - 1.0 / bins).sum() + off))
    if ref.kind == "torus_haar":
        return min(1.0, binned_tv_grid(_hist_torus(mu, bins),
                                       torus_haar_grid(bins)))
    nu = ref.sample
    if mu.space == "torus":
        return min(1.0, binned_tv_grid(_hist_torus(mu, bins),
                                       _hist_torus(nu, bins)))
    return min(1.0, binned_tv_grid(_hist_sphere_grid(mu, bins),
                                   _hist_sphere_grid(nu, bins)))


def ks_distance(mu: AtomicMeasure, ref: ReferenceMeasure) -> float:
    """Sup-norm CDF gap against the arcsine law or circle Haar.

    Weights are normalized to total mass one (shape comparison; mass
    deficits are reported separately by callers). The circle statistic
    is minimized over rotations: (D+ + D-) / 2, i.e. half the Kuiper
    range.
    """
    if ref.kind not in ("arcsine_interval", "circle_haar"):
        raise ValueError("ks_distance needs an arcsine or circle reference")
    if mu.space != "sphere":
        raise SpaceMismatch("ks_distance applies to sphere measures")
    if len(mu) == 0:
        raise ValueError("empty measure")
    w = mu.weights / mu.mass
    if ref.kind == "arcsine_interval":
        dist = _interval_support_distance(mu.points, ref.a, ref.b)
        if dist.max() > OFF_SUPPORT_TOL:
            raise ProjectionFailure(
                f"atom {dist.max():.3g} away from [{ref.a}, {ref.b}]")
        x = _safe_affine(mu.points).real
        order = np.argsort(x, kind="stable")
        cdf_ref = arcsine_cdf(x[order], ref.a, ref.b)
        cum = np.cumsum(w[order])
        below = cum - w[order]
        return float(max(np.abs(cum - cdf_ref).max(),
                         np.abs(below - cdf_ref).max()))
    dist = _circle_support_distance(mu.points)
    if dist.max() > OFF_SUPPORT_TOL:
        raise ProjectionFailure(
            f"atom {dist.max():.3g} away from the unit circle")
    frac = _sphere_angles(mu.points) / TWO_PI
    order = np.argsort(frac, kind="stable")
    u = frac[order]
    cum = np.cumsum(w[order])
    below = cum - w[order]
    d_plus = float((cum - u).max())
    d_minus = float((u - below).max())
    return 0.5 * (max(d_plus, 0.0) + max(d_minus, 0.0))


def _random_probe_points(space: str, count: int, rng) -> np.ndarray:
    if space == "torus":
        return rng.uniform(0.0, TWO_PI, size=(count, 2))
    h = rng.uniform(-1.0, 1.0, size=count)
    phi = rng.uniform(0.0, TWO_PI, size=count)
    z0 = np.sqrt(1.0 + h) * np.exp(1j * phi)
    z1 = np.sqrt(1.0 - h) + 0j
    return np.stack([z0, z1], axis=1)


def _integrate_probe(mu: AtomicMeasure, probes: np.ndarray) -> np.ndarray:
    """integral of x -> dist(x, probe) against mu, for each probe."""
    if mu.space == "torus":
        d1 = np.abs(mu.points[:, 0][:, None] - probes[None, :, 0])
        d2 = np.abs(mu.points[:, 1][:, None] - probes[None, :, 1])
        d1 = np.minimum(d1, TWO_PI - d1)
        d2 = np.minimum(d2, TWO_PI - d2)
        dist = np.hypot(d1, d2)
    else:
        cross = (mu.points[:, 0][:, None] * probes[None, :, 1]
                 - mu.points[:, 1][:, None] * probes[None, :, 0])
        nx = np.hypot(np.abs(mu.points[:, 0]), np.abs(mu.points[:, 1]))
        ny = np.hypot(np.abs(probes[:, 0]), np.abs(probes[:, 1]))
        dist = np.abs(cross) / (nx[:, None] * ny[None, :])
    return mu.weights @ dist


def lipschitz_gap(mu: AtomicMeasure, nu: AtomicMeasure, seed: int,
                  count: int = 256) -> float:
    """Max over random distance-to-point test functions (1-Lipschitz) of
    |int phi dmu - int phi dnu|."""
    if mu.space != nu.space:
        raise SpaceMismatch(f"{mu.space} vs {nu.space}")
    rng = np.random.default_rng(seed)
    probes = _random_probe_points(mu.space, count, rng)
    gap = np.abs(_integrate_probe(mu, probes) - _integrate_probe(nu, probes))
    return float(gap.max())


def reference_atoms(ref: ReferenceMeasure, count: int) -> AtomicMeasure:
    """Deterministic quantile/grid discretization of a closed-form
    reference, for distances that need two atomic measures."""
    if ref.kind == "sampled":
        return ref.sample
    if ref.kind == "circle_haar":
        ang = TWO_PI * (np.arange(count) + 0.5) / count
        pts = np.stack([np.exp(1j * ang),
                        np.ones(count, dtype=np.complex128)], axis=1)
        return AtomicMeasure("sphere", pts, np.full(count, 1.0 / count))
    if ref.kind == "arcsine_interval":
        q = (np.arange(count) + 0.5) / count
        x = (ref.a + ref.b) / 2.0 + (ref.b - ref.a) / 2.0 * np.sin(
            math.pi * (q - 0.5))
        pts = np.stack([x.astype(np.complex128),
                        np.ones(count, dtype=np.complex128)], axis=1)
        return AtomicMeasure("sphere", pts, np.full(count, 1.0 / count))
    m = max(2, int(round(math.sqrt(count))))
    g = TWO_PI * (np.arange(m) + 0.5) / m
    t1, t2 = np.meshgrid(g, g, indexing="ij")
    pts = np.stack([t1.ravel(), t2.ravel()], axis=1)
    return AtomicMeasure("torus", pts, np.full(m * m, 1.0 / (m * m)))


def measure_report(mu: AtomicMeasure, ref: ReferenceMeasure,
                   bins_per_axis: int = 32, seed: int = 0,
                   test_count: int = 256) -> MeasureDistanceReport:
    tv = binned_tv(mu, ref, bins_per_axis)
    if ref.kind in ("arcsine_interval", "circle_haar"):
        try:
            ks = ks_distance(mu, ref)
        except ProjectionFailure:
            ks = math.nan
    else:
        ks = math.nan
    nu = reference_atoms(ref, max(1024, test_count))
    lip = lipschitz_gap(mu, nu, seed=seed, count=test_count)
    return MeasureDistanceReport(binned_tv=tv, ks_1d=ks, lipschitz_gap=lip,
                                 bins=bins_per_axis,
                                 test_function_count=test_count)
