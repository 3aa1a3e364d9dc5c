"""Hot numerical kernels, in numba and pure-numpy flavors.

Three operations dominate runtime: simultaneous polynomial root finding
(Aberth-Ehrlich sweeps plus Newton polishing), batched Horner
evaluation, and exact lattice binning of torus periodic points. Each is
implemented twice with identical semantics; ``build(backend)`` returns
the chosen set and the benchmark script times both.

Root finding is chart-robust: points with |z| > 1 are handled through
the reversed polynomial at w = 1/z so no intermediate z**m overflows.
"""

from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np

from .backend import select_backend

#: residual acceptance is relative to sum_j |c_j| |t|^j in the active chart
ABERTH_TOL = 1e-12
ABERTH_MAX_SWEEPS = 500
POLISH_STEPS = 80


def _initial_points(c: np.ndarray) -> np.ndarray:
    m = len(c) - 1
    am = abs(c[m])
    bound = 0.0
    for j in range(m):
        aj = abs(c[j])
        if aj > 0.0:
            r = (aj / am) ** (1.0 / (m - j))
            if r > bound:
                bound = r
    radius = 1.0 + bound
    k = np.arange(m)
    # fixed angular offset breaks root symmetries deterministically
    angles = 2.0 * np.pi * (k + 0.3799) / m
    return radius * np.exp(1j * angles)


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _horner_der_np(c: np.ndarray, z: np.ndarray):
    v = np.full(z.shape, c[-1], dtype=np.complex128)
    d = np.zeros(z.shape, dtype=np.complex128)
    for j in range(len(c) - 2, -1, -1):
        d = d * z + v
        v = v * z + c[j]
    return v, d


def _horner_abs_np(ac: np.ndarray, x: np.ndarray) -> np.ndarray:
    s = np.full(x.shape, ac[-1], dtype=np.float64)
    for j in range(len(ac) - 2, -1, -1):
        s = s * x + ac[j]
    return s


def _corrections_np(c, crev, ac, acrev, z, tol):
    """Newton correction p/p' and residual verdict, chart chosen by |z|."""
    m = len(c) - 1
    n_out = np.empty(z.shape, dtype=np.complex128)
    ok = np.empty(z.shape, dtype=bool)
    inner = np.abs(z) <= 1.0
    if inner.any():
        zi = z[inner]
        v, d = _horner_der_np(c, zi)
        scale = _horner_abs_np(ac, np.abs(zi))
        d = np.where(d == 0, 1e-300, d)
        n_out[inner] = v / d
        ok[inner] = np.abs(v) <= tol * scale
    outer = ~inner
    if outer.any():
        zo = z[outer]
        w = 1.0 / zo
        s, sd = _horner_der_np(crev, w)
        scale = _horner_abs_np(acrev, np.abs(w))
        denom = m * s - w * sd
        denom = np.where(denom == 0, 1e-300, denom)
        n_out[outer] = zo * s / denom
        ok[outer] = np.abs(s) <= tol * scale
    return n_out, ok


def horner_many_np(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    v = np.full(z.shape, c[-1], dtype=np.complex128)
    for j in range(len(c) - 2, -1, -1):
        v = v * z + c[j]
    return v


def all_roots_np(c: np.ndarray, tol: float = ABERTH_TOL,
                 max_sweeps: int = ABERTH_MAX_SWEEPS,
                 polish_steps: int = POLISH_STEPS):
    m = len(c) - 1
    if m == 0:
        return np.empty(0, dtype=np.complex128), True
    if m == 1:
        return np.array([-c[0] / c[1]], dtype=np.complex128), True
    crev = c[::-1].copy()
    ac = np.abs(c)
    acrev = ac[::-1].copy()
    z = _initial_points(c)
    converged = False
    for _ in range(max_sweeps):
        n_corr, ok = _corrections_np(c, crev, ac, acrev, z, tol)
        if ok.all():
            converged = True
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = (1.0 / diff).sum(axis=1)
        denom = 1.0 - n_corr * s
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        z = np.where(ok, z, z - n_corr / denom)
        if not np.isfinite(z).all():
            return z, False
    # Newton polish; linear convergence at multiple roots is fine here
    for _ in range(polish_steps):
        n_corr, _ = _corrections_np(c, crev, ac, acrev, z, tol)
        frozen = np.abs(n_corr) <= 1e-15 * np.maximum(1.0, np.abs(z))
        if frozen.all():
            break
        z = np.where(frozen, z, z - n_corr)
    _, ok = _corrections_np(c, crev, ac, acrev, z, tol)
    return z, bool(ok.all()) or converged


def lattice_bin_counts_np(w00: int, w01: int, w10: int, w11: int,
                          det: int, d1: int, d2: int, bins: int) -> np.ndarray:
    """Bin counts of theta = 2*pi*(W @ (i,j) mod det)/det over the rep grid.

    Exact: all intermediates bounded by det*d2 < 2**63 for desk-scale
    determinants. Bin edges are half-shifted so lattice points sit at
    bin centers.
    """
    counts = np.zeros((bins, bins), dtype=np.int64)
    chunk = 1 << 20
    for i in range(d1):
        base1 = (w00 * i) % det
        base2 = (w10 * i) % det
        for j0 in range(0, d2, chunk):
            j = np.arange(j0, min(j0 + chunk, d2), dtype=np.int64)
            r1 = (base1 + w01 * j) % det
            r2 = (base2 + w11 * j) % det
            b1 = ((2 * r1 * bins + det) // (2 * det)) % bins
            b2 = ((2 * r2 * bins + det) // (2 * det)) % bins
            np.add.at(counts, (b1, b2), 1)
    return counts


# ---------------------------------------------------------------------------
# numba implementations (same contracts)
# ---------------------------------------------------------------------------


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def _correction_nb(c, crev, ac, acrev, z, tol):
        m = len(c) - 1
        if abs(z) <= 1.0:
            v = c[m]
            d = 0.0 + 0.0j
            for j in range(m - 1, -1, -1):
                d = d * z + v
                v = v * z + c[j]
            s = ac[m]
            az = abs(z)
            for j in range(m - 1, -1, -1):
                s = s * az + ac[j]
            if d == 0:
                d = 1e-300 + 0.0j
            return v / d, abs(v) <= tol * s
        w = 1.0 / z
        v = crev[m]
        d = 0.0 + 0.0j
        for j in range(m - 1, -1, -1):
            d = d * w + v
            v = v * w + crev[j]
        s = acrev[m]
        aw = abs(w)
        for j in range(m - 1, -1, -1):
            s = s * aw + acrev[j]
        denom = m * v - w * d
        if denom == 0:
            denom = 1e-300 + 0.0j
        return z * v / denom, abs(v) <= tol * s

    @njit(cache=True)
    def horner_many_nb(c, z):
        out = np.empty(z.shape, dtype=np.complex128)
        m = len(c) - 1
        for i in range(z.size):
            v = c[m]
            for j in range(m - 1, -1, -1):
                v = v * z[i] + c[j]
            out[i] = v
        return out

    @njit(cache=True)
    def all_roots_nb(c, tol, max_sweeps, polish_steps):
        m = len(c) - 1
        if m == 0:
            return np.empty(0, dtype=np.complex128), True
        if m == 1:
            out = np.empty(1, dtype=np.complex128)
            out[0] = -c[0] / c[1]
            return out, True
        crev = c[::-1].copy()
        ac = np.abs(c)
        acrev = ac[::-1].copy()
        am = abs(c[m])
        bound = 0.0
        for j in range(m):
            aj = abs(c[j])
            if aj > 0.0:
                r = (aj / am) ** (1.0 / (m - j))
                if r > bound:
                    bound = r
        radius = 1.0 + bound
        z = np.empty(m, dtype=np.complex128)
        for k in range(m):
            ang = 2.0 * np.pi * (k + 0.3799) / m
            z[k] = radius * complex(math.cos(ang), math.sin(ang))
        converged = False
        for _ in range(max_sweeps):
            all_ok = True
            for i in range(m):
                n_corr, ok = _correction_nb(c, crev, ac, acrev, z[i], tol)
                if ok:
                    continue
                all_ok = False
                ssum = 0.0 + 0.0j
                for j in range(m):
                    if j != i:
                        ssum += 1.0 / (z[i] - z[j])
                denom = 1.0 - n_corr * ssum
                if abs(denom) < 1e-300:
                    denom = 1e-300 + 0.0j
                z[i] = z[i] - n_corr / denom
                if not (np.isfinite(z[i].real) and np.isfinite(z[i].imag)):
                    return z, False
            if all_ok:
                converged = True
                break
        for _ in range(polish_steps):
            all_frozen = True
            for i in range(m):
                n_corr, _ = _correction_nb(c, crev, ac, acrev, z[i], tol)
                if abs(n_corr) > 1e-15 * max(1.0, abs(z[i])):
                    all_frozen = False
                    z[i] = z[i] - n_corr
            if all_frozen:
                break
        final_ok = True
        for i in range(m):
            _, ok = _correction_nb(c, crev, ac, acrev, z[i], tol)
            if not ok:
                final_ok = False
                break
        return z, final_ok or converged

    @njit(cache=True)
    def lattice_bin_counts_nb(w00, w01, w10, w11, det, d1, d2, bins):
        counts = np.zeros((bins, bins), dtype=np.int64)
        for i in range(d1):
            base1 = (w00 * i) % det
            base2 = (w10 * i) % det
            for j in range(d2):
                r1 = (base1 + w01 * j) % det
                r2 = (base2 + w11 * j) % det
                b1 = ((2 * r1 * bins + det) // (2 * det)) % bins
                b2 = ((2 * r2 * bins + det) // (2 * det)) % bins
                counts[b1, b2] += 1
        return counts

    def all_roots(c, tol=ABERTH_TOL, max_sweeps=ABERTH_MAX_SWEEPS,
                  polish_steps=POLISH_STEPS):
        roots, ok = all_roots_nb(np.ascontiguousarray(c, dtype=np.complex128),
                                 tol, max_sweeps, polish_steps)
        return roots, bool(ok)

    def horner_many(c, z):
        shape = np.shape(z)
        flat = np.ascontiguousarray(z, dtype=np.complex128).ravel()
        out = horner_many_nb(np.ascontiguousarray(c, dtype=np.complex128), flat)
        return out.reshape(shape)

    def lattice_bin_counts(w00, w01, w10, w11, det, d1, d2, bins):
        return lattice_bin_counts_nb(np.int64(w00), np.int64(w01),
                                     np.int64(w10), np.int64(w11),
                                     np.int64(det), np.int64(d1),
                                     np.int64(d2), np.int64(bins))

    return SimpleNamespace(name="numba", all_roots=all_roots,
                           horner_many=horner_many,
                           lattice_bin_counts=lattice_bin_counts)


def _build_numpy():
    def horner_many(c, z):
        return horner_many_np(np.asarray(c, dtype=np.complex128),
                              np.asarray(z, dtype=np.complex128))

    return SimpleNamespace(name="numpy", all_roots=all_roots_np,
                           horner_many=horner_many,
                           lattice_bin_counts=lattice_bin_counts_np)


def build(backend: str) -> SimpleNamespace:
    if backend == "numba":
        return _build_numba()
    if backend == "numpy":
        return _build_numpy()
    raise ValueError(f"unknown backend {backend!r}")


KERNELS = build(select_backend())

all_roots = KERNELS.all_roots
horner_many = KERNELS.horner_many
lattice_bin_counts = KERNELS.lattice_bin_counts
backend_name = KERNELS.name
