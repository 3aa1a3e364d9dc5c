"""Experiment driver: JSON config in, CSV + JSON-sidecar results out.

Exit statuses: 0 ok, 2 config error, 3 solver failure, 4 budget
exceeded, 5 acceptance failure. Every result file opens with comment
lines echoing the resolved config (presets expanded to coefficients)
and the artifact version; runs with identical config and seed produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from ._kernels import backend_name
from .acceptance import (DEFAULT_SEED, DESCRIPTIONS, run_criteria, summarize)
from .branches import critical_orbit, statistics_row, track_branches
from .degrees import profile_sphere, profile_torus, verify_degree_growth
from .errors import ConfigError, EquidynError
from .exceptional import find_exceptional, lambda_n
from .fibers import pullback_measure, sample_equilibrium
from .lyapunov import estimate_sphere, estimate_torus
from .measures import (MeasureDistanceReport, ReferenceMeasure, binned_tv,
                       binned_tv_grid, ks_distance, measure_report,
                       torus_haar_grid)
from .periodic import (periodic_algebraic, periodic_measure,
                       periodic_torus_count, torus_periodic_bin_masses)
from .sphere import (SphereMap, SpherePoint, chebyshev_map, mobius_map,
                     power_map, quadratic_map)
from .torus import TorusMap, TorusPoint

EXIT_HELP = """exit statuses:
  0  success
  2  config error (also: space mismatch, non-dominant map, exceptional
     start, degenerate period/map, not-periodic input, projection failure)
  3  solver failure (root solver divergence, ambiguous continuation,
     precision exhausted, chart singularity, singular derivatives)
  4  budget exceeded (atom or degree budgets)
  5  acceptance criterion failed
"""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: str, config: dict, columns: list[str], rows) -> None:
    lines = [f"# equidyn {__version__}",
             f"# config {json.dumps(config, sort_keys=True)}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sidecar(path: str, config: dict, outputs: list[str]) -> None:
    payload = {
        "artifact_version": __version__,
        "backend": backend_name,
        "config": config,
        "outputs": sorted(os.path.basename(p) for p in outputs),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def _as_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
            isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")


def resolve_map(spec, where: str = "map"):
    """Build the map object and its fully resolved (preset-expanded) spec."""
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = spec.get("type")
    if kind == "torus":
        matrix = spec.get("matrix")
        try:
            f = TorusMap(matrix)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.matrix: {exc}") from exc
        return f, {"type": "torus", "matrix": f.matrix}
    if kind != "sphere":
        raise ConfigError(f"{where}.type: must be 'sphere' or 'torus', "
                          f"got {kind!r}")
    preset = spec.get("preset")
    if preset is not None:
        if preset == "power":
            f = power_map(int(spec.get("degree", 2)))
        elif preset == "chebyshev":
            f = chebyshev_map(int(spec.get("degree", 2)))
        elif preset == "quadratic":
            f = quadratic_map(_as_complex(spec.get("c", 0.0),
                                          f"{where}.c"))
        elif preset == "mobius":
            coef = [_as_complex(spec.get(k, 0.0), f"{where}.{k}")
                    for k in ("a", "b", "c", "d")]
            f = mobius_map(*coef)
        else:
            raise ConfigError(f"{where}.preset: unknown preset {preset!r}")
    else:
        p = spec.get("p")
        q = spec.get("q")
        if p is None or q is None:
            raise ConfigError(
                f"{where}: sphere maps need a preset or explicit p and q")
        try:
            f = SphereMap([_as_complex(v, f"{where}.p") for v in p],
                          [_as_complex(v, f"{where}.q") for v in q])
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    resolved = {
        "type": "sphere",
        "degree": f.degree,
        "p": [[c.real, c.imag] for c in f.p],
        "q": [[c.real, c.imag] for c in f.q],
    }
    if preset is not None:
        resolved["preset"] = preset
    return f, resolved


def resolve_point(value, space: str, where: str = "start"):
    if space == "torus":
        if (isinstance(value, list) and len(value) == 2
                and all(isinstance(v, (int, float)) for v in value)):
            return TorusPoint(value[0], value[1]), [value[0], value[1]]
        raise ConfigError(f"{where}: torus points are [theta1, theta2]")
    if value == "inf":
        return SpherePoint.infinity(), "inf"
    z = _as_complex(value, where)
    return SpherePoint.affine(z), [z.real, z.imag]


def resolve_reference(spec, where: str = "reference"):
    if spec is None:
        raise ConfigError(f"{where}: missing")
    kind = spec.get("kind") if isinstance(spec, dict) else spec
    if kind == "circle_haar":
        return ReferenceMeasure.circle_haar(), {"kind": kind}
    if kind == "torus_haar":
        return ReferenceMeasure.torus_haar(), {"kind": kind}
    if kind == "arcsine_interval":
        a = float(spec.get("a", -2.0)) if isinstance(spec, dict) else -2.0
        b = float(spec.get("b", 2.0)) if isinstance(spec, dict) else 2.0
        return ReferenceMeasure.arcsine(a, b), {"kind": kind, "a": a, "b": b}
    raise ConfigError(f"{where}.kind: unknown reference {kind!r}")


def load_config(path: str | None, kind: str) -> dict:
    if path is None:
        return {"kind": kind}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config is not valid JSON (line {exc.lineno}, col {exc.colno}): "
            f"{exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    declared = cfg.get("kind")
    if declared is not None and declared != kind:
        raise ConfigError(
            f"config kind {declared!r} does not match subcommand {kind!r}")
    cfg["kind"] = kind
    return cfg


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing required config field {key!r}")
    return cfg[key]


def _atom_rows(mu):
    return [tuple(r) for r in mu.rows()]


# ---------------------------------------------------------------------------
# experiment runners: each returns the list of files written
# ---------------------------------------------------------------------------


def run_degrees(cfg: dict, out: str, seed: int) -> list[str]:
    f, map_spec = resolve_map(_require(cfg, "map"))
    resolved = {"kind": "degrees", "map": map_spec, "seed": seed}
    if isinstance(f, TorusMap):
        prof = profile_torus(f)
    else:
        prof = profile_sphere(f)
    cols = [f"d{i}" for i in range(len(prof.degrees))] + [
        "topological", "dominant", "lyapunov_floor"]
    row = list(prof.degrees) + [prof.topological, prof.dominant,
                                prof.lyapunov_floor]
    files = [os.path.join(out, "degrees.csv")]
    write_csv(files[0], resolved, cols, [row])
    if isinstance(f, TorusMap) and cfg.get("growth_n_max"):
        p = int(cfg.get("growth_p", 1))
        n_max = int(cfg["growth_n_max"])
        resolved["growth_p"] = p
        resolved["growth_n_max"] = n_max
        seq = verify_degree_growth(f, p, n_max)
        growth = os.path.join(out, "growth.csv")
        write_csv(growth, resolved, ["n", "nth_root"],
                  [(n + 1, v) for n, v in enumerate(seq)])
        files.append(growth)
    write_sidecar(os.path.join(out, "degrees.json"), resolved, files)
    return files


def run_fiber(cfg: dict, out: str, seed: int) -> list[str]:
    f, map_spec = resolve_map(_require(cfg, "map"))
    space = "torus" if isinstance(f, TorusMap) else "sphere"
    a, start_spec = resolve_point(_require(cfg, "start"), space)
    depth = int(cfg.get("depth", 1))
    budget = int(cfg.get("atom_budget", 10 ** 6))
    resolved = {"kind": "fiber", "map": map_spec, "start": start_spec,
                "depth": depth, "atom_budget": budget, "seed": seed}
    if space == "torus":
        resolved["indeterminacy_check"] = \
            "vacuous in the real angle chart (see fibers module)"
    mu = pullback_measure(f, a, depth, atom_budget=budget)
    cols = ["theta1", "theta2", "weight"] if space == "torus" else \
        ["re", "im", "weight"]
    path = os.path.join(out, "pullback.csv")
    write_csv(path, resolved, cols, _atom_rows(mu))
    write_sidecar(os.path.join(out, "fiber.json"), resolved, [path])
    return [path]


def run_equidist_backward(cfg: dict, out: str, seed: int) -> list[str]:
    f, map_spec = resolve_map(_require(cfg, "map"))
    space = "torus" if isinstance(f, TorusMap) else "sphere"
    a, start_spec = resolve_point(_require(cfg, "start"), space)
    depths = [int(n) for n in _require(cfg, "depths")]
    ref, ref_spec = resolve_reference(
        cfg.get("reference", {"kind": "torus_haar" if space == "torus"
                              else "circle_haar"}))
    bins = int(cfg.get("bins", 32))
    resolved = {"kind": "equidist_backward", "map": map_spec,
                "start": start_spec, "depths": depths,
                "reference": ref_spec, "bins": bins, "seed": seed}
    if space == "sphere":
        prof = profile_sphere(f)
    else:
        prof = profile_torus(f)
    if not prof.dominant:
        raise ConfigError("equidistribution experiments require a map of "
                          "dominant topological degree")
    rows = []
    for n in depths:
        mu = pullback_measure(f, a, n)
        report = measure_report(mu, ref, bins_per_axis=bins, seed=seed)
        rows.append((n, len(mu), mu.mass) + report.csv_row())
    path = os.path.join(out, "equidist_backward.csv")
    write_csv(path, resolved,
              ["n", "atoms", "mass"] + list(MeasureDistanceReport.csv_columns),
              rows)
    write_sidecar(os.path.join(out, "equidist_backward.json"), resolved,
                  [path])
    return [path]


def run_equidist_periodic(cfg: dict, out: str, seed: int) -> list[str]:
    f, map_spec = resolve_map(_require(cfg, "map"))
    periods = [int(n) for n in _require(cfg, "periods")]
    bins = int(cfg.get("bins", 32))
    filt = cfg.get("filter", "repelling_on_support")
    resolved = {"kind": "equidist_periodic", "map": map_spec,
                "periods": periods, "bins": bins, "filter": filt,
                "seed": seed}
    rows = []
    point_rows = []
    if isinstance(f, TorusMap):
        prof = profile_torus(f)
        if not prof.dominant:
            raise ConfigError("torus map is not dominant")
        d_t = abs(f.det)
        table_budget = int(cfg.get("point_table_budget", 10_000))
        for n in periods:
            count = periodic_torus_count(f, n)
            grid = torus_periodic_bin_masses(f, n, bins)
            tv = binned_tv_grid(grid, torus_haar_grid(bins))
            rows.append((n, count, count / float(d_t) ** n, tv, math.nan))
            if count <= table_budget:
                from .periodic import periodic_torus
                for pp in periodic_torus(f, n)[1]:
                    point_rows.append((n, pp.point.theta1, pp.point.theta2,
                                       pp.multiplicity, pp.min_modulus,
                                       pp.classification, pp.on_support))
        cols = ["n", "count", "mass", "binned_tv", "ks"]
        point_cols = ["period", "theta1", "theta2", "multiplicity",
                      "min_modulus", "class", "on_support"]
    else:
        ref, ref_spec = resolve_reference(
            cfg.get("reference", {"kind": "circle_haar"}))
        resolved["reference"] = ref_spec
        if not profile_sphere(f).dominant:
            raise ConfigError("sphere map is not dominant (degree 1)")
        for n in periods:
            pts = periodic_algebraic(f, n, support_seed=seed)
            mu = periodic_measure(pts, filter=filt,
                                  normalizer=float(f.degree) ** n)
            tv = binned_tv(mu, ref, bins)
            try:
                ks = ks_distance(mu, ref)
            except EquidynError:
                ks = math.nan
            repelling = sum(1 for p in pts
                            if p.classification == "repelling")
            rows.append((n, sum(p.multiplicity for p in pts), repelling,
                         mu.mass, tv, ks))
            for pp in pts:
                z = pp.point.to_affine()
                point_rows.append((n, z.real, z.imag, pp.multiplicity,
                                   pp.min_modulus, pp.classification,
                                   pp.on_support))
        cols = ["n", "count", "repelling_count", "mass", "binned_tv", "ks"]
        point_cols = ["period", "re", "im", "multiplicity", "min_modulus",
                      "class", "on_support"]
    path = os.path.join(out, "equidist_periodic.csv")
    write_csv(path, resolved, cols, rows)
    files = [path]
    if point_rows:
        pts_path = os.path.join(out, "periodic_points.csv")
        write_csv(pts_path, resolved, point_cols, point_rows)
        files.append(pts_path)
    write_sidecar(os.path.join(out, "equidist_periodic.json"), resolved,
                  files)
    return files


def run_branches(cfg: dict, out: str, seed: int) -> list[str]:
    f, map_spec = resolve_map(_require(cfg, "map"))
    if isinstance(f, TorusMap):
        raise ConfigError("branch tracking is defined for sphere maps")
    depth = int(_require(cfg, "depth"))
    radius = float(_require(cfg, "radius"))
    eps = float(cfg.get("epsilon", 0.1))
    m = int(cfg.get("boundary_samples", 128))
    resolved = {"kind": "branches", "map": map_spec, "depth": depth,
                "radius": radius, "epsilon": eps, "boundary_samples": m,
                "seed": seed}
    obstruction = critical_orbit(f, max(depth, 1))
    centers = []
    if "centers" in cfg:
        for value in cfg["centers"]:
            pt, _ = resolve_point(value, "sphere", "centers")
            centers.append(pt)
        resolved["centers"] = cfg["centers"]
    else:
        from .acceptance import _safe_centers
        count = int(cfg.get("center_count", 10))
        centers = _safe_centers(f, radius, count, seed, obstruction)
        resolved["center_count"] = count
    rows = []
    for center in centers:
        tr = track_branches(f, center, radius, depth, boundary_samples=m,
                            seed=seed, obstruction=obstruction)
        stats = statistics_row(tr, eps)
        z = center.to_affine()
        rows.append((z.real, z.imag, stats["n"], stats["d_pow_n"],
                     stats["alive"], stats["survival_fraction"],
                     stats["max_diameter"], stats["bound"],
                     stats["size_bound_fraction"]))
    path = os.path.join(out, "branches.csv")
    write_csv(path, resolved,
              ["center_re", "center_im", "n", "d_pow_n", "alive",
               "survival_fraction", "max_diameter", "bound",
               "size_bound_fraction"], rows)
    write_sidecar(os.path.join(out, "branches.json"), resolved, [path])
    return [path]


def run_exceptional(cfg: dict, out: str, seed: int) -> list[str]:
    f, map_spec = resolve_map(_require(cfg, "map"))
    if isinstance(f, TorusMap):
        raise ConfigError(
            "exceptional detection is sphere-only: the torus family's "
            "exceptional structure lives on the compactification axes")
    resolved = {"kind": "exceptional", "map": map_spec, "seed": seed}
    exc = find_exceptional(f)
    rows = []
    for pt in exc.points:
        z = pt.to_affine()
        rows.append((z.real, z.imag, exc.verified_depth))
    files = [os.path.join(out, "exceptional.csv")]
    write_csv(files[0], resolved, ["re", "im", "verified_depth"], rows)
    if cfg.get("lambda_depth"):
        a, start_spec = resolve_point(_require(cfg, "start"), "sphere")
        n_max = int(cfg["lambda_depth"])
        resolved["start"] = start_spec
        resolved["lambda_depth"] = n_max
        y = list(exc.points) + [a]
        lam_rows = []
        for n in range(1, n_max + 1):
            lam = lambda_n(f, a, y, n)
            lam_rows.append((n, lam, f.degree ** n,
                             lam / float(f.degree) ** n))
        lam_path = os.path.join(out, "lambda.csv")
        write_csv(lam_path, resolved, ["n", "lambda_n", "dt_pow_n", "ratio"],
                  lam_rows)
        files.append(lam_path)
    write_sidecar(os.path.join(out, "exceptional.json"), resolved, files)
    return files


def run_lyapunov(cfg: dict, out: str, seed: int) -> list[str]:
    f, map_spec = resolve_map(_require(cfg, "map"))
    resolved = {"kind": "lyapunov", "map": map_spec, "seed": seed}
    if isinstance(f, TorusMap):
        est = estimate_torus(f)
    else:
        space = "sphere"
        a, start_spec = resolve_point(cfg.get("start", [0.3, 0.0]), space)
        samples = int(cfg.get("samples", 10_000))
        burn_in = int(cfg.get("burn_in", 100))
        resolved.update({"start": start_spec, "samples": samples,
                         "burn_in": burn_in})
        mu = sample_equilibrium(f, a, burn_in=burn_in, count=samples,
                                seed=seed)
        est = estimate_sphere(f, mu)
    path = os.path.join(out, "lyapunov.csv")
    write_csv(path, resolved, ["key", "value"],
              [(k, v) for k, v in est.rows()])
    write_sidecar(os.path.join(out, "lyapunov.json"), resolved, [path])
    return [path]


def run_acceptance(cfg: dict, out: str, seed: int) -> tuple[list[str], bool]:
    which = cfg.get("criteria")
    if which is not None:
        which = [int(k) for k in which]
        unknown = set(which) - set(DESCRIPTIONS)
        if unknown:
            raise ConfigError(f"unknown acceptance criteria {sorted(unknown)}")
    resolved = {"kind": "acceptance", "seed": seed,
                "criteria": which or sorted(DESCRIPTIONS)}
    rows = run_criteria(seed=seed, which=which)
    table = [(r.criterion, r.check, r.value, r.threshold, r.op, r.passed)
             for r in rows]
    path = os.path.join(out, "acceptance.csv")
    write_csv(path, resolved,
              ["criterion", "check", "value", "threshold", "op", "passed"],
              table)
    write_sidecar(os.path.join(out, "acceptance.json"), resolved, [path])
    for crit, desc, ok in summarize(rows):
        print(f"criterion {crit} ({desc}): {'PASS' if ok else 'FAIL'}")
    all_ok = all(r.passed for r in rows)
    return [path], all_ok


RUNNERS = {
    "degrees": run_degrees,
    "fiber": run_fiber,
    "equidist_backward": run_equidist_backward,
    "equidist_periodic": run_equidist_periodic,
    "branches": run_branches,
    "exceptional": run_exceptional,
    "lyapunov": run_lyapunov,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equidyn",
        description="equidistribution experiments for sphere and torus maps",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version",
                        version=f"equidyn {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in list(RUNNERS) + ["acceptance"]:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", default=None,
                       help="JSON experiment config"
                            + (" (optional)" if kind == "acceptance"
                               else " (required)"))
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=None,
                       help="reserved; kernels run single-threaded for "
                            "byte-reproducibility")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.kind != "acceptance" and args.config is None:
            raise ConfigError(f"{args.kind} requires --config PATH")
        cfg = load_config(args.config, args.kind)
        seed = args.seed if args.seed is not None else \
            int(cfg.get("seed", DEFAULT_SEED))
        out = args.out
        os.makedirs(out, exist_ok=True)
        if args.kind == "acceptance":
            _, ok = run_acceptance(cfg, out, seed)
            return 0 if ok else 5
        RUNNERS[args.kind](cfg, out, seed)
        return 0
    except EquidynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
