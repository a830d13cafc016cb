"""Command-line interface: verification suites, tensor dumps, batch reports.

Exit codes: 0 all checks pass, 1 at least one verification failure,
2 configuration or input error.  Reports are deterministic for a fixed
config and seed (wall time is printed, never persisted).
"""
from __future__ import annotations

import csv
import io
import json
import sys
import time

import click
import numpy as np

from .divergences import kl_two_point, quadratic_two_point, euclidean_chart
from .extraction import (
    extract_divergence_metric,
    g_F,
    omega_F,
    omega_pullback_diagonal,
    pullback_diagonal,
)
from .geometry import (
    DifferentiationConfig,
    DomainError,
    Point,
    coordinate_frame,
    diagonal,
)
from .pure_states import (
    HilbertPoint,
    hermitian_h_matrices,
    kahler_from_potential,
    real_coords,
    verify_fisher_rao_recovery,
)
from .quantum import gell_mann_basis, verify_quantum_pipeline
from .sampling import random_simplex_point, random_unit_state
from .simplex import (
    SimplexPoint,
    chart_coords,
    fisher_rao_matrix,
    kl_metric_closed_form,
    simplex_frame,
)


class ConfigError(ValueError):
    pass


MANIFOLDS = ("simplex", "su_times_simplex", "pure_states")
DIVERGENCES = ("kl", "umegaki", "quadratic")

DEFAULT_TOLERANCES = {
    "metric_rel": 1e-6,
    "omega_pullback_abs": 1e-8,
    "cross_block_abs": 1e-8,
    "kahler_abs": 1e-8,
}


def load_config(path, seed_override=None):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")

    manifold = raw.get("manifold")
    if manifold not in MANIFOLDS:
        raise ConfigError(f"manifold must be one of {MANIFOLDS}, got {manifold!r}")
    if manifold == "pure_states":
        divergence = None  # the Kaehler suite has no two-point function
    else:
        divergence = raw.get("divergence", "kl" if manifold == "simplex" else "umegaki")
        if divergence not in DIVERGENCES:
            raise ConfigError(f"divergence must be one of {DIVERGENCES}, got {divergence!r}")
        if divergence == "umegaki" and manifold != "su_times_simplex":
            raise ConfigError("umegaki requires manifold su_times_simplex")
        if divergence == "kl" and manifold != "simplex":
            raise ConfigError("kl requires manifold simplex")

    n = raw.get("dimension")
    if not isinstance(n, int) or n < 2:
        raise ConfigError("dimension must be an integer >= 2")

    points = raw.get("points", {"random": True, "count": 20, "seed": 0})
    if isinstance(points, dict):
        count = int(points.get("count", 20))
        seed = int(points.get("seed", 0))
        explicit = None
    elif isinstance(points, list):
        explicit = [np.asarray(p, dtype=float) for p in points]
        count = len(explicit)
        seed = 0
    else:
        raise ConfigError("points must be a list or a {random, count, seed} object")
    if seed_override is not None:
        seed = int(seed_override)

    scheme_raw = dict(raw.get("scheme", {}))
    try:
        cfg = DifferentiationConfig(**scheme_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad scheme block: {exc}")

    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(raw.get("tolerances", {}))

    return {
        "manifold": manifold,
        "divergence": divergence,
        "n": n,
        "count": count,
        "seed": seed,
        "explicit": explicit,
        "cfg": cfg,
        "tolerances": tolerances,
        "output_path": raw.get("output_path"),
        "output_format": raw.get("output_format", "json"),
    }


def _simplex_points(rc):
    if rc["explicit"] is not None:
        return [SimplexPoint(p) for p in rc["explicit"]]
    rng = np.random.default_rng(rc["seed"])
    return [random_simplex_point(rng, rc["n"], min_prob=0.02) for _ in range(rc["count"])]


def _rows_simplex_kl(rc):
    cfg, tol = rc["cfg"], rc["tolerances"]
    frame = simplex_frame(rc["n"])
    f = kl_two_point(rc["n"])
    rows = []
    for sp in _simplex_points(rc):
        base = Point(chart_coords(sp), frame.chart)
        got = extract_divergence_metric(f, base, frame, cfg).components
        fr2 = 2.0 * fisher_rao_matrix(sp)
        closed = kl_metric_closed_form(sp).components
        dev_fr = float(np.max(np.abs(got - fr2)) / np.max(np.abs(fr2)))
        dev_closed = float(np.max(np.abs(got - closed)) / np.max(np.abs(closed)))
        omega = omega_pullback_diagonal(f, base, frame, cfg).components
        dev_omega = float(np.max(np.abs(omega))) if omega.size else 0.0
        pt = list(map(float, sp.probs))
        rows.append(_row(pt, "metric_vs_2fisher_rao", dev_fr, tol["metric_rel"]))
        rows.append(_row(pt, "metric_vs_closed_form", dev_closed, tol["metric_rel"]))
        rows.append(_row(pt, "omega_diagonal_pullback", dev_omega, tol["omega_pullback_abs"]))
    return rows


def _rows_simplex_quadratic(rc):
    cfg, tol = rc["cfg"], rc["tolerances"]
    d = rc["n"] - 1
    frame = coordinate_frame(euclidean_chart(d))
    f = quadratic_two_point(d)
    rows = []
    rng = np.random.default_rng(rc["seed"])
    pts = (
        [np.asarray(p, dtype=float) for p in rc["explicit"]]
        if rc["explicit"] is not None
        else [rng.standard_normal(d) for _ in range(rc["count"])]
    )
    for x in pts:
        base = Point(x, frame.chart)
        got = extract_divergence_metric(f, base, frame, cfg).components
        dev = float(np.max(np.abs(got - 2.0 * np.eye(d)))) / 2.0
        rows.append(_row(list(map(float, x)), "metric_vs_2identity", dev, tol["metric_rel"]))
    return rows


def _rows_quantum(rc):
    tol = rc["tolerances"]
    rep = verify_quantum_pipeline(rc["n"], rc["count"], rc["cfg"], seed=rc["seed"])
    pt = ["aggregate"]
    return [
        _row(pt, "cross_block_zero", rep["cross_block_max"], tol["cross_block_abs"]),
        _row(pt, "classical_vs_2fisher_rao", rep["classical_rel_max"], tol["metric_rel"]),
        _row(pt, "quantum_vs_trace_formula", rep["quantum_rel_max"], tol["metric_rel"]),
        _row(pt, "quantum_block_diagonality", rep["quantum_offdiag_max"], tol["cross_block_abs"]),
    ]


def _rows_pure_states(rc):
    cfg, tol = rc["cfg"], rc["tolerances"]
    rng = np.random.default_rng(rc["seed"])
    rows = []
    for _ in range(rc["count"]):
        psi = random_unit_state(rng, rc["n"])
        omega, g = kahler_from_potential(HilbertPoint(psi), cfg)
        re_h, im_h = hermitian_h_matrices(psi)
        pt = list(map(float, real_coords(psi)))
        rows.append(_row(pt, "omega_vs_im_h", float(np.max(np.abs(omega - im_h))), tol["kahler_abs"]))
        rows.append(_row(pt, "g_vs_re_h", float(np.max(np.abs(g - re_h))), tol["kahler_abs"]))
    sp = random_simplex_point(np.random.default_rng(rc["seed"]), rc["n"], min_prob=0.05)
    rep = verify_fisher_rao_recovery(sp, cfg)
    rows.append(_row(list(map(float, sp.probs)), "fisher_rao_recovery",
                     rep["fisher_rao_rel_max"], tol["metric_rel"]))
    return rows


def _row(point, check, deviation, tolerance):
    return {
        "point": point,
        "check": check,
        "deviation": float(deviation),
        "tolerance": float(tolerance),
        "passed": bool(deviation <= tolerance),
    }


def run_suite(rc):
    manifold, divergence = rc["manifold"], rc["divergence"]
    if manifold == "simplex" and divergence == "kl":
        rows = _rows_simplex_kl(rc)
    elif manifold == "simplex" and divergence == "quadratic":
        rows = _rows_simplex_quadratic(rc)
    elif manifold == "su_times_simplex":
        rows = _rows_quantum(rc)
    else:
        rows = _rows_pure_states(rc)
    report = {
        "suite": f"{manifold}/{divergence}" if manifold != "pure_states" else "pure_states",
        "dimension": rc["n"],
        "seed": rc["seed"],
        "scheme": rc["cfg"].scheme,
        "checks": sorted({r["check"] for r in rows}),
        "max_deviation": max((r["deviation"] for r in rows), default=0.0),
        "tolerances": rc["tolerances"],
        "all_passed": all(r["passed"] for r in rows),
        "rows": rows,
    }
    return report


def _serialize(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ConfigError(f"output_format must be json or csv, got {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["point", "check", "deviation", "tolerance", "passed"])
    for r in report["rows"]:
        writer.writerow([
            ";".join(str(c) for c in r["point"]),
            r["check"],
            repr(r["deviation"]),
            repr(r["tolerance"]),
            int(r["passed"]),
        ])
    return buf.getvalue()


@click.group()
def main():
    """Divergence-to-tensor extraction toolkit."""


def _load_or_exit(config, seed):
    try:
        return load_config(config, seed_override=seed)
    except (ConfigError, DomainError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


@main.command()
@click.option("--config", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
def verify(config, seed):
    """Run the verification suite for the configured manifold."""
    rc = _load_or_exit(config, seed)
    t0 = time.perf_counter()
    try:
        report = run_suite(rc)
    except DomainError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(2)
    elapsed = time.perf_counter() - t0
    for check in report["checks"]:
        worst = max(r["deviation"] for r in report["rows"] if r["check"] == check)
        ok = all(r["passed"] for r in report["rows"] if r["check"] == check)
        click.echo(f"{'PASS' if ok else 'FAIL'} {check}: max deviation {worst:.3e}")
    click.echo(f"suite {report['suite']} seed={report['seed']} wall={elapsed:.2f}s")
    sys.exit(0 if report["all_passed"] else 1)


@main.command()
@click.option("--config", required=True, type=click.Path())
@click.option("--point", "point_json", required=True,
              help="JSON array: chart coordinates (or probabilities for the simplex).")
@click.option("--out", type=click.Path(), default=None)
def tensor(config, point_json, out):
    """Dump omega_F / g_F evaluations at one point."""
    rc = _load_or_exit(config, None)
    try:
        coords = np.asarray(json.loads(point_json), dtype=float)
    except (json.JSONDecodeError, ValueError) as exc:
        click.echo(f"input error: bad point: {exc}", err=True)
        sys.exit(2)
    try:
        dump = _tensor_dump(rc, coords)
    except (DomainError, ValueError) as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(2)
    text = json.dumps(dump, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    sys.exit(0)


def _tensor_dump(rc, coords):
    cfg = rc["cfg"]
    note = "evaluation convention: components are tensor values on frame pairs"
    if rc["manifold"] == "pure_states":
        psi = coords[: rc["n"]] + 1j * coords[rc["n"]:]
        omega, g = kahler_from_potential(HilbertPoint(psi), cfg)
        return {
            "manifold": "pure_states",
            "base_point": list(map(float, coords)),
            "frame": "real coordinate frame (q, p)",
            "omega": omega.tolist(),
            "g": g.tolist(),
            "scheme": cfg.scheme,
            "convention": note,
        }
    if rc["manifold"] == "simplex" and rc["divergence"] == "kl":
        sp = SimplexPoint(coords)
        frame = simplex_frame(rc["n"])
        f = kl_two_point(rc["n"])
        base = Point(chart_coords(sp), frame.chart)
    elif rc["manifold"] == "simplex":
        d = rc["n"] - 1
        frame = coordinate_frame(euclidean_chart(d))
        f = quadratic_two_point(d)
        base = Point(coords, frame.chart)
    else:
        raise DomainError("tensor dumps support simplex and pure_states manifolds")
    pp = diagonal(base)
    omega = omega_F(f, pp, frame, cfg)
    g = g_F(f, pp, frame, cfg, omega=omega)
    return {
        "manifold": rc["manifold"],
        "divergence": rc["divergence"],
        "base_point": list(map(float, base.coords)),
        "frame": frame.label,
        "omega_product": omega.components.tolist(),
        "g_product": g.components.tolist(),
        "g_diagonal_pullback": pullback_diagonal(g, frame).components.tolist(),
        "scheme": cfg.scheme,
        "convention": note,
    }


@main.command()
@click.option("--config", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None)
def report(config, seed, out, fmt):
    """Write a per-point, per-check batch report."""
    rc = _load_or_exit(config, seed)
    fmt = fmt or rc["output_format"]
    out = out or rc["output_path"]
    try:
        rep = run_suite(rc)
        text = _serialize(rep, fmt)
    except (ConfigError, DomainError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            click.echo(f"error: cannot write {out}: {exc}", err=True)
            sys.exit(2)
    else:
        click.echo(text, nl=False)
    sys.exit(0 if rep["all_passed"] else 1)


if __name__ == "__main__":
    main()
