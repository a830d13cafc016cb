"""Acceptance gate: one test (and one printed PASS/FAIL line) per criterion.

Each criterion states its tolerance and, where applicable, its runtime
budget; deviations are computed against independent closed forms.
"""
import json
import time

import numpy as np
import pytest
from click.testing import CliRunner

from divgeo.cli import main as cli_main
from divgeo.divergences import (
    check_divergence_axioms,
    euclidean_chart,
    kl_two_point,
    quadratic_two_point,
    TwoPointFunction,
)
from divgeo.extraction import (
    apply_J,
    extract_divergence_metric,
    omega_F,
    omega_block_expansion,
    omega_pullback_diagonal,
)
from divgeo.geometry import (
    FORWARD_MODE,
    DifferentiationConfig,
    Point,
    ProductPoint,
    coordinate_frame,
    diagonal,
    second_lie_derivative,
)
from divgeo.pure_states import (
    HilbertPoint,
    complex_structure_H0,
    hermitian_h_matrices,
    kahler_from_potential,
    real_coords,
    verify_fisher_rao_recovery,
)
from divgeo.quantum import (
    gell_mann_basis,
    product_chart,
    product_point,
    umegaki_metric_closed_form,
    umegaki_two_point,
    verify_quantum_pipeline,
)
from divgeo.sampling import (
    random_simplex_point,
    random_special_unitary,
    random_unit_state,
)
from divgeo.simplex import (
    SimplexPoint,
    chart_coords,
    fisher_rao_matrix,
    kl_metric_closed_form,
    simplex_frame,
)

CFG_F = DifferentiationConfig(scheme=FORWARD_MODE)
CFG_R = DifferentiationConfig()

_T0 = time.perf_counter()


def report(capsys, num, label, ok, detail):
    with capsys.disabled():
        print(f"{'PASS' if ok else 'FAIL'} criterion {num} ({label}): {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_simplex_kl_identity(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for n in (2, 3, 5):
        f = kl_two_point(n)
        frame = simplex_frame(n)
        for _ in range(100):
            sp = random_simplex_point(rng, n, min_prob=0.02)
            base = Point(chart_coords(sp), frame.chart)
            got = extract_divergence_metric(f, base, frame, CFG_R, check=False).components
            fr2 = 2.0 * fisher_rao_matrix(sp)
            closed = kl_metric_closed_form(sp).components
            scale = np.max(np.abs(fr2))
            worst = max(
                worst,
                np.max(np.abs(got - fr2)) / scale,
                np.max(np.abs(got - closed)) / scale,
            )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed <= 5.0
    report(capsys, 1, "simplex/KL = 2 x Fisher-Rao",
           ok, f"max rel dev {worst:.2e} (tol 1e-6), {elapsed:.1f}s (limit 5s)")


def test_criterion_2_presymplectic_vanishing(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    worst = 0.0
    for n in (2, 3, 5):
        f = kl_two_point(n)
        frame = simplex_frame(n)
        for _ in range(50):
            sp = random_simplex_point(rng, n, min_prob=0.02)
            base = Point(chart_coords(sp), frame.chart)
            om = omega_pullback_diagonal(f, base, frame, CFG_R).components
            if om.size:
                worst = max(worst, np.max(np.abs(om)))
    for n in (2, 3):
        basis = gell_mann_basis(n)
        for _ in range(50):
            sp = random_simplex_point(rng, n, min_prob=0.05, min_gap=0.05)
            u = random_special_unitary(rng, n)
            _, frame = product_chart(n, basis, u)
            base = product_point(frame, sp)
            f = umegaki_two_point(frame)
            om = omega_pullback_diagonal(f, base, frame, CFG_R).components
            worst = max(worst, np.max(np.abs(om)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed <= 20.0
    report(capsys, 2, "diagonal pullback of omega vanishes",
           ok, f"max |omega| {worst:.2e} (tol 1e-8), {elapsed:.1f}s (limit 20s)")


def test_criterion_3_almost_complex_algebra(capsys):
    rng = np.random.default_rng(303)
    # J^2 = -Id exactly, including on frame coefficient rows
    j_exact = True
    frame3 = simplex_frame(3)
    for _ in range(100):
        v = rng.standard_normal(2 * int(rng.integers(1, 6)))
        j_exact &= bool(np.array_equal(apply_J(apply_J(v)), -v))
    x = np.asarray(frame3.vector_coeffs(Point(np.array([0.5, 0.3]), frame3.chart)))
    for row in np.block([[x, np.zeros_like(x)], [np.zeros_like(x), x]]):
        j_exact &= bool(np.array_equal(apply_J(apply_J(row)), -row))

    f = kl_two_point(3)
    worst_anti = 0.0
    worst_routes = 0.0
    for _ in range(100):
        pl = random_simplex_point(rng, 3, min_prob=0.05)
        pr = random_simplex_point(rng, 3, min_prob=0.05)
        pp = ProductPoint(
            Point(chart_coords(pl), frame3.chart), Point(chart_coords(pr), frame3.chart)
        )
        om = omega_F(f, pp, frame3, CFG_F).components
        worst_anti = max(worst_anti, np.max(np.abs(om + om.T)))
        om2 = omega_block_expansion(f, pp, frame3, CFG_F).components
        scale = max(np.max(np.abs(om)), 1e-30)
        worst_routes = max(worst_routes, np.max(np.abs(om - om2)) / scale)
    ok = j_exact and worst_anti <= 1e-9 and worst_routes <= 1e-6
    report(capsys, 3, "almost-complex algebra",
           ok, f"J^2 exact: {j_exact}, antisymmetry {worst_anti:.2e} (tol 1e-9), "
               f"route agreement {worst_routes:.2e} rel (tol 1e-6)")


def test_criterion_4_quantum_block_structure(capsys):
    t0 = time.perf_counter()
    worst_cross = worst_cls = worst_off = worst_cartan = worst_rel = 0.0
    for n in (2, 3, 4):
        rep = verify_quantum_pipeline(n, 20, CFG_R, seed=404)
        worst_cross = max(worst_cross, rep["cross_block_max"])
        worst_cls = max(worst_cls, rep["classical_rel_max"])
        worst_off = max(worst_off, rep["quantum_offdiag_max"])
        worst_cartan = max(worst_cartan, rep["cartan_max"])
        worst_rel = max(worst_rel, rep["quantum_rel_max"])
    # explicit oracle: N=2, p=(3/4, 1/4) -> lambda/sigma entries 2*0.5*ln3
    basis = gell_mann_basis(2)
    sp = SimplexPoint(np.array([0.75, 0.25]))
    g = umegaki_metric_closed_form(sp, basis).components
    oracle_ok = abs(g[0, 0] - np.log(3.0)) <= 1e-12 and abs(g[1, 1] - np.log(3.0)) <= 1e-12
    elapsed = time.perf_counter() - t0
    ok = (
        worst_cross <= 1e-8 and worst_cls <= 1e-6 and worst_off <= 1e-8
        and worst_cartan <= 1e-8 and worst_rel <= 1e-6 and oracle_ok
        and elapsed <= 60.0
    )
    report(capsys, 4, "Umegaki block structure",
           ok, f"cross {worst_cross:.1e}, classical rel {worst_cls:.1e}, "
               f"off-diag {worst_off:.1e}, Cartan {worst_cartan:.1e}, "
               f"trace-formula rel {worst_rel:.1e}, ln3 oracle {oracle_ok}, "
               f"{elapsed:.1f}s (limit 60s)")


def test_criterion_5_divergence_axioms(capsys):
    rng = np.random.default_rng(505)
    frame = simplex_frame(3)

    def simplex_sampler(i):
        return Point(chart_coords(random_simplex_point(rng, 3, min_prob=0.02)), frame.chart)

    rep_kl = check_divergence_axioms(
        kl_two_point(3), frame, simplex_sampler, 200, CFG_F, gradient_tol=1e-7
    )
    eframe = coordinate_frame(euclidean_chart(3))
    rep_quad = check_divergence_axioms(
        quadratic_two_point(3), eframe,
        lambda i: Point(rng.standard_normal(3), eframe.chart), 200, CFG_F,
        gradient_tol=1e-7,
    )
    basis = gell_mann_basis(2)
    _, qframe = product_chart(2, basis, random_special_unitary(rng, 2))
    rep_um = check_divergence_axioms(
        umegaki_two_point(qframe), qframe,
        lambda i: product_point(qframe, random_simplex_point(rng, 2, min_prob=0.05)),
        200, CFG_R, gradient_tol=1e-7,
    )
    signed = TwoPointFunction(
        lambda pp: float(np.sum(pp.left.coords - pp.right.coords)), "signed", "euclid(3)"
    )
    rep_signed = check_divergence_axioms(
        signed, eframe, lambda i: Point(rng.standard_normal(3), eframe.chart), 5, CFG_R
    )
    ok = rep_kl.passed and rep_quad.passed and rep_um.passed and not rep_signed.passed
    grads = max(rep_kl.max_diagonal_gradient, rep_quad.max_diagonal_gradient,
                rep_um.max_diagonal_gradient)
    report(capsys, 5, "divergence axioms",
           ok, f"max diagonal gradient {grads:.2e} (tol 1e-7) over 200 points each, "
               f"signed counterexample flagged: {not rep_signed.passed}")


def test_criterion_6_pure_state_recovery(capsys):
    rng = np.random.default_rng(606)
    worst_form = worst_fr = worst_deg = 0.0
    for n in (2, 3, 4):
        for _ in range(50):
            psi = random_unit_state(rng, n) * rng.uniform(0.5, 2.0)
            omega, g = kahler_from_potential(HilbertPoint(psi), CFG_R)
            re_h, im_h = hermitian_h_matrices(psi)
            worst_form = max(worst_form, np.max(np.abs(omega - im_h)),
                             np.max(np.abs(g - re_h)))
            z = real_coords(psi)
            for ker in (z, complex_structure_H0(z)):
                worst_deg = max(worst_deg, np.max(np.abs(omega @ ker)),
                                np.max(np.abs(g @ ker)))
        sp = random_simplex_point(rng, n, min_prob=0.05)
        rep = verify_fisher_rao_recovery(sp, CFG_R)
        worst_fr = max(worst_fr, rep["fisher_rao_rel_max"])
    ok = worst_form <= 1e-8 and worst_fr <= 1e-6 and worst_deg <= 1e-9
    report(capsys, 6, "pure-state h recovery",
           ok, f"|omega-Im h|,|g-Re h| {worst_form:.1e} (tol 1e-8), "
               f"Fisher-Rao rel {worst_fr:.1e} (tol 1e-6), degeneracy {worst_deg:.1e} (tol 1e-9)")


def test_criterion_7_numerical_backend(capsys):
    chart = euclidean_chart(2)
    frame = coordinate_frame(chart)
    x0 = np.array([0.7, -0.4])
    y0 = np.array([1.2, 0.9])
    pp = ProductPoint(Point(x0, chart), Point(y0, chart))
    a_mat = np.array([[1.3, -0.2], [0.4, 2.1]])

    def poly(pq):
        x, y = pq.left.coords, pq.right.coords
        return x[0] * x[0] * y[1] + x[1] * y[0] * y[0] * y[0]

    def logsum(pq):
        from divgeo.dual import log

        x, y = pq.left.coords, pq.right.coords
        return log(x[0] * y[0] + x[1] * y[1] + 3.0)

    def bilinear(pq):
        x, y = pq.left.coords, pq.right.coords
        acc = 0.0
        for j in range(2):
            for k in range(2):
                acc = acc + a_mat[j, k] * x[j] * y[k]
        return acc

    s = x0[0] * y0[0] + x0[1] * y0[1] + 3.0
    closed = {
        "polynomial": np.array([[0.0, 2 * x0[0]], [3 * y0[0] ** 2, 0.0]]),
        "log_sum": np.eye(2) / s - np.outer(y0, x0) / s**2,
        "bilinear_trace": a_mat,
    }
    fns = {"polynomial": poly, "log_sum": logsum, "bilinear_trace": bilinear}

    worst = 0.0
    for name, fn in fns.items():
        f = TwoPointFunction(fn, name, chart.label)
        for cfg in (CFG_F, CFG_R):
            got = np.array(
                [
                    [second_lie_derivative(f, ("left", j), ("right", k), pp, frame, cfg)
                     for k in range(2)]
                    for j in range(2)
                ]
            )
            scale = max(np.max(np.abs(closed[name])), 1.0)
            worst = max(worst, np.max(np.abs(got - closed[name])) / scale)
    ok = worst <= 1e-6
    report(capsys, 7, "second Lie derivatives vs closed forms",
           ok, f"max rel dev {worst:.2e} (tol 1e-6) under both schemes")


def test_criterion_8_determinism_and_wall_time(capsys, tmp_path):
    cfg = {
        "manifold": "simplex",
        "dimension": 3,
        "divergence": "kl",
        "points": {"random": True, "count": 10, "seed": 808},
        "scheme": {"scheme": "forward_mode"},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    runner = CliRunner()
    outs = []
    for fmt in ("json", "csv"):
        pair = []
        for _ in range(2):
            res = runner.invoke(
                cli_main, ["report", "--config", str(path), "--format", fmt]
            )
            assert res.exit_code == 0, res.output
            pair.append(res.output)
        outs.append(pair[0] == pair[1])
    elapsed = time.perf_counter() - _T0
    ok = all(outs) and elapsed <= 120.0
    report(capsys, 8, "determinism and wall time",
           ok, f"byte-identical reports (json, csv): {all(outs)}, "
               f"acceptance module wall time {elapsed:.1f}s (limit 120s)")
