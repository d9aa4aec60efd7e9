"""Acceptance gate: ten criteria, each with pinned tolerances.

Every test ends in a single verdict line (also echoed in the terminal
summary) of the form ``[PASS] criterion 03 ...`` so the run log reads as
a checklist.  Tolerances are fixed here, not imported, so loosening one
is a visible diff.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES

from hawkmass import (
    HarmonicField,
    SweepConfig,
    build_graph,
    fd_second_variation,
    foliation_scan,
    hawking_mass_deficit,
    minimal_slice_rigidity,
    perturbation_sweep,
    second_variation_by_degree,
    second_variation_minimal,
    slice_geometry,
    slice_mass_derivative,
    slice_second_variation,
    solve_warp_factor,
    strict_stability_inequality_check,
)

TOL_MASS_DRIFT = 1e-9          # criterion 1
TOL_RIGIDITY = 1e-10           # criterion 2
TOL_SLICE_MASS = 1e-8          # criterion 3
TOL_CROSS_FORMULA = 1e-10      # criterion 4
TOL_FD_MATCH = 1e-4            # criterion 5
FD_SLOPE_WINDOW = 0.2          # criterion 5
QUADRATIC_MATCH = 0.05         # criterion 6
TOL_SLACK_ZERO = 1e-10         # criterion 7
TOL_EL_SLICE = 1e-7            # criterion 8
EL_CONTROL_FLOOR = 1e-3        # criterion 8
TOL_CURV_SLOPE = 1e-6          # criterion 9

FAMILY = (0.3, 0.5, 0.7, 0.9)
SPOT_DEGREE_1 = -2.75 / np.pi


def _verdict(number, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:02d} {name}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_conserved_mass():
    worst_drift = 0.0
    worst_time = 0.0
    for a in FAMILY:
        t0 = time.perf_counter()
        w = solve_warp_factor(a, 13.0)
        r = np.linspace(0.0, 2.0 * w.period, 6001)
        u, up = w.evaluate(r)
        drift = float(np.max(np.abs(
            0.5 * u * (1.0 - up * up - u * u / 3.0)
            - 0.5 * a * (1.0 - a * a / 3.0))))
        elapsed = time.perf_counter() - t0
        worst_drift = max(worst_drift, drift)
        worst_time = max(worst_time, elapsed)
    ok = worst_drift < TOL_MASS_DRIFT and worst_time < 1.0
    _verdict(1, "conserved mass over two periods", ok,
             f"max drift {worst_drift:.2e} (tol {TOL_MASS_DRIFT}), "
             f"max time {worst_time:.2f}s (limit 1s)")


def test_criterion_02_rigidity_equality(warp_family):
    worst = 0.0
    for a, w in warp_family.items():
        rep = minimal_slice_rigidity(w)
        lam = (1.0 - a * a) / (a * a)
        worst = max(
            worst,
            abs(rep.margin),
            abs(rep.first_eigenvalue - lam),
            abs(rep.shape_operator_sq),
            abs(rep.gauss_curvature - 4.0 * np.pi / rep.area),
            abs(rep.ricci_normal + lam),
        )
    ok = worst < TOL_RIGIDITY
    _verdict(2, "area bound equality and rigidity data", ok,
             f"worst deviation {worst:.2e} (tol {TOL_RIGIDITY})")


def test_criterion_03_slice_mass_constancy(w05):
    r = np.linspace(0.0, w05.period, 64, endpoint=False)
    dev = max(abs(slice_geometry(w05, float(ri)).hawking_mass - w05.mass)
              for ri in r)
    deriv = max(abs(slice_mass_derivative(w05, float(ri)))
                for ri in np.linspace(0.0, w05.period, 301))
    ok = dev < TOL_SLICE_MASS and deriv < TOL_SLICE_MASS
    _verdict(3, "slice-mass constancy on 64 slices", ok,
             f"max deviation {dev:.2e}, max derivative {deriv:.2e} "
             f"(tol {TOL_SLICE_MASS})")


def test_criterion_04_cross_formula_identity(w05, w08):
    worst = 0.0
    for w, seed0 in ((w05, 0), (w08, 10)):
        for seed in range(seed0, seed0 + 10):
            rng = np.random.default_rng(seed)
            phi = HarmonicField(rng.standard_normal(49))
            diff = abs(slice_second_variation(w, 0.0, phi)
                       - second_variation_minimal(w, phi))
            worst = max(worst, diff)
    phi1 = HarmonicField.single(1, 0, 2.0)   # unit L2 norm on the a=0.5 slice
    spot_err = max(
        abs(slice_second_variation(w05, 0.0, phi1) - SPOT_DEGREE_1),
        abs(second_variation_minimal(w05, phi1) - SPOT_DEGREE_1))
    ok = worst < TOL_CROSS_FORMULA and spot_err < TOL_CROSS_FORMULA
    _verdict(4, "cross-formula identity at the minimal slice", ok,
             f"worst of 20 random fields {worst:.2e}, spot error "
             f"{spot_err:.2e} (tol {TOL_CROSS_FORMULA})")


def test_criterion_05_fd_oracle(w05):
    t0 = time.perf_counter()
    phi1 = HarmonicField.single(1, 0, 2.0)
    fd = fd_second_variation(w05, 0.0, phi1, step=1e-3)
    match = abs(fd.value - SPOT_DEGREE_1)
    steps = (1e-2, 1e-3, 1e-4)
    errors = [abs(fd_second_variation(w05, 0.0, phi1, step=h).value
                  - SPOT_DEGREE_1) for h in steps]
    slope = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    elapsed = time.perf_counter() - t0
    ok = (match < TOL_FD_MATCH
          and abs(slope - 2.0) < FD_SLOPE_WINDOW
          and elapsed < 30.0)
    _verdict(5, "finite-difference oracle", ok,
             f"|fd - spectral| {match:.2e} (tol {TOL_FD_MATCH}), "
             f"slope {slope:.3f} (2.0 +- {FD_SLOPE_WINDOW}), "
             f"{elapsed:.1f}s (limit 30s)")


def test_criterion_06_perturbation_sweeps():
    negatives = []
    for base_r in (0.0, 0.4):
        cfg = SweepConfig(a=0.5, base_r=base_r, epsilon=1e-2,
                          n_samples=100, master_seed=42)
        report = perturbation_sweep(cfg)
        n_neg = sum(1 for rec in report.records
                    if rec.kind == "graph" and rec.deficit < 0.0)
        negatives.append((base_r, n_neg, len(report.records)))
    w = solve_warp_factor(0.5, 8.0)
    worst_ratio_err = 0.0
    eps = 1e-3
    for base_r in (0.0, 0.4):
        u, _ = w.evaluate(base_r)
        q = second_variation_by_degree(w, base_r, 4)
        for l in (1, 2, 4):
            phi = HarmonicField.single(l, 0, 1.0 / u)
            deficit = hawking_mass_deficit(w, base_r, phi, eps)
            ratio = deficit / (0.5 * q[l] * eps * eps)
            worst_ratio_err = max(worst_ratio_err, abs(ratio - 1.0))
    all_neg = all(n == total == 100 for _, n, total in negatives)
    ok = all_neg and worst_ratio_err < QUADRATIC_MATCH
    _verdict(6, "strict mass loss under random perturbation", ok,
             f"negatives {negatives}, worst quadratic mismatch "
             f"{worst_ratio_err:.2%} (limit {QUADRATIC_MATCH:.0%})")


def test_criterion_07_strict_stability_slack(warp_family):
    worst_zero = 0.0
    min_positive = np.inf
    for a, w in warp_family.items():
        const = HarmonicField.single(0, 0, 1.0)
        worst_zero = max(worst_zero,
                         abs(strict_stability_inequality_check(w, const).slack))
        for l in range(1, 5):
            phi = HarmonicField.single(l, 0, 1.0 / a)
            min_positive = min(
                min_positive,
                strict_stability_inequality_check(w, phi).slack)
    ok = worst_zero < TOL_SLACK_ZERO and min_positive > 0.0
    _verdict(7, "strict-stability equality case", ok,
             f"constant slack {worst_zero:.2e} (tol {TOL_SLACK_ZERO}), "
             f"smallest nonconstant slack {min_positive:.3f} > 0")


def test_criterion_08_euler_lagrange_residual(w05, w08):
    slices = [(w05, r) for r in (0.0, 0.3, 0.7, 1.5, 3.0)] + [(w08, 0.5)]
    worst_slice = max(
        build_graph(w, r, HarmonicField.zeros(2)).el_residual_max()
        for w, r in slices)
    control = build_graph(w05, 0.3, HarmonicField.single(2, 0, 1.0),
                          scale=0.05).el_residual_max()
    ok = worst_slice < TOL_EL_SLICE and control > EL_CONTROL_FLOOR
    _verdict(8, "Euler-Lagrange residual", ok,
             f"slices max {worst_slice:.2e} (tol {TOL_EL_SLICE}), "
             f"control {control:.2e} (floor {EL_CONTROL_FLOOR})")


def test_criterion_09_foliation_sign_structure(w05):
    scan = foliation_scan(
        w05, np.linspace(0.0, w05.period, 64, endpoint=False))
    slope_err = abs(scan.dh_dr_at_zero + scan.first_eigenvalue_minimal)
    flip = scan.margin_flip_radius
    inside = scan.r_values < (flip if flip is not None else np.inf)
    margin_ok = (flip is not None and np.count_nonzero(inside) >= 5
                 and bool(np.all(scan.margins[inside] > 0.0)))
    ok = scan.h_sign_ok and slope_err < TOL_CURV_SLOPE and margin_ok
    _verdict(9, "foliation sign structure", ok,
             f"H sign ok {scan.h_sign_ok}, curvature slope error "
             f"{slope_err:.2e} (tol {TOL_CURV_SLOPE}), margin > 0 on "
             f"[0, {flip:.3f})")


def test_criterion_10_sweep_determinism():
    cfg = SweepConfig(a=0.5, base_r=0.0, epsilon=1e-2, n_samples=100,
                      master_seed=42)
    payloads = {}
    csvs = {}
    for workers in (1, 2, 8):
        report = perturbation_sweep(cfg, workers=workers)
        payloads[workers] = report.records_payload()
        csvs[workers] = report.to_csv()
    ok = (payloads[1] == payloads[2] == payloads[8]
          and csvs[1] == csvs[2] == csvs[8])
    _verdict(10, "worker-count determinism", ok,
             f"payload bytes {len(payloads[1])}, identical across "
             f"workers (1, 2, 8): {ok}")
