"""Warp-profile solver: first integral, symmetry, period, slice data."""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hawkmass import (
    RangeError,
    WarpFactor,
    conserved_mass,
    slice_geometry,
    slice_mass_derivative,
    solve_warp_factor,
    static_chart_roots,
)


def expected_mass(a):
    # first integral evaluated at the minimum: u = a, u' = 0
    return 0.5 * a * (1.0 - a * a / 3.0)


def test_initial_conditions(w05):
    u, up = w05.evaluate(0.0)
    assert u == 0.5
    assert up == 0.0


def test_conserved_mass_value(w05):
    assert_allclose(w05.mass, 11.0 / 48.0, rtol=0, atol=1e-12)


def test_mass_across_family(warp_family):
    for a, w in warp_family.items():
        assert_allclose(w.mass, expected_mass(a), rtol=0, atol=1e-12)


def test_first_integral_constant_along_profile(w05):
    r = np.linspace(0.0, w05.r_max, 4001)
    u, up = w05.evaluate(r)
    m = 0.5 * u * (1.0 - up * up - u * u / 3.0)
    assert np.max(np.abs(m - w05.mass)) < 1e-9


def test_even_symmetry(w05):
    r = np.linspace(0.1, 5.0, 37)
    u_pos, up_pos = w05.evaluate(r)
    u_neg, up_neg = w05.evaluate(-r)
    assert_allclose(u_neg, u_pos, rtol=0, atol=0)
    assert_allclose(up_neg, -up_pos, rtol=0, atol=0)


def test_period_spot_value(w05):
    """Frozen from a converged run; guards against solver regressions."""
    assert w05.period == pytest.approx(6.154021055616072, abs=1e-9)
    u_per, up_per = w05.evaluate(w05.period)
    assert u_per == pytest.approx(0.5, abs=1e-10)
    assert up_per == pytest.approx(0.0, abs=1e-9)


def test_maximum_radius_is_static_chart_root(w05):
    """u at the half period must solve u^3 - 3u + 6m = 0."""
    roots = static_chart_roots(w05.mass)
    u_max, _ = w05.evaluate(w05.period / 2.0)
    assert_allclose(u_max, max(roots), rtol=0, atol=1e-11)
    assert_allclose(min(roots), 0.5, rtol=0, atol=1e-11)


def test_static_chart_roots_values():
    roots = static_chart_roots(11.0 / 48.0)
    assert len(roots) == 2
    assert_allclose(sorted(roots), [0.5, 1.4270509831248423], rtol=0, atol=1e-12)


def test_static_chart_roots_domain():
    with pytest.raises(ValueError):
        static_chart_roots(1.0 / 3.0)
    with pytest.raises(ValueError):
        static_chart_roots(0.0)
    with pytest.raises(ValueError):
        static_chart_roots(-0.1)


@pytest.mark.parametrize("a", [0.0, 1.0, 1.5, -0.2])
def test_minimum_radius_guard(a):
    with pytest.raises(ValueError):
        solve_warp_factor(a, 10.0)


def test_tolerance_guard():
    with pytest.raises(ValueError):
        solve_warp_factor(0.5, 10.0, tol=1e-15)
    with pytest.raises(ValueError):
        solve_warp_factor(0.5, 10.0, tol=1e-2)


def test_range_guard(w05):
    with pytest.raises(RangeError):
        w05.evaluate(w05.r_max + 1.0)
    with pytest.raises(RangeError):
        w05.evaluate(-(w05.r_max + 1.0))


def test_evaluate_scalar_and_vector_agree(w05):
    r = np.array([0.3, 1.1, 2.9])
    u_vec, up_vec = w05.evaluate(r)
    for i, ri in enumerate(r):
        u_i, up_i = w05.evaluate(float(ri))
        assert u_i == u_vec[i]
        assert up_i == up_vec[i]


def test_curvature_accel_matches_profile_equation(w05):
    r = np.linspace(0.0, 6.0, 101)
    u, up = w05.evaluate(r)
    upp = w05.curvature_accel(u, up)
    assert_allclose(upp, (1.0 - up * up) / (2.0 * u) - u / 2.0,
                    rtol=0, atol=1e-15)


def test_taylor_patch_tracks_solution(w05):
    patch = w05.taylor_patch(1.3)
    s = np.linspace(-0.01, 0.01, 11)
    u_ref, up_ref = w05.evaluate(1.3 + s)
    u_p, up_p = patch.eval(s)
    assert_allclose(u_p, u_ref, rtol=0, atol=1e-12)
    assert_allclose(up_p, up_ref, rtol=0, atol=1e-11)


def test_json_round_trip(w05):
    w2 = WarpFactor.from_json(w05.to_json())
    assert w2.a == w05.a
    assert w2.mass == w05.mass
    assert w2.period == w05.period
    assert np.array_equal(w2.samples, w05.samples)


def test_json_rejects_tampered_mass(w05):
    doc = json.loads(w05.to_json())
    doc["mass"] = doc["mass"] + 1e-3
    with pytest.raises(ValueError):
        WarpFactor.from_json(json.dumps(doc))


def test_conserved_mass_helper(w05):
    assert conserved_mass(w05, 0.9) == pytest.approx(w05.mass, abs=1e-10)


def test_slice_geometry_closed_forms(w05):
    geo = slice_geometry(w05, 0.7)
    u, up = w05.evaluate(0.7)
    assert_allclose(geo.area, 4.0 * np.pi * u * u, rtol=1e-15)
    assert_allclose(geo.mean_curvature, -2.0 * up / u, rtol=1e-15)
    assert_allclose(geo.shape_operator_sq, geo.mean_curvature ** 2 / 2.0,
                    rtol=1e-14)
    assert_allclose(geo.gauss_curvature, 1.0 / (u * u), rtol=1e-15)
    upp = w05.curvature_accel(u, up)
    assert_allclose(geo.ricci_normal, -2.0 * upp / u, rtol=1e-14)


def test_slice_hawking_mass_is_conserved_mass(warp_family):
    for w in warp_family.values():
        for r in (0.0, 0.4, 1.7, 4.2):
            geo = slice_geometry(w, r)
            assert abs(geo.hawking_mass - w.mass) < 1e-10


def test_slice_mass_derivative_vanishes(w05):
    for r in np.linspace(0.0, 6.1, 41):
        assert abs(slice_mass_derivative(w05, float(r))) < 1e-12


def test_minimal_slice_is_minimal(w05):
    geo = slice_geometry(w05, 0.0)
    assert geo.mean_curvature == 0.0
    assert geo.shape_operator_sq == 0.0


def test_solve_rejects_bad_range():
    with pytest.raises(ValueError):
        solve_warp_factor(0.5, 0.0)
    with pytest.raises(ValueError):
        solve_warp_factor(0.5, 2000.0)


def test_coarse_tolerance_still_honors_postcondition():
    """Even at the loosest admissible tolerance the first integral must
    drift less than 10 * tol; smoke for the documented guarantee."""
    w = solve_warp_factor(0.5, 10.0, tol=1e-4)
    r = np.linspace(0.0, 10.0, 1001)
    u, up = w.evaluate(r)
    drift = np.max(np.abs(0.5 * u * (1.0 - up * up - u * u / 3.0) - w.mass))
    assert drift < 1e-3


def test_small_minimum_radius_solves():
    w = solve_warp_factor(0.02, 4.0)
    assert_allclose(w.mass, expected_mass(0.02), rtol=0, atol=1e-12)
    u, up = w.evaluate(2.0)
    m = 0.5 * u * (1.0 - up * up - u * u / 3.0)
    assert abs(m - w.mass) < 1e-9
