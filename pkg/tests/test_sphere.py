"""Spectral machinery on the unit sphere: transforms, jets, norms."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hawkmass import (
    HarmonicField,
    analyze,
    coeff_index,
    get_grid,
    gradient_norm_sq_integral,
    laplacian_unit,
    sobolev_norms,
    synthesize,
)

AMP_10 = np.sqrt(3.0 / (4.0 * np.pi))   # degree-1 zonal amplitude


def random_field(lmax, seed):
    rng = np.random.default_rng(seed)
    return HarmonicField(rng.standard_normal((lmax + 1) ** 2))


def test_quadrature_weights_cover_sphere():
    grid = get_grid(12)
    assert_allclose(np.sum(grid.quad_weights), 4.0 * np.pi, rtol=1e-14)


def test_coeff_index_layout():
    assert coeff_index(0, 0) == 0
    assert coeff_index(1, -1) == 1
    assert coeff_index(1, 0) == 2
    assert coeff_index(1, 1) == 3
    assert coeff_index(3, -3) == 9
    with pytest.raises(ValueError):
        coeff_index(2, 3)


def test_basis_orthonormality():
    """Gram matrix of all basis fields up to degree 8 under quadrature."""
    lmax = 8
    grid = get_grid(lmax)
    n = (lmax + 1) ** 2
    values = np.empty((n, grid.n_lat, grid.n_lon))
    for i in range(n):
        c = np.zeros(n)
        c[i] = 1.0
        values[i] = grid.synthesize(c)
    flat = values.reshape(n, -1)
    gram = flat @ (grid.quad_weights.reshape(-1)[:, None] * flat.T)
    assert np.max(np.abs(gram - np.eye(n))) < 1e-13


def test_analyze_synthesize_round_trip():
    field = random_field(12, seed=3)
    back = analyze(field.grid, synthesize(field))
    assert_allclose(back.coeffs, field.coeffs, rtol=0, atol=1e-13)


def test_synthesis_matches_scipy_harmonics():
    """Real basis against scipy's complex harmonics on a coarse grid."""
    from scipy.special import sph_harm_y

    grid = get_grid(6)
    theta = grid.theta[:, None] * np.ones((1, grid.n_lon))
    lam = np.ones((grid.n_lat, 1)) * (2.0 * np.pi *
                                      np.arange(grid.n_lon) / grid.n_lon)[None, :]
    for l, m in [(0, 0), (1, 0), (2, 1), (3, -2), (4, 4), (5, -5)]:
        ours = synthesize(HarmonicField.single(l, m, 1.0, grid=grid), grid)
        y = sph_harm_y(l, abs(m), theta, lam)
        if m == 0:
            ref = np.real(y)
        elif m > 0:
            ref = np.sqrt(2.0) * (-1.0) ** m * np.real(y)
        else:
            ref = np.sqrt(2.0) * (-1.0) ** m * np.imag(y)
        assert_allclose(ours, ref, rtol=0, atol=1e-13)


def test_parseval():
    field = random_field(9, seed=11)
    f = synthesize(field)
    quad = float(np.sum(field.grid.quad_weights * f * f))
    assert_allclose(quad, float(np.sum(field.coeffs ** 2)), rtol=1e-13)


def test_gradient_integral_closed_form():
    field = random_field(9, seed=12)
    expected = 0.0
    for l in range(10):
        for m in range(-l, l + 1):
            expected += l * (l + 1) * field.coeffs[coeff_index(l, m)] ** 2
    assert_allclose(gradient_norm_sq_integral(field), expected, rtol=1e-14)


def test_gradient_integral_matches_quadrature():
    field = random_field(7, seed=13)
    grid = field.grid
    jet = grid.synthesize_jet(field.coeffs)
    grad_sq = jet["ft"] ** 2 + (jet["fl"] / grid.sin_theta[:, None]) ** 2
    quad = float(np.sum(grid.quad_weights * grad_sq))
    # the integrand has twice the field's band limit; evaluate oversampled
    big = get_grid(2 * field.lmax)
    jet2 = big.synthesize_jet(field.padded(big.lmax))
    grad_sq2 = jet2["ft"] ** 2 + (jet2["fl"] / big.sin_theta[:, None]) ** 2
    quad2 = float(np.sum(big.quad_weights * grad_sq2))
    assert_allclose(quad2, gradient_norm_sq_integral(field), rtol=1e-13)
    assert_allclose(quad, quad2, rtol=1e-12)


def test_laplacian_unit_coefficients():
    field = random_field(6, seed=4)
    lap = laplacian_unit(field)
    for l in range(7):
        for m in range(-l, l + 1):
            i = coeff_index(l, m)
            assert lap.coeffs[i] == pytest.approx(
                -l * (l + 1) * field.coeffs[i], rel=1e-15)


def test_jet_degree_one_zonal():
    """All six jet components against hand values for sqrt(3/4pi) cos(theta)."""
    field = HarmonicField.single(1, 0, 1.0)
    grid = get_grid(8)
    jet = grid.synthesize_jet(field.padded(8))
    ct = np.cos(grid.theta)[:, None]
    st = grid.sin_theta[:, None]
    assert_allclose(jet["f"], AMP_10 * ct * np.ones_like(jet["f"]), atol=1e-15)
    assert_allclose(jet["ft"], -AMP_10 * st * np.ones_like(jet["f"]), atol=1e-15)
    assert_allclose(jet["ftt"], -AMP_10 * ct * np.ones_like(jet["f"]), atol=1e-15)
    assert np.max(np.abs(jet["fl"])) < 1e-15
    assert np.max(np.abs(jet["ftl"])) < 1e-15
    assert np.max(np.abs(jet["fll"])) < 1e-15


def test_jet_degree_one_sectoral():
    """Azimuthal derivatives for sqrt(3/4pi) sin(theta) cos(lambda)."""
    field = HarmonicField.single(1, 1, 1.0)
    grid = get_grid(8)
    jet = grid.synthesize_jet(field.padded(8))
    ct = np.cos(grid.theta)[:, None]
    st = grid.sin_theta[:, None]
    lam = 2.0 * np.pi * np.arange(grid.n_lon) / grid.n_lon
    cl = np.cos(lam)[None, :]
    sl = np.sin(lam)[None, :]
    assert_allclose(jet["f"], AMP_10 * st * cl, atol=1e-15)
    assert_allclose(jet["ft"], AMP_10 * ct * cl, atol=1e-15)
    assert_allclose(jet["fl"], -AMP_10 * st * sl, atol=1e-15)
    assert_allclose(jet["ftl"], -AMP_10 * ct * sl, atol=1e-15)
    assert_allclose(jet["fll"], -AMP_10 * st * cl, atol=1e-15)
    assert_allclose(jet["ftt"], -AMP_10 * st * cl, atol=1e-14)


def test_field_mean_and_removal():
    field = HarmonicField(np.array([2.0, 0.5, -1.0, 0.25]))
    assert field.mean() == pytest.approx(2.0 / np.sqrt(4.0 * np.pi), rel=1e-15)
    bare = field.remove_mean()
    assert bare.coeffs[0] == 0.0
    assert_allclose(bare.coeffs[1:], field.coeffs[1:], rtol=0, atol=0)


def test_degree_energies():
    field = HarmonicField(np.array([1.0, 1.0, 2.0, -2.0]))
    assert_allclose(field.degree_energies(), [1.0, 9.0], rtol=0, atol=0)


def test_padded_rejects_truncation():
    field = random_field(3, seed=5)
    padded = field.padded(6)
    assert padded.shape == (49,)
    assert_allclose(padded[:16], field.coeffs, rtol=0, atol=0)
    with pytest.raises(ValueError):
        field.padded(2)


def test_json_round_trip_drops_zeros():
    field = HarmonicField.single(2, -1, 0.75)
    doc = field.to_json()
    assert '"coeffs": [[2, -1, 0.75]]' in doc
    back = HarmonicField.from_json(doc)
    assert back.lmax == 2
    assert_allclose(back.coeffs, field.coeffs, rtol=0, atol=0)


def test_sobolev_norms_degree_one():
    """Slice radius 1: squares 1, 3, 7 accumulate l(l+1) powers."""
    n = sobolev_norms(HarmonicField.single(1, 0, 1.0), 1.0)
    assert n.l2 == pytest.approx(1.0, rel=1e-14)
    assert n.w12 == pytest.approx(np.sqrt(3.0), rel=1e-14)
    assert n.w22 == pytest.approx(np.sqrt(7.0), rel=1e-14)
    # sup estimates: within a few percent of the analytic suprema
    assert n.c0 == pytest.approx(AMP_10, rel=0.03)
    assert n.c1 == pytest.approx(AMP_10, rel=0.03)
    assert n.c2 == pytest.approx(AMP_10 * np.sqrt(2.0), rel=0.03)
    assert n.c2_bound == max(n.c0, n.c1, n.c2)


def test_sobolev_norms_slice_scaling():
    """Doubling the slice radius scales L2 up and curvature terms down."""
    field = random_field(5, seed=21)
    n1 = sobolev_norms(field, 1.0)
    n2 = sobolev_norms(field, 2.0)
    assert n2.l2 == pytest.approx(2.0 * n1.l2, rel=1e-13)
    assert n2.c0 == pytest.approx(n1.c0, rel=1e-13)
    assert n2.c1 == pytest.approx(n1.c1 / 2.0, rel=1e-13)
    assert n2.c2 == pytest.approx(n1.c2 / 4.0, rel=1e-13)


def test_field_requires_full_degree_blocks():
    with pytest.raises(ValueError):
        HarmonicField(np.zeros(5))   # not a perfect square


def test_grid_band_limit_guard():
    grid = get_grid(4)
    with pytest.raises(ValueError):
        HarmonicField(np.zeros(49), grid=grid)   # lmax 6 field on lmax 4 grid
