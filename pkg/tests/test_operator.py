import math

import numpy as np
import pytest

from fracheat import grids, measures, operator

# Frozen reference values for the 1D Toeplitz weights (unit spacing):
# closed-form piecewise-cubic hat autocorrelation integrated against the
# |y|^{-1-2s} kernel.  The s = 1/2 diagonal is exactly 4 ln 2.
WEIGHTS = {
    0.25: [3.534622398917, -0.041557045173, -0.440217147227,
           -0.207972215206, -0.130284621623, -0.091791813893],
    0.5: [2.772588722240, -0.601422145473, -0.366900140348,
          -0.126091300851, -0.066822676751, -0.041703956837],
    0.75: [4.165592445347, -1.568789197728, -0.330583213601,
           -0.077414977340, -0.034482383330, -0.019017063744],
}


def test_stiffness_weight_table():
    for s, row in WEIGHTS.items():
        got = [operator.stiffness_weight(k, s) for k in range(6)]
        assert np.allclose(got, row, rtol=0, atol=5e-13)


def test_diagonal_weight_closed_form_at_half():
    assert operator.stiffness_weight(0, 0.5) == pytest.approx(
        4 * np.log(2.0), rel=1e-14)


def test_radial_constant():
    # K(s) = Gamma(1+2s) sin(pi s) / pi; at s = 1/2 this is 1/pi
    assert operator.radial_constant(0.5) == pytest.approx(1 / np.pi,
                                                          rel=1e-14)
    assert operator.radial_constant(0.25) == pytest.approx(0.199471140201,
                                                           rel=1e-11)


def test_hat_autocorrelation_peak():
    assert operator.hat_autocorrelation(np.array([0.0]))[0] == pytest.approx(
        2.0 / 3.0, rel=1e-14)
    # support is |v| < 2
    assert operator.hat_autocorrelation(np.array([2.0, 2.5])).max() == 0.0


def test_assembled_interval_row_golden():
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.125)
    op = operator.assemble(mu, grid)
    K = np.asarray(op.stiffness)
    assert K[7, 7] == pytest.approx(0.882542400611, rel=1e-11)
    assert K[7, 8] == pytest.approx(-0.191438614674, rel=1e-11)
    assert K[7, 10] == pytest.approx(-0.040136107623, rel=1e-11)
    assert np.allclose(K, K.T)


def test_mass_matrix_tridiagonal():
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.125)
    op = operator.assemble(mu, grid)
    M = np.asarray(op.mass_matrix)
    h = grid.h
    assert M[3, 3] == pytest.approx(2 * h / 3, rel=1e-13)
    assert M[3, 4] == pytest.approx(h / 6, rel=1e-13)
    assert M[3, 5] == 0.0
    # sum_ij M_ij = integral of (sum of hats)^2: the partition of unity is 1
    # on [-1+h, 1-h] and ramps linearly over the two boundary cells
    assert M.sum() == pytest.approx(2.0 - 4.0 * h / 3.0, rel=1e-12)


def test_interval_stiffness_is_an_m_matrix():
    mu = measures.SpectralMeasure.isotropic(1, 0.6)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.0625)
    op = operator.assemble(mu, grid)
    K = np.asarray(op.stiffness)
    off = K - np.diag(np.diag(K))
    assert np.all(off <= 1e-14)
    assert np.all(np.diag(K) > 0)
    # zero Dirichlet exterior: row sums positive (strict domination)
    assert np.all(K.sum(axis=1) > 0)


def test_assembled_rectangle_entries_golden():
    mu = measures.SpectralMeasure.isotropic(2, 0.5)
    grid = grids.build_grid(grids.Rectangle(0.0, 2.0, 0.0, 2.0), 0.25)
    op = operator.assemble(mu, grid)
    K = np.asarray(op.stiffness)
    idx = {tuple(np.round(p, 9)): i for i, p in enumerate(grid.nodes)}
    c = idx[(1.0, 1.0)]
    assert K[c, c] == pytest.approx(0.231250795480, rel=1e-10)
    assert K[c, idx[(1.25, 1.0)]] == pytest.approx(0.007066129496, rel=1e-9)
    assert K[c, idx[(1.25, 1.25)]] == pytest.approx(-0.018777543243, rel=1e-9)
    assert K[c, idx[(1.5, 1.0)]] == pytest.approx(-0.008898641957, rel=1e-9)


def test_maximum_principle():
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.03125)
    op = operator.assemble(mu, grid)
    rng = np.random.default_rng(2)
    g = rng.uniform(0.0, 1.0, len(grid))
    u = operator.solve_dirichlet(op, g)
    assert np.all(u.values >= 0.0)


def test_ball_profile_solve_oracle():
    # L (1-x^2)^{1/2} = 1 on (-1,1) at s = 1/2
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 2.0 ** -6)
    op = operator.assemble(mu, grid)
    u = operator.solve_dirichlet(op, np.ones(len(grid)))
    x = grid.nodes[:, 0]
    exact = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    err = operator.GridFunction(grid, u.values - exact).nodal_l2()
    assert err / operator.GridFunction(grid, exact).nodal_l2() < 0.01


@pytest.mark.filterwarnings("ignore::UserWarning", "ignore::Warning")
@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_pointwise_application_matches_oracle(s):
    # second route to Lu, independent of the Galerkin matrices: the exact
    # profile (1-x^2)^s has Lu = Gamma(1+2s) inside (-1, 1)
    mu = measures.SpectralMeasure.isotropic(1, s)
    target = math.gamma(1 + 2 * s)

    def u(y):
        return max(1.0 - y * y, 0.0) ** s

    for x in (0.0, 0.3):
        val = operator.apply_pointwise(mu, u, x, support_radius=1.0,
                                       tol=1e-8)
        assert val.converged
        assert val.value == pytest.approx(target, rel=1e-8)


def test_grid_function_interpolation():
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.125)
    x = grid.nodes[:, 0]
    u = operator.GridFunction(grid, x ** 2)
    assert u(0.5) == pytest.approx(0.25, abs=1e-12)
    # linear interpolation between the nodes at 0.5 and 0.625,
    # zero beyond the boundary
    assert u(0.5625) == pytest.approx(0.5 * (0.25 + 0.390625), abs=1e-12)
    assert u(1.5) == 0.0


def test_grid_function_cell_quadrature_total():
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.125)
    u = operator.GridFunction(grid, np.ones(len(grid)))
    mids, vols, _ = u.cell_quadrature()
    assert vols.sum() == pytest.approx(2.0, rel=1e-12)
    avg = u.cell_average_of(u.values)
    assert np.all(avg <= 1.0 + 1e-12)


def test_nodal_l2_quadrature():
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 2.0 ** -7)
    op = operator.assemble(mu, grid)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(len(grid))
    u = operator.GridFunction(grid, v)
    # definition: node quadrature with weight h^n
    assert u.nodal_l2() == pytest.approx(
        np.sqrt(grid.h * np.sum(v ** 2)), rel=1e-12)
    # for a smooth profile the node rule agrees with the consistent mass
    # quadratic form up to the quadrature defect
    x = grid.nodes[:, 0]
    w = np.cos(0.5 * np.pi * x)
    uw = operator.GridFunction(grid, w)
    M = np.asarray(op.mass_matrix)
    assert uw.nodal_l2() == pytest.approx(np.sqrt(w @ M @ w), rel=1e-2)


def test_galerkin_energy_monotone_in_s():
    # larger s penalizes oscillation more: energy of a fixed rough vector
    # grows with s on a fixed grid (unit-diameter cells)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.0625)
    rng = np.random.default_rng(1)
    v = rng.standard_normal(len(grid))
    energies = []
    for s in (0.3, 0.5, 0.7):
        op = operator.assemble(measures.SpectralMeasure.isotropic(1, s), grid)
        energies.append(v @ np.asarray(op.stiffness) @ v)
    assert np.all(np.asarray(energies) > 0)


def test_solve_rejects_wrong_length():
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.125)
    op = operator.assemble(mu, grid)
    with pytest.raises(Exception):
        operator.solve_dirichlet(op, np.ones(len(grid) + 1))
