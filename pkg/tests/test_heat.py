import numpy as np
import pytest

from fracheat import grids, heat, measures, operator, spectral
from fracheat.errors import NumericalError, ValidationError


def _system(s=0.5, h=2.0 ** -5, m=None):
    mu = measures.SpectralMeasure.isotropic(1, s)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), h)
    op = operator.assemble(mu, grid)
    return grid, op, spectral.eigenpairs(op, m=m)


def _indicator(grid):
    x = grid.nodes[:, 0]
    return np.where(np.abs(x) < 0.5, 1.0, 0.0)


def test_projection_of_eigenmode_is_a_unit_vector():
    grid, op, eig = _system(m=6)
    sol = heat.project(eig, eig.vectors[:, 2])
    c = sol.coefficients
    assert c[2] == pytest.approx(1.0, rel=1e-12)
    assert np.max(np.abs(np.delete(c, 2))) < 1e-10


def test_full_reconstruction_at_time_zero():
    grid, op, eig = _system()
    u0 = _indicator(grid)
    sol = heat.project(eig, u0)
    u = heat.evaluate(sol, 0.0)
    assert np.allclose(u.values, u0, atol=1e-8)


def test_bessel_inequality_guard():
    grid, op, eig = _system(m=5)
    u0 = _indicator(grid)
    sol = heat.project(eig, u0)
    # truncated energy below datum energy
    assert np.sum(sol.coefficients ** 2) <= sol.datum_norm() ** 2 + 1e-12


def test_semigroup_property():
    grid, op, eig = _system()
    sol = heat.project(eig, _indicator(grid))
    u_direct = heat.evaluate(sol, 0.7)
    sol2 = heat.project(eig, heat.evaluate(sol, 0.3).values)
    u_two_step = heat.evaluate(sol2, 0.4)
    assert np.allclose(u_direct.values, u_two_step.values, atol=1e-10)


def test_time_derivative_matches_matrix_application():
    grid, op, eig = _system()
    sol = heat.project(eig, _indicator(grid))
    t = 0.25
    du = heat.time_derivative(sol, 1, t).values
    u = heat.evaluate(sol, t).values
    K = np.asarray(op.stiffness)
    M = np.asarray(op.mass_matrix)
    assert np.allclose(M @ du, -(K @ u), atol=1e-9)


def test_higher_derivatives_alternate_in_sign():
    grid, op, eig = _system(m=1)
    sol = heat.project(eig, eig.vectors[:, 0])
    t = 0.5
    lam = eig.eigenvalues[0]
    base = heat.evaluate(sol, t).values
    for j in (1, 2, 3):
        dj = heat.time_derivative(sol, j, t).values
        assert np.allclose(dj, (-lam) ** j * base, rtol=1e-10)


def test_negative_time_rejected():
    grid, op, eig = _system(m=3)
    sol = heat.project(eig, _indicator(grid))
    with pytest.raises(ValidationError):
        heat.evaluate(sol, -0.1)


def test_l2_decay_monotone_and_slope():
    grid, op, eig = _system(h=2.0 ** -6)
    sol = heat.project(eig, _indicator(grid))
    ts = np.linspace(0.0, 2.0, 50)
    norms = heat.l2_decay(sol, ts)
    assert np.all(np.diff(norms) <= 0)
    slope, target = heat.decay_slope(sol)
    assert target == pytest.approx(-2 * eig.eigenvalues[0])
    assert slope == pytest.approx(target, rel=1e-6)


def test_l2_decay_needs_increasing_times():
    grid, op, eig = _system(m=3)
    sol = heat.project(eig, _indicator(grid))
    with pytest.raises(ValidationError):
        heat.l2_decay(sol, np.array([1.0, 0.5]))


def test_truncation_envelope_bounds_the_discarded_tail():
    grid, op, eig_full = _system()
    grid2, op2, eig5 = _system(m=5)
    u0 = _indicator(grid)
    full = heat.evaluate(heat.project(eig_full, u0), 1.0).values
    trunc = heat.evaluate(heat.project(eig5, u0), 1.0).values
    gap = operator.GridFunction(grid, full - trunc).nodal_l2()
    env = heat.project(eig5, u0).truncation_envelope(1.0)
    assert gap <= env + 1e-12


def test_tail_bound_value_closed_form():
    # k0 = 0 collapses the upper incomplete gamma to the full one:
    # (3/2)^2 * 2^3 / 1 * Gamma(3) / 1 = 36 exactly for these inputs
    v = heat.tail_bound_value(c0=1.0, gamma=1.0, beta=2.0, w=2, t0=1.0, k0=0)
    assert v == pytest.approx(36.0, rel=1e-13)


def test_tail_bound_dominates_direct_sum():
    grid, op, eig = _system(h=2.0 ** -6)
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    wc = measures.weyl_constant(mu, 2.0)
    for t0 in (0.01, 0.1, 1.0):
        tb = heat.tail_bound(eig, wc.c0, w=2, t0=t0)
        assert tb.bound >= tb.direct_sum
        assert tb.k0 >= 1
        assert tb.beta == pytest.approx(2.0)  # w + n/2s - 1 = 2 + 2 - 1


def test_tail_bound_doubling_exponent():
    grid, op, eig = _system(h=2.0 ** -6)
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    wc = measures.weyl_constant(mu, 2.0)
    tb1 = heat.tail_bound(eig, wc.c0, w=2, t0=0.005)
    tb2 = heat.tail_bound(eig, wc.c0, w=2, t0=0.0025)
    assert tb2.bound / tb1.bound == pytest.approx(2.0 ** (tb1.beta + 1),
                                                  rel=1e-6)


def test_tail_bound_rejects_out_of_band_k0():
    grid, op, eig = _system(h=2.0 ** -6)
    with pytest.raises(ValidationError):
        heat.tail_bound(eig, c0=np.pi / 2, w=2, t0=0.1, k0=10 ** 6)


def test_uniform_bound_audit():
    grid, op, eig = _system(h=2.0 ** -6)
    sol = heat.project(eig, _indicator(grid))
    aud = heat.uniform_bound_audit(sol, t0=0.05)
    assert aud.monotone_cs
    assert aud.monotone_quotient
    assert aud.blowup_ok
    assert len(aud.ts) == len(aud.cs_seminorm)
    assert aud.c1 > 0 and aud.c2 > 0


def test_uniform_bound_audit_validates_eps():
    grid, op, eig = _system(m=3)
    sol = heat.project(eig, _indicator(grid))
    with pytest.raises(ValidationError):
        heat.uniform_bound_audit(sol, t0=0.1, eps=0.9)
