import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from fracheat import measures
from fracheat.errors import NumericalError, ValidationError


def test_isotropic_symbol_is_the_pure_power():
    for n in (1, 2):
        for s in (0.25, 0.5, 0.8):
            mu = measures.SpectralMeasure.isotropic(n, s)
            xi = np.array([0.5, 1.0, 3.0]) if n == 1 else np.array(
                [[0.5, 0.0], [0.0, 1.0], [3.0, 4.0]])
            r = np.abs(xi) if n == 1 else np.hypot(xi[:, 0], xi[:, 1])
            assert np.allclose(measures.symbol(mu, xi), r ** (2 * s),
                               rtol=1e-12)


def test_half_half_measure_symbol_at_two():
    mu = measures.SpectralMeasure(1, 0.5, atoms=(0.5, 0.5))
    assert measures.symbol(mu, 2.0) == pytest.approx(2.0, rel=1e-14)


def test_atom_weights_add():
    mu = measures.SpectralMeasure(1, 0.3, atoms=(1.2, 1.2))
    xi = np.array([0.7, 2.0])
    assert np.allclose(measures.symbol(mu, xi), 2.4 * np.abs(xi) ** 0.6,
                       rtol=1e-12)
    assert mu.mass() == pytest.approx(2.4)


def test_asymmetric_atoms_are_symmetrized():
    # only the even part of the measure enters the operator
    mu = measures.SpectralMeasure(1, 0.5, atoms=(1.0, 0.0))
    assert mu.atoms == (0.5, 0.5)
    with pytest.raises(ValidationError):
        measures.SpectralMeasure(1, 0.5, atoms=(1.0, 0.0),
                                 strict_symmetry=True)


def test_order_validation():
    for bad in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ValidationError):
            measures.SpectralMeasure.isotropic(1, bad)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(0.05, 0.95),
       t=st.floats(0.01, 100.0),
       x=st.floats(-50.0, 50.0))
def test_symbol_homogeneity(s, t, x):
    assume(x == 0.0 or abs(x) > 1e-30)  # keep |x|^{2s} clear of underflow
    mu = measures.SpectralMeasure.isotropic(1, s)
    a1 = measures.symbol(mu, x)
    at = measures.symbol(mu, t * x)
    assert at == pytest.approx(t ** (2 * s) * a1, rel=1e-10, abs=1e-300)


def test_segment_symbol_quadrature_agreement():
    mu = measures.SpectralMeasure(2, 0.6,
                                  segments=[(-0.3, 0.4, 1.0), (1.1, 1.9, 0.5)])
    xi = np.array([[1.0, 0.0], [0.3, -2.0], [5.0, 5.0]])
    exact = measures.symbol(mu, xi, method="exact")
    quad = measures.symbol(mu, xi, method="quadrature", quad_order=256)
    # Gauss-Legendre sees the |cos|^{2s} kink inside a segment, so its
    # convergence is algebraic; 1e-5 still separates right from wrong branch.
    assert np.allclose(exact, quad, rtol=1e-5)


def test_ellipticity_1d_is_the_mass():
    mu = measures.SpectralMeasure(1, 0.4, atoms=(0.7, 0.7))
    mu1, mu2 = measures.ellipticity(mu)
    assert mu1 == pytest.approx(1.4)
    assert mu2 == pytest.approx(1.4)


def test_ellipticity_2d_brackets_the_symbol():
    mu = measures.SpectralMeasure(2, 0.5, segments=[(-0.2, 0.2, 1.0)])
    mu1, mu2 = measures.ellipticity(mu)
    assert 0 < mu1 < mu2
    rng = np.random.default_rng(5)
    xi = rng.standard_normal((200, 2))
    r = np.hypot(xi[:, 0], xi[:, 1])
    a = measures.symbol(mu, xi)
    assert np.all(a >= mu1 * r - 1e-10)
    assert np.all(a <= mu2 * r + 1e-10)


def test_power_concavity_certificate():
    rep = measures.power_concavity(0.5, n_trials=2000, seed=7)
    assert rep.ok
    assert rep.max_slack <= rep.tolerance


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.0, 10.0), b=st.floats(0.0, 10.0), s=st.floats(0.05, 0.95))
def test_power_concavity_pointwise(a, b, s):
    # (a+b)^s + (a-b)^s <= 2 a^s for a >= b >= 0: the scalar inequality
    # behind the second-difference bound, checked directly
    hi, lo = max(a, b), min(a, b)
    lhs = (hi + lo) ** s + (hi - lo) ** s
    assert lhs <= 2.0 * hi ** s + 1e-9 * max(1.0, lhs)


def test_second_difference_certificate_isotropic():
    for mu in (measures.SpectralMeasure.isotropic(1, 0.5),
               measures.SpectralMeasure.isotropic(2, 0.7)):
        rep = measures.second_difference_certificate(mu, n_trials=2000,
                                                     seed=11)
        assert rep.ok


def test_weyl_constant_interval_closed_form():
    mu = measures.SpectralMeasure.isotropic(1, 0.5)
    wc = measures.weyl_constant(mu, 2.0)
    assert wc.c0 == pytest.approx(np.pi / 2, rel=1e-12)
    assert wc.mc_sigma == 0.0
    assert wc.lower <= wc.c0 <= wc.upper


def test_weyl_constant_scales_with_order():
    for s in (0.3, 0.7):
        mu = measures.SpectralMeasure.isotropic(1, s)
        wc = measures.weyl_constant(mu, 2.0)
        assert wc.c0 == pytest.approx((np.pi / 2) ** (2 * s), rel=1e-12)


def test_weyl_constant_2d_sandwich_is_seeded():
    mu = measures.SpectralMeasure(2, 0.5, segments=[(-0.4, 0.4, 1.0),
                                                    (np.pi - 0.4, np.pi + 0.4, 1.0)])
    wc1 = measures.weyl_constant(mu, np.pi, mc_samples=20_000, seed=3)
    wc2 = measures.weyl_constant(mu, np.pi, mc_samples=20_000, seed=3)
    assert wc1.c0 == wc2.c0
    assert wc1.lower - 3 * wc1.mc_sigma <= wc1.c0 <= wc1.upper + 3 * wc1.mc_sigma


def test_measure_json_round_trip():
    cases = [measures.SpectralMeasure.isotropic(1, 0.5),
             measures.SpectralMeasure(1, 0.3, atoms=(1.2, 1.2)),
             measures.SpectralMeasure(2, 0.7, segments=[(0.0, 1.0, 2.0)])]
    for mu in cases:
        doc = mu.to_json()
        back = measures.SpectralMeasure.from_json(doc)
        assert back.to_json() == doc
