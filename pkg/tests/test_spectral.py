import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracheat import grids, measures, operator, spectral
from fracheat.errors import ValidationError


def _system(s=0.5, h=2.0 ** -6, m=None):
    mu = measures.SpectralMeasure.isotropic(1, s)
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), h)
    op = operator.assemble(mu, grid)
    return mu, op, spectral.eigenpairs(op, m=m)


def test_eigenpairs_solve_the_generalized_problem():
    _, op, eig = _system(m=10)
    K = np.asarray(op.stiffness)
    M = np.asarray(op.mass_matrix)
    for k in range(eig.m):
        v = eig.vectors[:, k]
        r = K @ v - eig.eigenvalues[k] * (M @ v)
        assert np.linalg.norm(r) < 1e-10 * max(1.0, eig.eigenvalues[k])


def test_eigenvectors_mass_orthonormal():
    _, op, eig = _system(m=8)
    M = np.asarray(op.mass_matrix)
    G = eig.vectors.T @ M @ eig.vectors
    assert np.allclose(G, np.eye(eig.m), atol=1e-10)


def test_eigenvalues_positive_increasing():
    _, _, eig = _system(m=20)
    lam = eig.eigenvalues
    assert lam[0] > 0
    assert np.all(np.diff(lam) > 0)


def test_ground_state_interval_half():
    # lambda_1 for (-Delta)^{1/2} on (-1,1) is 1.157791 to 6 digits
    # (known from spectral computations of the fractional Laplacian)
    _, _, eig = _system(h=2.0 ** -7, m=1)
    assert eig.eigenvalues[0] == pytest.approx(1.157791, rel=2e-3)


def test_ground_state_positive_mode():
    _, _, eig = _system(m=2)
    v1 = eig.vectors[:, 0]
    assert np.all(v1 > 0) or np.all(v1 < 0)
    # second mode is odd: one sign change
    v2 = eig.vectors[:, 1]
    assert np.sum(np.diff(np.sign(v2)) != 0) == 1


def test_weyl_audit_interval():
    mu, _, eig = _system(h=2.0 ** -7, m=40)
    wc = measures.weyl_constant(mu, 2.0)
    aud = spectral.weyl_audit(eig, wc, k_range=(15, 35))
    assert aud.median_error < 0.05
    assert aud.sandwich_ok
    assert not aud.drifting


def test_sup_norm_audit_runs():
    _, _, eig = _system(m=6)
    aud = spectral.sup_norm_audit(eig, w=2)
    assert aud.ok
    assert aud.table.shape[1] == 3


BOOTSTRAP_TABLE = {(1, 0.25): 3, (1, 0.4): 2, (2, 0.5): 3, (3, 0.5): 3,
                   (4, 0.5): 4}


def test_bootstrap_table():
    for (n, s), w in BOOTSTRAP_TABLE.items():
        assert spectral.bootstrap_exponents(n, s).w == w


def test_bootstrap_supercritical_example():
    plan = spectral.bootstrap_exponents(3, 0.5)
    assert plan.branch == "supercritical"
    assert [float(p) for p in plan.exponents] == [2.0, 6.0]
    assert plan.big_n == 1
    assert plan.w == 3
    d = plan.to_dict()
    assert d["p"] == [2.0, 6.0] and d["N"] == 1 and d["w"] == 3


def test_bootstrap_subcritical_branch():
    plan = spectral.bootstrap_exponents(1, 0.75)
    assert plan.branch == "subcritical"
    assert plan.w == 2


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 5), num=st.integers(1, 19))
def test_bootstrap_invariants(n, num):
    s = num / 20
    plan = spectral.bootstrap_exponents(n, s)
    assert plan.w >= 2
    ps = [float(p) for p in plan.exponents]
    assert ps[0] == 2.0
    assert all(b > a for a, b in zip(ps, ps[1:]))
    # smaller s (relative to n) never shortens the ladder
    if num < 19:
        deeper = spectral.bootstrap_exponents(n, (num + 1) / 20)
        assert deeper.w <= plan.w


def test_bootstrap_rejects_bad_inputs():
    with pytest.raises(ValidationError):
        spectral.bootstrap_exponents(0, 0.5)
    with pytest.raises(ValidationError):
        spectral.bootstrap_exponents(1, 1.0)


def test_save_round_trip(tmp_path):
    _, _, eig = _system(m=5)
    csv_path = tmp_path / "eig.csv"
    vec_path = tmp_path / "eig.npy"
    spectral.save_eigensystem(eig, csv_path, vec_path, config_hash="abc123")
    lam = spectral.load_eigenvalues(csv_path)
    assert np.allclose(lam, eig.eigenvalues, rtol=0, atol=0)
    vecs = np.load(vec_path)
    assert np.array_equal(vecs, eig.vectors)
    text = csv_path.read_text()
    assert "abc123" in text.splitlines()[1]


def test_eigenfunction_accessor():
    _, op, eig = _system(m=3)
    phi = eig.eigenfunction(0)
    assert isinstance(phi, operator.GridFunction)
    assert np.allclose(phi.values, eig.vectors[:, 0])
    assert np.allclose(eig.sup_norms(),
                       np.max(np.abs(eig.vectors), axis=0))
