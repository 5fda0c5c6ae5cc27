import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cvfeedback import (
    UnstableSystem,
    closed_form_covariance,
    diffusion_matrix,
    drift_matrix,
    epr_variance,
    make_params,
    solve_lyapunov,
    steady_covariance,
)

entries = st.floats(-1.0, 1.0)


def test_vacuum():
    g = solve_lyapunov(0.5 * np.eye(4), 0.5 * np.eye(4))
    np.testing.assert_allclose(g.gamma_full, 0.5 * np.eye(4), atol=1e-15)


@pytest.mark.parametrize("eta", [0.0, 0.3, 1.0])
def test_no_feedback_quadrature_variance(eta):
    g = steady_covariance(make_params(0.25, eta, 0.0))
    assert g.gamma_full[1, 1] == pytest.approx(2 / 3, abs=1e-14)


def test_closed_form_values():
    np.testing.assert_allclose(closed_form_covariance(make_params(0.0, 1.0)).gamma_full, 0.5 * np.eye(4))
    g = closed_form_covariance(make_params(0.25, 0.6))
    assert g.gamma[0, 0] == pytest.approx(2 / 3, abs=1e-15)
    assert g.gamma[1, 1] == pytest.approx(2 / 3, abs=1e-15)
    assert g.sigma[0, 0] == pytest.approx(1 / 3, abs=1e-15)
    assert g.sigma[1, 1] == pytest.approx(-1 / 3, abs=1e-15)
    # denominator 1.04; lam + lam^2/eta = -0.1875
    g = closed_form_covariance(make_params(0.3, 1.0, -0.25))
    assert g.gamma[0, 0] == pytest.approx(0.675 / 1.04, abs=1e-14)
    assert g.gamma[0, 0] == pytest.approx(0.64904, abs=1e-5)


def test_numeric_matches_closed_form_example():
    p = make_params(0.25, 0.7, -0.2)
    np.testing.assert_allclose(
        steady_covariance(p).gamma_full, closed_form_covariance(p).gamma_full, rtol=0, atol=1e-10
    )


def test_unstable_rejected():
    with pytest.raises(UnstableSystem):
        closed_form_covariance(make_params(0.5, 1.0))
    with pytest.raises(UnstableSystem):
        steady_covariance(make_params(0.1, 1.0, 0.4))
    with pytest.raises(UnstableSystem):
        solve_lyapunov(-np.eye(4), np.eye(4))


def test_epr_variance_examples():
    assert epr_variance(solve_lyapunov(0.5 * np.eye(4), 0.5 * np.eye(4))) == pytest.approx(1.0, abs=1e-15)
    assert epr_variance(closed_form_covariance(make_params(0.25, 1.0))) == pytest.approx(1 / 1.5, abs=1e-15)
    assert epr_variance(closed_form_covariance(make_params(0.45, 1.0))) == pytest.approx(0.5263, abs=1e-4)


@pytest.mark.parametrize("chi", np.round(np.arange(0.0, 0.46, 0.05), 2))
def test_epr_identity_no_feedback(chi):
    g = steady_covariance(make_params(chi, 0.5))
    assert abs(epr_variance(g) - 1 / (1 + 2 * chi)) <= 1e-12


def test_oracle_equivalence_grid(triples):
    for chi, eta, lam in triples:
        p = make_params(chi, eta, lam)
        num = steady_covariance(p).gamma_full
        ref = closed_form_covariance(p).gamma_full
        assert np.max(np.abs(num - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref))), (chi, eta, lam)


def test_structure_of_model_covariance(triples):
    for chi, eta, lam in triples[::7]:
        g = steady_covariance(make_params(chi, eta, lam))
        G = g.gamma_full
        np.testing.assert_allclose(g.gamma, g.gamma2, atol=1e-12)
        assert np.max(np.abs(G[np.ix_([0, 2], [1, 3])])) <= 1e-12
        assert np.linalg.eigvalsh(G)[0] > 0


@given(st.floats(0.0, 0.49), st.floats(0.05, 1.0), st.floats(-1.0, 0.2))
def test_y_sector_independent_of_feedback(chi, eta, lam):
    g = closed_form_covariance(make_params(chi, eta, lam))
    ref = closed_form_covariance(make_params(chi, 1.0, 0.0))
    assert g.gamma[1, 1] == ref.gamma[1, 1]
    assert g.sigma[1, 1] == ref.sigma[1, 1]


@given(st.floats(0.0, 0.49), st.floats(0.05, 1.0), st.floats(-1.0, 0.2))
def test_normal_mode_variances(chi, eta, lam):
    G = closed_form_covariance(make_params(chi, eta, lam)).gamma_full
    s = 1 / np.sqrt(2)
    rot = np.array([[s, 0, s, 0], [s, 0, -s, 0], [0, s, 0, s], [0, s, 0, -s]])
    var = np.diag(rot @ G @ rot.T)
    gam, sig = G[:2, :2], G[:2, 2:]
    plus = np.linalg.eigvalsh(gam + sig)
    minus = np.linalg.eigvalsh(gam - sig)
    np.testing.assert_allclose(np.sort(var), np.sort(np.concatenate([plus, minus])), atol=1e-12 * max(1, np.max(var)))


@st.composite
def stable_systems(draw):
    a = draw(arrays(float, (4, 4), elements=entries))
    k = draw(arrays(float, (4, 4), elements=entries))
    c = draw(arrays(float, (4, 4), elements=entries))
    shift = draw(st.floats(0.05, 2.0))
    # positive definite symmetric part => spectrum in the right half-plane
    m = a @ a.T + shift * np.eye(4) + (k - k.T)
    n = c @ c.T + 1e-3 * np.eye(4)
    return m, n


@given(stable_systems())
def test_general_solver_against_scipy(system):
    m, n = system
    g = solve_lyapunov(m, n).gamma_full
    scale = max(1.0, np.max(np.abs(n)))
    assert np.max(np.abs(m @ g + g @ m.T - n)) <= 1e-12 * scale
    ref = scipy.linalg.solve_continuous_lyapunov(m, n)
    np.testing.assert_allclose(g, ref, rtol=1e-8, atol=1e-10 * max(1.0, np.max(np.abs(ref))))


def test_solver_is_deterministic():
    p = make_params(0.3, 0.7, -0.05)
    a = solve_lyapunov(drift_matrix(p), diffusion_matrix(p)).gamma_full
    b = solve_lyapunov(drift_matrix(p), diffusion_matrix(p)).gamma_full
    assert a.tobytes() == b.tobytes()
