import numpy as np
import pytest
from hypothesis import given, strategies as st

import parastrip as ps
from parastrip.errors import ConfigurationError, DomainError
from parastrip.reaction import f_minus_prime, f_plus_prime, in_branch_domain


def test_smoother_params_validation():
    ps.SmootherParams(0.5)
    with pytest.raises(ConfigurationError):
        ps.SmootherParams(0.0)
    with pytest.raises(ConfigurationError):
        ps.SmootherParams(1.0)


def test_smoothers_restrict_to_arctan_profile_on_reals():
    eps = 0.01
    v = np.linspace(-3.0, 3.0, 41)
    want_plus = v * (0.5 + np.arctan(v / eps) / np.pi)
    got = np.real(ps.f_plus(eps, v))
    np.testing.assert_allclose(got, want_plus, atol=1e-14)
    np.testing.assert_allclose(np.imag(ps.f_plus(eps, v)), 0.0, atol=1e-16)
    # f_minus restricts to the signed negative part
    np.testing.assert_allclose(np.real(ps.f_minus(eps, v)), v - want_plus, atol=1e-14)


def test_smoothers_approximate_positive_negative_parts():
    eps = 0.01
    assert ps.f_plus(eps, 5.0).real == pytest.approx(5.0, abs=eps)
    assert abs(ps.f_plus(eps, -5.0)) < eps
    assert ps.f_minus(eps, -5.0).real == pytest.approx(-5.0, abs=eps)
    assert abs(ps.f_minus(eps, 5.0)) < eps


@given(
    re=st.floats(min_value=-50.0, max_value=50.0),
    im=st.floats(min_value=-0.2, max_value=0.2),
)
def test_smoother_identity_and_reflection(re, im):
    z = complex(re, im)
    if abs(z - 0.25j) < 1e-6 or abs(z + 0.25j) < 1e-6:
        z += 0.01
    eps = 0.25
    total = ps.f_plus(eps, z) + ps.f_minus(eps, z)
    assert abs(total - z) <= 1e-13 * max(1.0, abs(z))
    assert abs(ps.f_minus(eps, z) + ps.f_plus(eps, -z)) <= 1e-13 * max(1.0, abs(z))


def test_smoother_identity_check_helper(rng):
    samples = rng.uniform(-10, 10, 500) + 1j * rng.uniform(-0.4, 0.4, 500)
    assert ps.smoother_identity_check(0.5, samples) < 1e-13


def test_smoother_branch_cut_guard():
    with pytest.raises(DomainError, match="branch cut"):
        ps.f_plus(0.5, 0.7j)
    with pytest.raises(DomainError):
        ps.f_minus(0.5, -1.2j)
    mask = in_branch_domain(1.0, np.array([1.0 + 0j, 2.0j]))
    np.testing.assert_array_equal(mask, [True, False])


def test_smoother_derivatives():
    eps = 0.1
    z = np.array([0.3 + 0.02j, -1.7 + 0.0j, 4.0 - 0.05j])
    np.testing.assert_allclose(
        np.asarray(f_plus_prime(eps, z)) + np.asarray(f_minus_prime(eps, z)),
        1.0,
        atol=1e-14,
    )
    h = 1e-6
    fd = (np.asarray(ps.f_plus(eps, z + h)) - np.asarray(ps.f_plus(eps, z - h))) / (2 * h)
    np.testing.assert_allclose(np.asarray(f_plus_prime(eps, z)), fd, atol=1e-8)


def test_reaction_spec_jet_layout():
    spec = ps.ReactionSpec(order_half=1, components=2, dim=2, eval=lambda z, t, X: X[0])
    assert spec.jet_indices == [(0, 0), (0, 1), (1, 0)]
    assert spec.n_slots == 3
    assert spec.jet_arity == 6


def test_nemytskii_linear_reaction():
    g = ps.make_grid(1, np.pi, 32)
    spec = ps.ReactionSpec(order_half=1, components=1, dim=1, eval=lambda z, t, X: 2.0 * X[0])
    u = ps.ComplexField(g, np.exp(1j * g.axis_nodes())[np.newaxis])
    du = ps.spectral_derivative(u, (1,))
    out = ps.nemytskii(spec, [u, du], np.zeros(1), 0.0, g)
    np.testing.assert_allclose(out.values, 2.0 * u.values, atol=1e-14)
    with pytest.raises(ConfigurationError, match="jet fields"):
        ps.nemytskii(spec, [u], np.zeros(1), 0.0, g)


def test_nemytskii_domain_check_names_offender():
    g = ps.make_grid(1, 2.0, 16)
    spec = ps.ReactionSpec(
        order_half=0,
        components=1,
        dim=1,
        eval=lambda z, t, X: X[0],
        domain_check=lambda X: np.abs(X) < 0.5,
    )
    u = ps.ComplexField(g, np.linspace(0.0, 1.0, 16)[np.newaxis])
    with pytest.raises(DomainError, match="left the reaction's holomorphy domain"):
        ps.nemytskii(spec, [u], np.zeros(1), 0.0, g)


def test_jet_lipschitz_estimate_linear_case(rng):
    # d(3 u)/du = 3 everywhere, so the sampled sup is exactly 3
    spec = ps.ReactionSpec(order_half=0, components=1, dim=1, eval=lambda z, t, X: 3.0 * X[0])
    box = [((-1.0, 1.0), (-0.5, 0.5))]
    got = ps.jet_lipschitz_estimate(spec, box, [np.zeros(1)], [0.0], rng, n_samples=40)
    assert got == pytest.approx(3.0, rel=1e-6)


def test_jet_lipschitz_estimate_uses_analytic_jacobian(rng):
    def jac(z, t, X):
        out = np.zeros((1, 1, 1) + X.shape[2:], dtype=np.complex128)
        out[0, 0, 0] = 7.0
        return out

    spec = ps.ReactionSpec(
        order_half=0, components=1, dim=1, eval=lambda z, t, X: 7.0 * X[0], jet_jacobian=jac
    )
    box = [((0.0, 1.0), (0.0, 0.0))]
    got = ps.jet_lipschitz_estimate(spec, box, [np.zeros(1)], [0.0], rng, n_samples=5)
    assert got == pytest.approx(7.0, rel=1e-12)
