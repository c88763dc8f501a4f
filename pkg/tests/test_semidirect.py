import numpy as np
import pytest

from conftest import assert_input_close, assert_state_close
from equitrack.lie import SO3, co_ad, co_adjoint, group_exp, hat, project_algebra, random_group
from equitrack.semidirect import InputPair, PhaseState, phi, psi, psi_invert_tau, sd_inv, sd_mul
from equitrack.so3 import coalgebra_to_generic, recover_torque, so3_control_errors
from equitrack.tracking import physical_force
from equitrack.verify import random_input, random_state

E = PhaseState.identity()


def test_identity_element(rng):
    x = random_state(rng)
    assert_state_close(sd_mul(E, x), x, atol=0)
    assert_state_close(sd_mul(x, E), x, atol=1e-15)


def test_inverse_element(rng):
    x = random_state(rng)
    assert_state_close(sd_mul(x, sd_inv(x)), E, atol=1e-14)
    assert_state_close(sd_mul(sd_inv(x), x), E, atol=1e-14)


def test_inverse_examples(rng):
    assert_state_close(sd_inv(E), E, atol=0)
    p = rng.standard_normal(3)
    assert_state_close(sd_inv(PhaseState(np.eye(3), p)), PhaseState(np.eye(3), -p), atol=1e-15)
    x = random_state(rng)
    assert_state_close(sd_inv(sd_inv(x)), x, atol=1e-14)


def test_product_direct_oracle():
    # left factor a quarter turn with unit momentum, right factor the identity
    Q1 = group_exp(project_algebra(hat(0.5 * np.pi * np.eye(3)[2])))
    out = sd_mul(PhaseState(Q1, np.eye(3)[0]), E)
    assert_state_close(out, PhaseState(Q1, np.eye(3)[0]), atol=1e-15)


def test_product_components_against_matrices(rng):
    a, b = random_state(rng), random_state(rng)
    out = sd_mul(a, b)
    np.testing.assert_allclose(out.Q, a.Q @ b.Q, atol=1e-15)
    # Ad*_{Q2} P1 from the defining pairing: (Ad* p)(v) = p(Ad v) = p(vee-coords of Q v Q^T)
    basis = [SO3.basis[i] for i in range(3)]
    coad = np.array([a.P @ project_algebra(b.Q @ Ei @ b.Q.T) for Ei in basis])
    np.testing.assert_allclose(out.P, coad + b.P, atol=1e-14)


def test_associativity(rng):
    for _ in range(100):
        a, b, c = (random_state(rng) for _ in range(3))
        assert_state_close(sd_mul(sd_mul(a, b), c), sd_mul(a, sd_mul(b, c)), atol=1e-11)


def test_phi_identity_and_compatibility(rng):
    for _ in range(100):
        a, b, x = (random_state(rng) for _ in range(3))
        assert_state_close(phi(E, x), x, atol=1e-15)
        assert_state_close(phi(b, phi(a, x)), phi(sd_mul(a, b), x), atol=1e-11)


def test_phi_components(rng):
    g, x = random_state(rng), random_state(rng)
    out = phi(g, x)
    np.testing.assert_allclose(out.Q, x.Q @ g.Q, atol=1e-15)
    np.testing.assert_allclose(out.P, co_adjoint(g.Q, x.P) + g.P, atol=1e-14)


def test_psi_identity_examples(rng):
    inp = random_input(rng)
    assert_input_close(psi(E, inp), inp, atol=1e-15)
    P = rng.standard_normal(3)
    out = psi(PhaseState(np.eye(3), P), inp)
    assert_input_close(out, InputPair(inp.U, inp.tau - co_ad(inp.U, P)), atol=1e-14)


def test_psi_compatibility(rng):
    for _ in range(100):
        a, b, inp = random_state(rng), random_state(rng), random_input(rng)
        assert_input_close(psi(b, psi(a, inp)), psi(sd_mul(a, b), inp), atol=1e-11)


def test_psi_brute_force_matrices(rng):
    g, inp = random_state(rng), random_input(rng)
    out = psi(g, inp)
    X = g.Q
    np.testing.assert_allclose(SO3.to_matrix(out.U), X.T @ SO3.to_matrix(inp.U) @ X, atol=1e-14)


def test_psi_linearity(rng):
    g, i1, i2 = random_state(rng), random_input(rng), random_input(rng)
    a, b = 0.7, -1.9
    lhs = psi(g, a * i1 + b * i2)
    rhs = a * psi(g, i1) + b * psi(g, i2)
    assert_input_close(lhs, rhs, atol=1e-12)


def test_psi_invert_tau_identity(rng):
    U, tau = rng.standard_normal((2, 3))
    np.testing.assert_allclose(psi_invert_tau(E, U, tau), tau, atol=1e-15)


def test_psi_invert_tau_round_trip(rng):
    for _ in range(50):
        g, inp = random_state(rng), random_input(rng)
        out = psi(g, inp)
        np.testing.assert_allclose(psi_invert_tau(g, out.U, out.tau), inp.tau, atol=1e-12)


def test_psi_invert_matches_reduced_torque_recovery(rng):
    inertia = np.diag([1.0, 2.0, 3.0])
    Rd = random_group(rng)
    Omega, Omega_d, tau_d, tau_tilde = rng.standard_normal((4, 3))
    xd = PhaseState(Rd, inertia @ Omega_d)
    w, _ = so3_control_errors(xd, Omega, Omega_d, tau_d, tau_d)
    reduced = recover_torque(tau_tilde, xd, Omega, Omega_d, tau_d)
    xdg = PhaseState(Rd, coalgebra_to_generic(xd.P))
    generic = physical_force(
        xdg, np.sqrt(2.0) * w, coalgebra_to_generic(tau_tilde), coalgebra_to_generic(tau_d)
    )
    np.testing.assert_allclose(coalgebra_to_generic(reduced), generic, atol=1e-12)


def test_is_valid():
    assert E.is_valid()
    assert not PhaseState(np.diag([1.0, 1.0, -1.0]), np.zeros(3)).is_valid()
    assert not PhaseState(np.eye(3), np.array([np.nan, 0.0, 0.0])).is_valid()


def test_input_pair_arithmetic():
    a = InputPair(np.ones(3), 2 * np.ones(3))
    b = InputPair(np.zeros(3), np.ones(3))
    assert_input_close(a - b + b, a, atol=0)
    assert_input_close(2.0 * a, InputPair(2 * np.ones(3), 4 * np.ones(3)), atol=0)


@pytest.mark.parametrize("n", [4])
def test_so4_axioms(rng, n):
    from equitrack.lie import special_orthogonal

    desc = special_orthogonal(n)
    mk = lambda: PhaseState(random_group(rng, desc), rng.standard_normal(desc.dim_algebra))  # noqa: E731
    a, b, c = mk(), mk(), mk()
    assert_state_close(sd_mul(sd_mul(a, b, desc), c, desc), sd_mul(a, sd_mul(b, c, desc), desc), atol=1e-11)
    assert_state_close(sd_mul(a, sd_inv(a, desc), desc), PhaseState.identity(desc), atol=1e-12)
