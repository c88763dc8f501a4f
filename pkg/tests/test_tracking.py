import numpy as np
import pytest

from conftest import assert_state_close
from equitrack.dynamics import step_coupled
from equitrack.lie import SO3, PreconditionError, group_exp, random_group
from equitrack.semidirect import InputPair, PhaseState
from equitrack.tracking import (
    ControlErrors,
    Gains,
    check_inertia,
    closed_loop_provider,
    configuration_error,
    control_errors,
    control_law,
    error_energy,
    error_energy_rate,
    error_vector_field,
    error_via_action,
    inertia_error,
    inertia_error_inv,
    inertia_error_inv_derivative,
    lyapunov,
    lyapunov_rate,
    tracking_error,
)
from equitrack.verify import random_inertia, random_input, random_state, smooth_signal

E = PhaseState.identity()
GAINS = Gains(1.0, 0.5)


def test_gains_validated():
    with pytest.raises(PreconditionError):
        Gains(0.0, 1.0)
    with pytest.raises(PreconditionError):
        Gains(1.0, float("nan"))


def test_check_inertia():
    with pytest.raises(PreconditionError):
        check_inertia(np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(PreconditionError):
        check_inertia(np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))


def test_tracking_error_examples(rng):
    x = random_state(rng)
    assert_state_close(tracking_error(x, x), E, atol=1e-14)
    assert_state_close(tracking_error(x, E), x, atol=1e-15)


def test_tracking_error_is_action_of_inverse(rng):
    for _ in range(20):
        x, xd = random_state(rng), random_state(rng)
        assert_state_close(tracking_error(x, xd), error_via_action(x, xd), atol=1e-13)


def test_control_errors_examples(rng):
    xd, inp, ind = random_state(rng), random_input(rng), random_input(rng)
    ce = control_errors(inp, inp, xd)
    np.testing.assert_array_equal(ce.U_tilde, np.zeros(3))
    np.testing.assert_allclose(ce.tau_tilde, np.zeros(3), atol=0)
    ce = control_errors(inp, ind, E)
    np.testing.assert_allclose(ce.U_tilde, inp.U - ind.U, atol=1e-15)
    np.testing.assert_allclose(ce.tau_tilde, inp.tau - ind.tau, atol=1e-15)


def test_error_vector_field_examples(rng):
    e = random_state(rng)
    v = error_vector_field(e, ControlErrors(np.zeros(3), np.zeros(3)))
    assert not np.any(v.dQ) and not np.any(v.dP)
    U, tau = rng.standard_normal((2, 3))
    v = error_vector_field(E, ControlErrors(U, tau))
    np.testing.assert_allclose(v.dQ, SO3.to_matrix(U), atol=1e-15)
    np.testing.assert_allclose(v.dP, tau, atol=0)


@pytest.mark.parametrize("physical", [False, True])
def test_error_dynamics_along_twin_trajectories(rng, physical):
    inertia = random_inertia(rng)
    inv = np.linalg.inv(inertia)
    sig = [smooth_signal(rng) for _ in range(4)]

    def provider(t, xs):
        if physical:
            return [InputPair(inv @ xs[0].P, sig[1](t)), InputPair(inv @ xs[1].P, sig[3](t))]
        return [InputPair(sig[0](t), sig[1](t)), InputPair(sig[2](t), sig[3](t))]

    x, xd = random_state(rng), random_state(rng)
    h, t = 1e-4, 0.7
    s1 = step_coupled([x, xd], provider, h, t)
    s2 = step_coupled(s1, provider, h, t + h)
    e0, e2 = tracking_error(*[x, xd]), tracking_error(*s2)
    inp, ind = provider(t + h, s1)
    v = error_vector_field(tracking_error(*s1), control_errors(inp, ind, s1[1]))
    np.testing.assert_allclose((e2.Q - e0.Q) / (2 * h), v.dQ, atol=1e-5)
    np.testing.assert_allclose((e2.P - e0.P) / (2 * h), v.dP, atol=1e-5)


def test_inertia_error_examples(rng):
    inertia = random_inertia(rng)
    np.testing.assert_allclose(inertia_error(inertia, np.eye(3)), inertia, atol=1e-14)
    Qd = random_group(rng)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(inertia_error(inertia, Qd)), np.linalg.eigvalsh(inertia), atol=1e-10
    )
    np.testing.assert_allclose(inertia_error_inv(inertia, Qd) @ inertia_error(inertia, Qd), np.eye(3), atol=1e-12)


def test_momentum_error_is_ibar_velocity_error(rng):
    inertia = random_inertia(rng)
    U, Ud = rng.standard_normal((2, 3))
    x, xd = PhaseState(random_group(rng), inertia @ U), PhaseState(random_group(rng), inertia @ Ud)
    e = tracking_error(x, xd)
    ce = control_errors(InputPair(U, np.zeros(3)), InputPair(Ud, np.zeros(3)), xd)
    np.testing.assert_allclose(e.P, inertia_error(inertia, xd.Q) @ ce.U_tilde, atol=1e-10)


def test_inertia_inverse_derivative(rng):
    inertia, Qd = random_inertia(rng), random_group(rng)
    np.testing.assert_array_equal(inertia_error_inv_derivative(inertia, Qd, np.zeros(3)), np.zeros((3, 3)))
    Ud, h = rng.standard_normal(3), 1e-4
    f = lambda s: np.linalg.inv(inertia_error(inertia, Qd @ group_exp(s * Ud)))  # noqa: E731
    fd = (f(h) - f(-h)) / (2 * h)
    D = inertia_error_inv_derivative(inertia, Qd, Ud)
    np.testing.assert_allclose(D, fd, atol=1e-5)
    assert abs(np.trace(D)) < 1e-12


def test_error_energy_examples(rng):
    inertia = random_inertia(rng)
    assert error_energy(PhaseState(random_group(rng), np.zeros(3)), inertia) == 0.0
    p = rng.standard_normal(3)
    assert error_energy(PhaseState(np.eye(3), p), np.eye(3)) == pytest.approx(0.5 * p @ p, abs=1e-14)


def test_error_energy_rate_by_finite_difference(rng):
    inertia = random_inertia(rng)
    inv = np.linalg.inv(inertia)
    sig = [smooth_signal(rng) for _ in range(2)]

    def provider(t, xs):
        return [InputPair(inv @ x.P, s(t)) for x, s in zip(xs, sig)]

    states = [random_state(rng), random_state(rng)]
    h, t = 1e-4, 0.2
    s1 = step_coupled(states, provider, h, t)
    s2 = step_coupled(s1, provider, h, t + h)
    energy = lambda xs: error_energy(tracking_error(*xs), inertia_error(inertia, xs[1].Q))  # noqa: E731
    measured = (energy(s2) - energy(states)) / (2 * h)
    x, xd = s1
    inp, ind = provider(t + h, s1)
    ce = control_errors(inp, ind, xd)
    predicted = error_energy_rate(tracking_error(x, xd), ce.tau_tilde, inertia_error(inertia, xd.Q), xd.Q, ind.U)
    assert measured == pytest.approx(predicted, abs=1e-5)


def test_control_law_vanishes_at_identity(rng):
    inertia, xd, Ud = random_inertia(rng), random_state(rng), rng.standard_normal(3)
    np.testing.assert_allclose(control_law(E, inertia_error(inertia, xd.Q), xd, Ud, GAINS), 0.0, atol=1e-15)


def test_control_law_vanishes_on_antipodal_set(rng):
    inertia, xd, Ud = random_inertia(rng), random_state(rng), rng.standard_normal(3)
    a = rng.standard_normal(3)
    a /= np.linalg.norm(a)
    QE = 2 * np.outer(a, a) - np.eye(3)  # symmetric rotation with trace -1
    e = PhaseState(QE, np.zeros(3))
    np.testing.assert_allclose(control_law(e, inertia_error(inertia, xd.Q), xd, Ud, GAINS), 0.0, atol=1e-14)


def test_lyapunov_examples():
    assert lyapunov(E, np.eye(3), GAINS) == 0.0
    e = PhaseState(np.diag([1.0, -1.0, -1.0]), np.zeros(3))
    assert configuration_error(e) == pytest.approx(8.0, abs=1e-12)
    assert lyapunov(e, np.eye(3), Gains(1.0, 1.0)) == pytest.approx(4.0, abs=1e-12)


def test_closed_loop_dissipation_generic(rng):
    inertia = random_inertia(rng)
    gains = Gains(1.3, 0.8)
    provider = closed_loop_provider(inertia, gains, smooth_signal(rng))
    states = [random_state(rng), random_state(rng)]
    h, t = 1e-4, 1.0
    s1 = step_coupled(states, provider, h, t)
    s2 = step_coupled(s1, provider, h, t + h)
    L = lambda xs: lyapunov(tracking_error(*xs), inertia_error(inertia, xs[1].Q), gains)  # noqa: E731
    measured = (L(s2) - L(states)) / (2 * h)
    predicted = lyapunov_rate(tracking_error(*s1), inertia_error(inertia, s1[1].Q), gains)
    assert predicted < 0
    assert measured == pytest.approx(predicted, rel=1e-6)


def test_generic_closed_loop_converges(rng):
    inertia = np.diag([1.0, 1.5, 2.0])
    gains = Gains(2.0, 2.0)
    provider = closed_loop_provider(inertia, gains, lambda t: np.array([np.cos(t), np.sin(t), 0.0]))
    states = [PhaseState(group_exp(np.array([1.0, -0.5, 0.8])), np.array([0.5, 0.2, -0.3])), E]
    L0 = lyapunov(tracking_error(*states), inertia, gains)
    for k in range(2000):
        states = step_coupled(states, provider, 0.01, k * 0.01)
    L = lyapunov(tracking_error(*states), inertia_error(inertia, states[1].Q), gains)
    assert L < 1e-3 * L0
