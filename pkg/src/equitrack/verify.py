"""Numerical verification suites for the identities behind the tracking controller.

Every suite is a function ``(seed) -> list[Check]``. Checks compare a
measured residual against a fixed threshold; derivative identities are
checked against central finite differences with step ``1e-4``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import so3
from .dynamics import equivariance_residuals, step_coupled
from .lie import SO3, Array, group_exp, random_group
from .semidirect import InputPair, PhaseState, phi, psi, sd_inv, sd_mul
from .sim import BUNDLED_SCENARIO, Scenario, load_scenario, simulate_states
from .tracking import (
    Gains,
    closed_loop_provider,
    control_errors,
    control_law,
    error_energy,
    error_energy_rate,
    error_vector_field,
    inertia_error,
    inertia_error_inv,
    inertia_error_inv_derivative,
    lyapunov,
    physical_force,
    tracking_error,
)

DEFAULT_SEED = 20240521
FD_STEP = 1e-4


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.value < self.threshold)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} < {self.threshold:.1e}"


# ---------------------------------------------------------------------------
# Random data
# ---------------------------------------------------------------------------


def random_state(rng: np.random.Generator) -> PhaseState:
    return PhaseState(random_group(rng), rng.standard_normal(3))


def random_input(rng: np.random.Generator) -> InputPair:
    return InputPair(rng.standard_normal(3), rng.standard_normal(3))


def random_inertia(rng: np.random.Generator, n: int = 3) -> Array:
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


def _gap(a: PhaseState, b: PhaseState) -> float:
    return float(max(np.max(np.abs(a.Q - b.Q)), np.max(np.abs(a.P - b.P))))


def _input_gap(a: InputPair, b: InputPair) -> float:
    return float(max(np.max(np.abs(a.U - b.U)), np.max(np.abs(a.tau - b.tau))))


# ---------------------------------------------------------------------------
# Smooth time-varying inputs for twin trajectories
# ---------------------------------------------------------------------------


def smooth_signal(rng: np.random.Generator) -> Callable[[float], Array]:
    """``a + b sin(w t + c)`` with random 3-vectors ``a, b, c`` and frequencies ``w``."""
    a, b, c = rng.standard_normal((3, 3))
    w = rng.uniform(0.5, 2.0, 3)
    return lambda t: a + b * np.sin(w * t + c)


def _fd_triplet(
    x0: list[PhaseState], provider, t0: float, h: float = FD_STEP
) -> tuple[list[PhaseState], list[PhaseState], list[PhaseState]]:
    """States at ``t0``, ``t0 + h`` and ``t0 + 2h``."""
    x1 = step_coupled(x0, provider, h, t0)
    x2 = step_coupled(x1, provider, h, t0 + h)
    return x0, x1, x2


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def suite_group_axioms(seed: int = DEFAULT_SEED, samples: int = 1000) -> list[Check]:
    """Group axioms of the semidirect product and the action laws of phi and psi."""
    rng = np.random.default_rng(seed)
    e = PhaseState.identity()
    assoc = ident = inverse = 0.0
    phi_id = phi_comp = psi_id = psi_comp = 0.0
    for _ in range(samples):
        a, b, c = random_state(rng), random_state(rng), random_state(rng)
        assoc = max(assoc, _gap(sd_mul(sd_mul(a, b), c), sd_mul(a, sd_mul(b, c))))
        ident = max(ident, _gap(sd_mul(e, a), a), _gap(sd_mul(a, e), a))
        inverse = max(inverse, _gap(sd_mul(a, sd_inv(a)), e), _gap(sd_mul(sd_inv(a), a), e))
        phi_id = max(phi_id, _gap(phi(e, c), c))
        phi_comp = max(phi_comp, _gap(phi(b, phi(a, c)), phi(sd_mul(a, b), c)))
        inp = random_input(rng)
        psi_id = max(psi_id, _input_gap(psi(e, inp), inp))
        psi_comp = max(psi_comp, _input_gap(psi(b, psi(a, inp)), psi(sd_mul(a, b), inp)))
    return [
        Check("semidirect associativity", assoc, 1e-11),
        Check("semidirect identity", ident, 1e-11),
        Check("semidirect inverse", inverse, 1e-11),
        Check("phi identity law", phi_id, 1e-11),
        Check("phi compatibility law", phi_comp, 1e-11),
        Check("psi identity law", psi_id, 1e-11),
        Check("psi compatibility law", psi_comp, 1e-11),
    ]


def suite_equivariance(seed: int = DEFAULT_SEED, samples: int = 200) -> list[Check]:
    """Pushforward of the vector field by phi equals the field at the transformed point and input."""
    rng = np.random.default_rng(seed)
    alg = fd = 0.0
    for _ in range(samples):
        a, f = equivariance_residuals(random_state(rng), random_state(rng), random_input(rng))
        alg, fd = max(alg, a), max(fd, f)
    return [
        Check("equivariance (algebraic)", alg, 1e-10),
        Check("equivariance (finite difference, h=1e-4)", fd, 1e-5),
    ]


def _twin_provider(rng: np.random.Generator, physical: bool, inertia: Array | None = None):
    U, Ud = smooth_signal(rng), smooth_signal(rng)
    tau, tau_d = smooth_signal(rng), smooth_signal(rng)
    inertia_inv = None if inertia is None else np.linalg.inv(inertia)

    def inputs(t: float, states) -> list[InputPair]:
        x, xd = states
        if physical:
            return [InputPair(inertia_inv @ x.P, tau(t)), InputPair(inertia_inv @ xd.P, tau_d(t))]
        return [InputPair(U(t), tau(t)), InputPair(Ud(t), tau_d(t))]

    return inputs


def suite_error_dynamics(seed: int = DEFAULT_SEED, samples: int = 50) -> list[Check]:
    """Finite-difference derivative of the tracking error against the error vector field."""
    rng = np.random.default_rng(seed)
    worst = {"mismatched": 0.0, "physical": 0.0, "matched": 0.0}
    for k in range(samples):
        for mode in worst:
            inertia = random_inertia(rng)
            provider = _twin_provider(rng, mode == "physical", inertia)
            if mode == "matched":
                base = provider
                provider = lambda t, s, base=base: [base(t, s)[1]] * 2  # noqa: E731
            t0 = rng.uniform(0.0, 5.0)
            x0 = [random_state(rng), random_state(rng)]
            s0, s1, s2 = _fd_triplet(x0, provider, t0)
            e0, e1, e2 = (tracking_error(*s) for s in (s0, s1, s2))
            fd_Q = (e2.Q - e0.Q) / (2 * FD_STEP)
            fd_P = (e2.P - e0.P) / (2 * FD_STEP)
            inp, ind = provider(t0 + FD_STEP, s1)
            v = error_vector_field(e1, control_errors(inp, ind, s1[1]))
            worst[mode] = max(worst[mode], float(np.max(np.abs(fd_Q - v.dQ))), float(np.max(np.abs(fd_P - v.dP))))
    return [Check(f"error dynamics, {mode} inputs", val, 1e-5) for mode, val in worst.items()]


def suite_energy(seed: int = DEFAULT_SEED, samples: int = 50) -> list[Check]:
    """Derivative of the error kinetic energy along physical twin trajectories."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        inertia = random_inertia(rng)
        provider = _twin_provider(rng, True, inertia)
        t0 = rng.uniform(0.0, 5.0)
        states = _fd_triplet([random_state(rng), random_state(rng)], provider, t0)
        energies = [error_energy(tracking_error(x, xd), inertia_error(inertia, xd.Q)) for x, xd in states]
        measured = (energies[2] - energies[0]) / (2 * FD_STEP)
        x, xd = states[1]
        inp, ind = provider(t0 + FD_STEP, states[1])
        ce = control_errors(inp, ind, xd)
        e = tracking_error(x, xd)
        predicted = error_energy_rate(e, ce.tau_tilde, inertia_error(inertia, xd.Q), xd.Q, ind.U)
        worst = max(worst, abs(measured - predicted))
    return [Check("error energy derivative", worst, 1e-5)]


def suite_inertia(seed: int = DEFAULT_SEED, samples: int = 200) -> list[Check]:
    """Inertia-error operator: inverse derivative, spectrum and momentum relation."""
    rng = np.random.default_rng(seed)
    deriv = spectrum = momentum = 0.0
    for _ in range(samples):
        inertia = random_inertia(rng)
        Qd, Ud = random_group(rng), rng.standard_normal(3)
        # independent route: numerically invert Ibar along the exact flow Qd exp(s Ud)
        Jp = np.linalg.inv(inertia_error(inertia, Qd @ group_exp(FD_STEP * Ud)))
        Jm = np.linalg.inv(inertia_error(inertia, Qd @ group_exp(-FD_STEP * Ud)))
        fd = (Jp - Jm) / (2 * FD_STEP)
        deriv = max(deriv, float(np.max(np.abs(fd - inertia_error_inv_derivative(inertia, Qd, Ud)))))
        ev = np.linalg.eigvalsh(inertia_error(inertia, Qd))
        spectrum = max(spectrum, float(np.max(np.abs(ev - np.linalg.eigvalsh(inertia)))))
        U, Ud2 = rng.standard_normal(3), rng.standard_normal(3)
        x, xd = PhaseState(random_group(rng), inertia @ U), PhaseState(Qd, inertia @ Ud2)
        e = tracking_error(x, xd)
        ce = control_errors(InputPair(U, np.zeros(3)), InputPair(Ud2, np.zeros(3)), xd)
        momentum = max(momentum, float(np.max(np.abs(e.P - inertia_error(inertia, Qd) @ ce.U_tilde))))
    return [
        Check("inverse inertia-error derivative vs finite difference", deriv, 1e-5),
        Check("inertia-error spectrum", spectrum, 1e-10),
        Check("P_E = Ibar U~", momentum, 1e-10),
    ]


def dissipation_errors(
    scenario: Scenario, sample_every: float = 0.1, t_max: float = 30.0
) -> list[tuple[float, float, float, float]]:
    """``(t, L, measured dL/dt, -k_v |Omega~|^2)`` along the closed loop of ``scenario``.

    At each sample the closed loop is advanced four times by ``1e-4`` and
    ``dL/dt`` taken at the middle state with the five-point central stencil.
    """
    inertia_inv = np.linalg.inv(scenario.inertia)
    gains = scenario.gains
    provider = so3.closed_loop_provider(scenario.inertia, gains, scenario.tau_d)
    stride = max(1, int(round(sample_every / scenario.dt)))
    h = FD_STEP
    out = []
    for k, (t, x, xd) in enumerate(simulate_states(dataclasses.replace(scenario, duration=t_max))):
        if k % stride:
            continue
        states = [[x, xd]]
        for j in range(4):
            states.append(step_coupled(states[-1], provider, h, t + j * h, SO3, field=so3.vector_field))
        L = [so3.lyapunov(so3.so3_error(a, b), b.Q, inertia_inv, gains) for a, b in states]
        measured = (L[0] - 8.0 * L[1] + 8.0 * L[3] - L[4]) / (12.0 * h)
        a, b = states[2]
        w = b.Q @ (inertia_inv @ (b.Q.T @ so3.so3_error(a, b).P))
        out.append((t + 2 * h, L[2], measured, -gains.k_v * float(w @ w)))
    return out


# below this fraction of L(0) the difference quotient sits at the double-precision
# resolution of R_E - I and a relative comparison is meaningless
RESOLVABLE_FRACTION = 1e-10


def suite_lyapunov(seed: int = DEFAULT_SEED) -> list[Check]:
    """Closed-loop dissipation and monotone decrease along the bundled scenario."""
    scenario = load_scenario(BUNDLED_SCENARIO)
    samples = dissipation_errors(scenario)
    L0 = samples[0][1]
    rel = max(abs(m - p) / abs(p) for _, L, m, p in samples if L >= RESOLVABLE_FRACTION * L0)
    absolute = max(abs(m - p) for _, _, m, p in samples)
    inertia_inv = np.linalg.inv(scenario.inertia)
    values = [
        so3.lyapunov(so3.so3_error(x, xd), xd.Q, inertia_inv, scenario.gains)
        for _, x, xd in simulate_states(scenario)
    ]
    increase = max(0.0, float(np.max(np.diff(values))))
    # generic layer: Lyapunov derivative under the generic law, random data
    rng = np.random.default_rng(seed)
    generic = 0.0
    for _ in range(20):
        inertia = random_inertia(rng)
        gains = Gains(*rng.uniform(0.5, 2.0, 2))
        provider = closed_loop_provider(inertia, gains, smooth_signal(rng))
        t0 = rng.uniform(0.0, 5.0)
        x0 = PhaseState(random_group(rng), rng.standard_normal(3))
        xd0 = PhaseState(random_group(rng), rng.standard_normal(3))
        s0, s1, s2 = _fd_triplet([x0, xd0], provider, t0)
        Ls = [lyapunov(tracking_error(x, xd), inertia_error(inertia, xd.Q), gains) for x, xd in (s0, s1, s2)]
        measured = (Ls[2] - Ls[0]) / (2 * FD_STEP)
        x, xd = s1
        e = tracking_error(x, xd)
        U_tilde = inertia_error_inv(inertia, xd.Q) @ e.P
        predicted = -gains.k_v * float(U_tilde @ U_tilde)
        generic = max(generic, abs(measured - predicted) / abs(predicted))
    return [
        Check("closed-loop dL/dt = -k_v |U~|^2 (relative, bundled scenario)", rel, 1e-6),
        Check("closed-loop dL/dt = -k_v |U~|^2 (absolute, bundled scenario)", absolute, 1e-6),
        Check("closed-loop dL/dt = -k_v |U~|^2 (relative, generic layer)", generic, 1e-6),
        Check("Lyapunov per-step increase (bundled scenario)", increase, 1e-8),
    ]


def suite_reduced_vs_generic(seed: int = DEFAULT_SEED, samples: int = 1000) -> list[Check]:
    """Reduced R^3 formulas against the generic layer in orthonormal coordinates."""
    rng = np.random.default_rng(seed)
    to_u, to_p = so3.algebra_to_generic, so3.coalgebra_to_generic
    worst = dict.fromkeys(
        ["error", "control errors", "error dynamics", "inertia error", "control law (gains k -> 2k)",
         "torque recovery", "lyapunov (k_p -> 2k_p)"],
        0.0,
    )
    unscaled = 0.0
    for _ in range(samples):
        inertia = random_inertia(rng)
        inertia_g = so3.inertia_to_generic(inertia)
        R, Rd = random_group(rng), random_group(rng)
        Omega, Omega_d, tau, tau_d = rng.standard_normal((4, 3))
        x, xd = PhaseState(R, inertia @ Omega), PhaseState(Rd, inertia @ Omega_d)
        xg, xdg = PhaseState(R, to_p(x.P)), PhaseState(Rd, to_p(xd.P))

        err = so3.so3_error(x, xd)
        eg = tracking_error(xg, xdg)
        worst["error"] = max(worst["error"], _gap(PhaseState(err.Q, to_p(err.P)), eg))

        w, tt = so3.so3_control_errors(xd, Omega, Omega_d, tau, tau_d)
        ce = control_errors(InputPair(to_u(Omega), to_p(tau)), InputPair(to_u(Omega_d), to_p(tau_d)), xdg)
        worst["control errors"] = max(
            worst["control errors"], _input_gap(InputPair(to_u(w), to_p(tt)), InputPair(ce.U_tilde, ce.tau_tilde))
        )

        vr = so3.so3_error_field(err, w, tt)
        vg = error_vector_field(eg, ce)
        worst["error dynamics"] = max(
            worst["error dynamics"], float(np.max(np.abs(vr.dQ - vg.dQ))), float(np.max(np.abs(to_p(vr.dP) - vg.dP)))
        )

        worst["inertia error"] = max(
            worst["inertia error"],
            float(np.max(np.abs(so3.inertia_to_generic(so3.inertia_error(inertia, Rd)) - inertia_error(inertia_g, Rd)))),
        )

        gains = Gains(*rng.uniform(0.1, 3.0, 2))
        doubled = Gains(2 * gains.k_p, 2 * gains.k_v)
        inertia_inv = np.linalg.inv(inertia)
        tg = control_law(eg, inertia_error(inertia_g, Rd), xdg, to_u(Omega_d), gains)
        tr2 = so3.so3_control(err, Rd, Omega_d, inertia_inv, doubled)
        tr1 = so3.so3_control(err, Rd, Omega_d, inertia_inv, gains)
        worst["control law (gains k -> 2k)"] = max(worst["control law (gains k -> 2k)"], float(np.max(np.abs(to_p(tr2) - tg))))
        unscaled = max(unscaled, float(np.max(np.abs(to_p(tr1) - tg))))

        tau_r = so3.recover_torque(tr1, xd, Omega, Omega_d, tau_d)
        tau_g = physical_force(xdg, to_u(w), to_p(tr1), to_p(tau_d))
        worst["torque recovery"] = max(worst["torque recovery"], float(np.max(np.abs(to_p(tau_r) - tau_g))))

        Lr = so3.lyapunov(err, Rd, inertia_inv, doubled)
        Lg = lyapunov(eg, inertia_error(inertia_g, Rd), gains)
        worst["lyapunov (k_p -> 2k_p)"] = max(worst["lyapunov (k_p -> 2k_p)"], abs(Lr - Lg))
    checks = [Check(f"reduced vs generic: {k}", v, 1e-10) for k, v in worst.items()]
    # the same gains on both layers must NOT agree: the relationship is a real factor of two
    checks.append(Check("reduced vs generic: equal gains disagree (1/residual)", 1.0 / max(unscaled, 1e-300), 1e2))
    return checks


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "group-axioms": suite_group_axioms,
    "equivariance": suite_equivariance,
    "error-dynamics": suite_error_dynamics,
    "energy": suite_energy,
    "lyapunov": suite_lyapunov,
    "inertia": suite_inertia,
    "reduced-vs-generic": suite_reduced_vs_generic,
}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> list[Check]:
    """Run one named suite, or every suite for ``"all"``."""
    if name == "all":
        return [c for suite in SUITES.values() for c in suite(seed)]
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](seed)
