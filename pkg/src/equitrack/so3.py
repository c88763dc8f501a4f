"""Attitude tracking on SO(3) in reduced R^3 form.

Velocities and momenta are plain 3-vectors: ``Omega`` is the body angular
velocity and ``p`` the body momentum, paired by ``P(hat(v)) = p . v``. These
are *not* the orthonormal coordinates of the generic layer; the two are
related by ``u_generic = sqrt(2) * Omega`` and ``p_generic = p / sqrt(2)``.

Phase states reuse :class:`~equitrack.semidirect.PhaseState` with ``Q = R``
and ``P = p`` so the RK4 stepper can drive them directly.
"""

from __future__ import annotations

import enum
import math
from typing import Callable, Sequence

import numpy as np

from .dynamics import PhaseVelocity
from .lie import Array, hat, vee
from .semidirect import InputPair, PhaseState
from .tracking import Gains, check_inertia

AttitudeState = PhaseState
AttitudeError = PhaseState

SQRT2 = math.sqrt(2.0)


def cross(a: Array, b: Array) -> Array:
    # np.cross is slow for single 3-vectors
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    )


def vector_field(x: AttitudeState, inp: InputPair) -> PhaseVelocity:
    """Rigid-body equations ``R' = R hat(Omega)``, ``p' = -Omega x p + tau``."""
    return PhaseVelocity(x.Q @ hat(inp.U), inp.tau - cross(inp.U, x.P))


def so3_error(x: AttitudeState, xd: AttitudeState) -> AttitudeError:
    """``(R Rd^T, Rd (p - pd))``."""
    return AttitudeError(x.Q @ xd.Q.T, xd.Q @ (x.P - xd.P))


def so3_control_errors(
    xd: AttitudeState, Omega: Array, Omega_d: Array, tau: Array, tau_d: Array
) -> tuple[Array, Array]:
    """Transformed velocity and torque errors ``(Omega~, tau~)``.

    ``Omega~ = Rd (Omega - Omega_d)``,
    ``tau~ = Rd (tau - tau_d) - Omega~ x (Rd pd)``.
    """
    Rd = xd.Q
    w = Rd @ (Omega - Omega_d)
    return w, Rd @ (tau - tau_d) - cross(w, Rd @ xd.P)


def so3_error_field(err: AttitudeError, Omega_tilde: Array, tau_tilde: Array) -> PhaseVelocity:
    """``R_E' = R_E hat(Omega~)``, ``p_E' = -Omega~ x p_E + tau~``."""
    return PhaseVelocity(err.Q @ hat(Omega_tilde), tau_tilde - cross(Omega_tilde, err.P))


def inertia_error(inertia: Array, Rd: Array) -> Array:
    """``Rd I Rd^T``."""
    return Rd @ inertia @ Rd.T


def inertia_error_inv(inertia_inv: Array, Rd: Array) -> Array:
    return Rd @ inertia_inv @ Rd.T


def so3_control(
    err: AttitudeError, Rd: Array, Omega_d: Array, inertia_inv: Array, gains: Gains
) -> Array:
    """Transformed torque ``tau~ = -k_v Omega~ + (Rd Omega_d) x p_E - (k_p/2) vee(R_E - R_E^T)``.

    ``Omega~`` is recovered from the error momentum as ``Rd I^{-1} Rd^T p_E``.
    With gains ``(k_p, k_v)`` this equals the generic control law with gains
    ``(k_p/2, k_v/2)``.
    """
    w = Rd @ (inertia_inv @ (Rd.T @ err.P))
    RE = err.Q
    skew = np.array([RE[2, 1] - RE[1, 2], RE[0, 2] - RE[2, 0], RE[1, 0] - RE[0, 1]])
    return -gains.k_v * w + cross(Rd @ Omega_d, err.P) - 0.5 * gains.k_p * skew


def recover_torque(
    tau_tilde: Array, xd: AttitudeState, Omega: Array, Omega_d: Array, tau_d: Array
) -> Array:
    """Physical torque ``tau_d + Rd^T tau~ + (Omega - Omega_d) x pd``."""
    return tau_d + xd.Q.T @ tau_tilde + cross(Omega - Omega_d, xd.P)


def configuration_error(err: AttitudeError) -> float:
    """``|R_E - I|_F^2``, which equals ``2 tr(I - R_E)`` on SO(3)."""
    D = err.Q - np.eye(3)
    return float(np.sum(D * D))


def lyapunov(err: AttitudeError, Rd: Array, inertia_inv: Array, gains: Gains) -> float:
    """Lyapunov function matched to :func:`so3_control`.

    ``p_E . Omega~ / 2 + (k_p/4) |R_E - I|_F^2``; along the closed loop its
    derivative is ``-k_v |Omega~|^2``.
    """
    w = Rd @ (inertia_inv @ (Rd.T @ err.P))
    return 0.5 * float(err.P @ w) + 0.25 * gains.k_p * configuration_error(err)


class Equilibrium(enum.Enum):
    IDENTITY = "identity"
    ANTIPODAL = "antipodal"
    NON_EQUILIBRIUM = "non-equilibrium"


def classify_equilibrium(err: AttitudeError, tol: float = 1e-3) -> Equilibrium:
    """Identity, antipodal (trace -1, zero momentum) or neither."""
    p_small = float(np.linalg.norm(err.P)) < tol
    if p_small and float(np.linalg.norm(err.Q - np.eye(3))) < tol:
        return Equilibrium.IDENTITY
    if p_small and abs(float(np.trace(err.Q)) + 1.0) < tol:
        return Equilibrium.ANTIPODAL
    return Equilibrium.NON_EQUILIBRIUM


def closed_loop_provider(
    inertia: Array, gains: Gains, reference_torque: Callable[[float], Array]
) -> Callable[[float, Sequence[AttitudeState]], list[InputPair]]:
    """Coupled provider for ``[plant, reference]`` with both trajectories physical."""
    inertia_inv = np.linalg.inv(check_inertia(inertia))

    def provider(t: float, states: Sequence[AttitudeState]) -> list[InputPair]:
        x, xd = states
        tau_d = np.asarray(reference_torque(t), dtype=float)
        Omega, Omega_d = inertia_inv @ x.P, inertia_inv @ xd.P
        tau_tilde = so3_control(so3_error(x, xd), xd.Q, Omega_d, inertia_inv, gains)
        tau = recover_torque(tau_tilde, xd, Omega, Omega_d, tau_d)
        return [InputPair(Omega, tau), InputPair(Omega_d, tau_d)]

    return provider


# Conversions to the orthonormal coordinates of the generic layer.


def algebra_to_generic(w: Array) -> Array:
    return SQRT2 * np.asarray(w, dtype=float)


def algebra_from_generic(u: Array) -> Array:
    return np.asarray(u, dtype=float) / SQRT2


def coalgebra_to_generic(p: Array) -> Array:
    return np.asarray(p, dtype=float) / SQRT2


def coalgebra_from_generic(p: Array) -> Array:
    return SQRT2 * np.asarray(p, dtype=float)


def inertia_to_generic(inertia: Array) -> Array:
    """Generic-layer matrix of the same inertia operator (``p_g = I_g u_g``)."""
    return 0.5 * np.asarray(inertia, dtype=float)


def skew_part(A: Array) -> Array:
    """``vee((A - A^T)/2)``."""
    return vee(0.5 * (A - A.T))
