"""Equivariant tracking error, error dynamics, energy and the tracking control law.

Given an actual trajectory ``x = (Q, P)`` and a desired one ``xd = (Qd, Pd)``,
the error is the group element

    e = phi(xd^{-1}, x) = (Q Qd^{-1}, Ad*_{Qd^{-1}} (P - Pd))

and it evolves under the same extended Euler-Poincare vector field, driven by
the transformed input differences ``psi(xd^{-1}, (U - Ud, tau - tau_d))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dynamics import PhaseVelocity, vector_field
from .lie import (
    SO3,
    Array,
    GroupDescription,
    PreconditionError,
    adjoint_matrix,
    ad_matrix,
    frobenius,
    group_inv,
    project_algebra,
)
from .semidirect import InputPair, PhaseState, phi, psi, psi_invert_tau, sd_inv

ErrorState = PhaseState


@dataclass(frozen=True)
class ControlErrors:
    U_tilde: Array
    tau_tilde: Array


@dataclass(frozen=True)
class Gains:
    k_p: float
    k_v: float

    def __post_init__(self) -> None:
        for name in ("k_p", "k_v"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0.0):
                raise PreconditionError(f"gain {name} must be a positive real, got {value!r}")


def check_inertia(inertia: Array, tol: float = 1e-12) -> Array:
    """Return ``inertia`` as a float array after checking it is symmetric positive-definite."""
    inertia = np.asarray(inertia, dtype=float)
    if inertia.ndim != 2 or inertia.shape[0] != inertia.shape[1]:
        raise PreconditionError(f"inertia must be square, got shape {inertia.shape}")
    if np.max(np.abs(inertia - inertia.T)) > tol * max(1.0, np.max(np.abs(inertia))):
        raise PreconditionError("inertia is not symmetric")
    if np.min(np.linalg.eigvalsh(inertia)) <= 0.0:
        raise PreconditionError("inertia is not positive-definite")
    return inertia


def _spd_solve(A: Array, b: Array) -> Array:
    try:
        c = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError("operator is not symmetric positive-definite") from exc
    return np.linalg.solve(c.T, np.linalg.solve(c, b))


# ---------------------------------------------------------------------------
# Error construction
# ---------------------------------------------------------------------------


def tracking_error(x: PhaseState, xd: PhaseState, desc: GroupDescription = SO3) -> ErrorState:
    """``(Q Qd^{-1}, Ad*_{Qd^{-1}} (P - Pd))``."""
    Qd_inv = group_inv(xd.Q, desc)
    return ErrorState(x.Q @ Qd_inv, adjoint_matrix(Qd_inv, desc).T @ (x.P - xd.P))


def control_errors(inp: InputPair, ind: InputPair, xd: PhaseState, desc: GroupDescription = SO3) -> ControlErrors:
    """``psi(xd^{-1}, (U - Ud, tau - tau_d))``."""
    out = psi(sd_inv(xd, desc), inp - ind, desc)
    return ControlErrors(out.U, out.tau)


def error_vector_field(e: ErrorState, ce: ControlErrors, desc: GroupDescription = SO3) -> PhaseVelocity:
    """Error dynamics ``Q_E' = Q_E U~``, ``P_E' = ad*_{U~} P_E + tau~``."""
    return vector_field(e, InputPair(ce.U_tilde, ce.tau_tilde), desc)


def error_via_action(x: PhaseState, xd: PhaseState, desc: GroupDescription = SO3) -> ErrorState:
    """The same error built literally as ``phi(xd^{-1}, x)``."""
    return phi(sd_inv(xd, desc), x, desc)


# ---------------------------------------------------------------------------
# Inertia error
# ---------------------------------------------------------------------------


def inertia_error(inertia: Array, Qd: Array, desc: GroupDescription = SO3) -> Array:
    """``Ad*_{Qd^{-1}} o I o Ad_{Qd^{-1}}`` as an n x n matrix."""
    A = adjoint_matrix(group_inv(Qd, desc), desc)
    return A.T @ inertia @ A


def inertia_error_inv(inertia: Array, Qd: Array, desc: GroupDescription = SO3) -> Array:
    """Exact inverse of :func:`inertia_error`, ``Ad_{Qd} I^{-1} Ad*_{Qd}``."""
    A = adjoint_matrix(Qd, desc)
    return A @ np.linalg.inv(inertia) @ A.T


def reference_spatial_velocity(Qd: Array, Ud: Array, desc: GroupDescription = SO3) -> Array:
    """``Ad_{Qd} Ud``, the reference velocity seen in the error frame."""
    return adjoint_matrix(Qd, desc) @ Ud


def inertia_error_inv_derivative(inertia: Array, Qd: Array, Ud: Array, desc: GroupDescription = SO3) -> Array:
    """Time derivative of the inverse inertia error along ``Qd' = Qd Ud``.

    ``ad_W Ibar^{-1} + Ibar^{-1} ad*_W`` with ``W = Ad_{Qd} Ud``.
    """
    W = ad_matrix(reference_spatial_velocity(Qd, Ud, desc), desc)
    Jinv = inertia_error_inv(inertia, Qd, desc)
    return W @ Jinv + Jinv @ W.T


# ---------------------------------------------------------------------------
# Energy, control and Lyapunov function
# ---------------------------------------------------------------------------


def error_energy(e: ErrorState, Ibar: Array) -> float:
    """Kinetic energy of the error, ``P_E(Ibar^{-1} P_E) / 2``."""
    return 0.5 * float(e.P @ _spd_solve(Ibar, e.P))


def error_energy_rate(
    e: ErrorState, tau_tilde: Array, Ibar: Array, Qd: Array, Ud: Array, desc: GroupDescription = SO3
) -> float:
    """Closed-form derivative of :func:`error_energy` when both trajectories are physical.

    ``tau~(Ibar^{-1} P_E) + (ad*_W P_E)(Ibar^{-1} P_E)`` with ``W = Ad_{Qd} Ud``.
    """
    U_tilde = _spd_solve(Ibar, e.P)
    W = ad_matrix(reference_spatial_velocity(Qd, Ud, desc), desc)
    return float(tau_tilde @ U_tilde + (W.T @ e.P) @ U_tilde)


def configuration_error(e: ErrorState) -> float:
    """``<Q_E - I, Q_E - I>`` (Frobenius)."""
    D = e.Q - np.eye(e.Q.shape[0])
    return frobenius(D, D)


def control_law(
    e: ErrorState,
    Ibar: Array,
    xd: PhaseState,
    Ud: Array,
    gains: Gains,
    desc: GroupDescription = SO3,
) -> Array:
    """Transformed force input that makes the Lyapunov function dissipate.

    ``-k_v K(U~) - ad*_W P_E - k_p K(P_g(Q_E^T (Q_E - I)))`` with
    ``U~ = Ibar^{-1} P_E`` and ``W = Ad_{Qd} Ud``. ``K`` is the identity in
    orthonormal coordinates.
    """
    U_tilde = _spd_solve(Ibar, e.P)
    W = ad_matrix(reference_spatial_velocity(xd.Q, Ud, desc), desc)
    m = e.Q.shape[0]
    restoring = project_algebra(e.Q.T @ (e.Q - np.eye(m)), desc)
    return -gains.k_v * U_tilde - W.T @ e.P - gains.k_p * restoring


def lyapunov(e: ErrorState, Ibar: Array, gains: Gains) -> float:
    """``P_E(Ibar^{-1} P_E)/2 + (k_p/2) <Q_E - I, Q_E - I>``."""
    return error_energy(e, Ibar) + 0.5 * gains.k_p * configuration_error(e)


def lyapunov_rate(e: ErrorState, Ibar: Array, gains: Gains) -> float:
    """Closed-loop derivative of :func:`lyapunov`: ``-k_v |U~|^2``."""
    U_tilde = _spd_solve(Ibar, e.P)
    return -gains.k_v * float(U_tilde @ U_tilde)


def physical_force(
    xd: PhaseState, U_tilde: Array, tau_tilde: Array, tau_d: Array, desc: GroupDescription = SO3
) -> Array:
    """Untransformed force ``tau`` producing the transformed input ``tau_tilde``."""
    return tau_d + psi_invert_tau(sd_inv(xd, desc), U_tilde, tau_tilde, desc)


def closed_loop_provider(
    inertia: Array,
    gains: Gains,
    reference_torque: Callable[[float], Array],
    desc: GroupDescription = SO3,
) -> Callable[[float, Sequence[PhaseState]], list[InputPair]]:
    """Coupled input provider for ``[plant, reference]`` under the tracking law.

    Both states are kept physical (``U = I^{-1} P``); the reference is driven by
    ``reference_torque(t)`` and the plant by the recovered force.
    """
    inertia = check_inertia(inertia)
    inertia_inv = np.linalg.inv(inertia)

    def provider(t: float, states: Sequence[PhaseState]) -> list[InputPair]:
        x, xd = states
        tau_d = np.asarray(reference_torque(t), dtype=float)
        U, Ud = inertia_inv @ x.P, inertia_inv @ xd.P
        e = tracking_error(x, xd, desc)
        Ibar = inertia_error(inertia, xd.Q, desc)
        tau_tilde = control_law(e, Ibar, xd, Ud, gains, desc)
        U_tilde = reference_spatial_velocity(xd.Q, U - Ud, desc)
        tau = physical_force(xd, U_tilde, tau_tilde, tau_d, desc)
        return [InputPair(U, tau), InputPair(Ud, tau_d)]

    return provider
