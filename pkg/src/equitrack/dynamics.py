"""Extended Euler-Poincare vector field, RK4 stepping and an equivariance check.

The extended system treats the velocity ``U`` as a free input::

    Q' = Q U
    P' = ad*_U P + tau

The physical system is the sub-behaviour obtained by feeding back
``U = I^{-1} P`` through the input provider.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .lie import SO3, Array, GroupDescription, RetractionError, adjoint_matrix, ad_matrix, group_exp
from .semidirect import InputPair, PhaseState, phi, psi

InputProvider = Callable[[float, PhaseState], InputPair]
CoupledProvider = Callable[[float, Sequence[PhaseState]], Sequence[InputPair]]


@dataclass(frozen=True)
class PhaseVelocity:
    """Tangent vector at ``(Q, P)``: ``dQ`` is an m x m matrix, ``dP`` coalgebra coords."""

    dQ: Array
    dP: Array


VectorField = Callable[[PhaseState, InputPair], PhaseVelocity]


def vector_field(x: PhaseState, inp: InputPair, desc: GroupDescription = SO3) -> PhaseVelocity:
    """``f((Q, P), (U, tau)) = (Q U, ad*_U P + tau)``."""
    return PhaseVelocity(x.Q @ desc.to_matrix(inp.U), ad_matrix(inp.U, desc).T @ x.P + inp.tau)


def _retract(Q: Array, desc: GroupDescription) -> Array:
    if desc.retract_fn is None:
        return Q
    return desc.retract_fn(Q)


def step_coupled(
    xs: Sequence[PhaseState],
    provider: CoupledProvider,
    h: float,
    t: float = 0.0,
    desc: GroupDescription = SO3,
    field: VectorField | None = None,
) -> list[PhaseState]:
    """One classical RK4 step for several states whose inputs may depend on each other.

    Stages are taken in the ambient matrix coordinates; each configuration is
    then retracted onto the group. ``provider(t, states)`` returns one input
    per state and is evaluated at every stage.
    """
    if not h > 0.0:
        raise ValueError(f"step size must be positive, got {h}")
    if field is None:
        field = lambda x, inp: vector_field(x, inp, desc)  # noqa: E731

    def deriv(tt: float, states: Sequence[PhaseState]) -> list[PhaseVelocity]:
        inputs = provider(tt, states)
        return [field(s, u) for s, u in zip(states, inputs)]

    def shift(states: Sequence[PhaseState], ks: Sequence[PhaseVelocity], a: float) -> list[PhaseState]:
        return [PhaseState(s.Q + a * k.dQ, s.P + a * k.dP) for s, k in zip(states, ks)]

    k1 = deriv(t, xs)
    k2 = deriv(t + 0.5 * h, shift(xs, k1, 0.5 * h))
    k3 = deriv(t + 0.5 * h, shift(xs, k2, 0.5 * h))
    k4 = deriv(t + h, shift(xs, k3, h))

    out = []
    for x, a, b, c, d in zip(xs, k1, k2, k3, k4):
        Q = x.Q + (h / 6.0) * (a.dQ + 2.0 * b.dQ + 2.0 * c.dQ + d.dQ)
        P = x.P + (h / 6.0) * (a.dP + 2.0 * b.dP + 2.0 * c.dP + d.dP)
        if not math.isfinite(float(np.sum(Q)) + float(np.sum(P))):
            raise RetractionError(f"non-finite state after step at t={t + h:g}")
        out.append(PhaseState(_retract(Q, desc), P))
    return out


def step(
    x: PhaseState,
    provider: InputProvider,
    h: float,
    t: float = 0.0,
    desc: GroupDescription = SO3,
    field: VectorField | None = None,
) -> PhaseState:
    """Advance one state by ``h`` with inputs ``provider(t, x)``."""
    (out,) = step_coupled([x], lambda tt, xs: [provider(tt, xs[0])], h, t, desc, field)
    return out


def simulate(
    x0: PhaseState,
    provider: InputProvider,
    h: float,
    n_steps: int,
    t0: float = 0.0,
    desc: GroupDescription = SO3,
) -> list[PhaseState]:
    """States at ``t0, t0 + h, ..., t0 + n_steps*h``."""
    xs = [x0]
    for k in range(n_steps):
        xs.append(step(xs[-1], provider, h, t0 + k * h, desc))
    return xs


def constant_input(inp: InputPair) -> InputProvider:
    return lambda t, x: inp


def physical_input(inertia: Array, torque: Callable[[float], Array] | None = None) -> InputProvider:
    """Provider enforcing ``U = I^{-1} P``, with an optional time-varying force."""
    inertia_inv = np.linalg.inv(inertia)

    def provider(t: float, x: PhaseState) -> InputPair:
        tau = np.zeros_like(x.P) if torque is None else np.asarray(torque(t), dtype=float)
        return InputPair(inertia_inv @ x.P, tau)

    return provider


# ---------------------------------------------------------------------------
# Equivariance
# ---------------------------------------------------------------------------


def pushforward_phi(g: PhaseState, x: PhaseState, v: PhaseVelocity, desc: GroupDescription = SO3) -> PhaseVelocity:
    """Differential of ``phi_g`` at ``x``: ``(Q V, W) -> (Q V X_Q, Ad*_{X_Q} W)``."""
    return PhaseVelocity(v.dQ @ g.Q, adjoint_matrix(g.Q, desc).T @ v.dP)


def _velocity_gap(a: PhaseVelocity, b: PhaseVelocity) -> float:
    return float(max(np.max(np.abs(a.dQ - b.dQ)), np.max(np.abs(a.dP - b.dP))))


def equivariance_residuals(
    g: PhaseState,
    x: PhaseState,
    inp: InputPair,
    desc: GroupDescription = SO3,
    fd_step: float = 1e-4,
) -> tuple[float, float]:
    """``(algebraic, finite_difference)`` residuals of ``D phi_g f(x, u) = f(phi_g x, psi_g u)``.

    The finite-difference side differentiates ``s -> phi(g, x(s))`` along the
    curve ``x(s) = (Q exp(sU), P + s f_P)``, whose velocity at ``s = 0`` is
    ``f(x, u)``.
    """
    rhs = vector_field(phi(g, x, desc), psi(g, inp, desc), desc)

    lhs_alg = pushforward_phi(g, x, vector_field(x, inp, desc), desc)

    dP = vector_field(x, inp, desc).dP

    def curve(s: float) -> PhaseState:
        return phi(g, PhaseState(x.Q @ group_exp(s * inp.U, desc), x.P + s * dP), desc)

    plus, minus = curve(fd_step), curve(-fd_step)
    lhs_fd = PhaseVelocity((plus.Q - minus.Q) / (2 * fd_step), (plus.P - minus.P) / (2 * fd_step))
    return _velocity_gap(lhs_alg, rhs), _velocity_gap(lhs_fd, rhs)


def equivariance_residual(
    g: PhaseState, x: PhaseState, inp: InputPair, desc: GroupDescription = SO3, fd_step: float = 1e-4
) -> float:
    """Larger of the two residuals returned by :func:`equivariance_residuals`."""
    return max(equivariance_residuals(g, x, inp, desc, fd_step))
