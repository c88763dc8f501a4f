"""The semidirect product G x| g* and its actions on states and inputs.

Phase states ``(Q, P)`` are identified with group elements, with product::

    (Q1, P1)(Q2, P2) = (Q1 Q2, Ad*_{Q2} P1 + P2)

``phi(g, x) = x g`` is the right action on states and ``psi`` the matching
action on inputs ``(U, tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie import SO3, Array, GroupDescription, adjoint_matrix, ad_matrix, group_inv


@dataclass(frozen=True)
class PhaseState:
    """Configuration ``Q`` (m x m) and left-trivialised momentum ``P`` (coalgebra coords)."""

    Q: Array
    P: Array

    @classmethod
    def identity(cls, desc: GroupDescription = SO3) -> PhaseState:
        return cls(desc.identity(), np.zeros(desc.dim_algebra))

    def is_valid(self, desc: GroupDescription = SO3) -> bool:
        return desc.is_member(self.Q) and bool(np.all(np.isfinite(self.P)))


@dataclass(frozen=True)
class InputPair:
    """Velocity input ``U`` (algebra coords) and force input ``tau`` (coalgebra coords)."""

    U: Array
    tau: Array

    def __add__(self, other: InputPair) -> InputPair:
        return InputPair(self.U + other.U, self.tau + other.tau)

    def __sub__(self, other: InputPair) -> InputPair:
        return InputPair(self.U - other.U, self.tau - other.tau)

    def __rmul__(self, a: float) -> InputPair:
        return InputPair(a * self.U, a * self.tau)


def sd_mul(a: PhaseState, b: PhaseState, desc: GroupDescription = SO3) -> PhaseState:
    """Semidirect product ``(Q1 Q2, Ad*_{Q2} P1 + P2)``."""
    return PhaseState(a.Q @ b.Q, adjoint_matrix(b.Q, desc).T @ a.P + b.P)


def sd_inv(a: PhaseState, desc: GroupDescription = SO3) -> PhaseState:
    """Inverse ``(Q^{-1}, -Ad*_{Q^{-1}} P)``."""
    Qinv = group_inv(a.Q, desc)
    return PhaseState(Qinv, -adjoint_matrix(Qinv, desc).T @ a.P)


def phi(g: PhaseState, x: PhaseState, desc: GroupDescription = SO3) -> PhaseState:
    """Right action of ``g`` on the state ``x``: right multiplication ``x g``."""
    return sd_mul(x, g, desc)


def psi(g: PhaseState, inp: InputPair, desc: GroupDescription = SO3) -> InputPair:
    """Input action ``(Ad_{X^-1} U, Ad*_X tau - ad*_{Ad_{X^-1} U} P)`` for ``g = (X, P)``."""
    U_new = adjoint_matrix(group_inv(g.Q, desc), desc) @ inp.U
    tau_new = adjoint_matrix(g.Q, desc).T @ inp.tau - ad_matrix(U_new, desc).T @ g.P
    return InputPair(U_new, tau_new)


def psi_invert_tau(
    g: PhaseState, U_transformed: Array, tau_transformed: Array, desc: GroupDescription = SO3
) -> Array:
    """Force input ``tau`` whose image under ``psi(g, .)`` is ``tau_transformed``.

    ``U_transformed`` is the already-transformed velocity ``Ad_{X^-1} U``.
    """
    rhs = tau_transformed + ad_matrix(U_transformed, desc).T @ g.P
    # Ad*_X is invertible with inverse Ad*_{X^-1}
    return adjoint_matrix(group_inv(g.Q, desc), desc).T @ rhs
