"""Matrix Lie-algebra primitives.

A :class:`GroupDescription` fixes a Frobenius-orthonormal basis ``E_1..E_n``
of the Lie algebra inside ``R^{m x m}``. Algebra elements are carried as
coordinate vectors in that basis, and coalgebra elements as coordinates in
the dual basis, so that every dual operator is the transpose of its primal
operator.

Conventions::

    u_mat       = sum_i u[i] * E_i
    p(v)        = p @ v                       (pairing of coalgebra with algebra)
    Ad_X u      = X u_mat X^{-1}
    ad_u v      = u_mat v_mat - v_mat u_mat
    Ad*_X       = (Ad_X)^T,   ad*_u = (ad_u)^T
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

Array = NDArray[np.float64]

DEFAULT_MEMBERSHIP_TOL = 1e-9


class PreconditionError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


class RetractionError(RuntimeError):
    """Raised when a near-group matrix cannot be mapped back onto the group."""


# ---------------------------------------------------------------------------
# R^3 helpers (un-normalised hat map, as used by the reduced SO(3) layer)
# ---------------------------------------------------------------------------


def hat(v: Array) -> Array:
    """Skew matrix with ``hat(v) @ u == np.cross(v, u)``."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(S: Array, tol: float = 1e-10) -> Array:
    """Inverse of :func:`hat`. ``S`` must be skew-symmetric to ``tol``."""
    S = np.asarray(S, dtype=float)
    if S.shape != (3, 3):
        raise PreconditionError(f"vee expects a 3x3 matrix, got shape {S.shape}")
    if np.max(np.abs(S + S.T)) > tol:
        raise PreconditionError("vee applied to a matrix that is not skew-symmetric")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def frobenius(A: Array, B: Array) -> float:
    """Frobenius inner product ``tr(A^T B)``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise PreconditionError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.sum(A * B))


def rodrigues(w: Array) -> Array:
    """Closed-form ``expm(hat(w))``."""
    w = np.asarray(w, dtype=float)
    theta2 = float(w @ w)
    W = hat(w)
    if theta2 < 1e-12:
        # Taylor coefficients to O(theta^6)
        a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0
        b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0
    else:
        theta = np.sqrt(theta2)
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta2
    return np.eye(3) + a * W + b * (W @ W)


# ---------------------------------------------------------------------------
# Group descriptions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupDescription:
    """A matrix Lie group given by an orthonormal algebra basis.

    The optional hooks let a concrete group supply closed forms for the
    exponential, membership test, retraction and (co)adjoint matrices; the
    generic fallbacks only use the basis.
    """

    name: str
    basis: Array
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL
    orthogonal: bool = False
    exp_fn: Callable[[Array], Array] | None = field(default=None, repr=False)
    member_fn: Callable[[Array, float], bool] | None = field(default=None, repr=False)
    retract_fn: Callable[[Array], Array] | None = field(default=None, repr=False)
    adjoint_fn: Callable[[Array], Array] | None = field(default=None, repr=False)
    ad_fn: Callable[[Array], Array] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise PreconditionError("basis must have shape (n, m, m)")
        object.__setattr__(self, "basis", basis)
        # (n, m*m) matrix whose rows are the flattened basis elements
        object.__setattr__(self, "_flat", basis.reshape(basis.shape[0], -1))

    @property
    def dim_matrix(self) -> int:
        return self.basis.shape[1]

    @property
    def dim_algebra(self) -> int:
        return self.basis.shape[0]

    def identity(self) -> Array:
        return np.eye(self.dim_matrix)

    def to_matrix(self, u: Array) -> Array:
        """Matrix form ``sum_i u_i E_i`` of algebra coordinates."""
        return np.tensordot(np.asarray(u, dtype=float), self.basis, axes=1)

    def coords(self, A: Array) -> Array:
        """Frobenius coordinates ``<E_i, A>``; the orthogonal projection onto the algebra."""
        return self._flat @ np.asarray(A, dtype=float).reshape(-1)

    def is_member(self, X: Array, tol: float | None = None) -> bool:
        tol = self.membership_tol if tol is None else tol
        if self.member_fn is None:
            raise NotImplementedError(f"{self.name} has no membership test")
        return self.member_fn(np.asarray(X, dtype=float), tol)

    def check_bracket_closure(self) -> float:
        """Largest residual of ``[E_i, E_j]`` outside the span of the basis."""
        worst = 0.0
        for Ei in self.basis:
            for Ej in self.basis:
                C = Ei @ Ej - Ej @ Ei
                worst = max(worst, float(np.linalg.norm(C - self.to_matrix(self.coords(C)))))
        return worst

    def gram_residual(self) -> float:
        G = self._flat @ self._flat.T
        return float(np.max(np.abs(G - np.eye(self.dim_algebra))))


def _so_basis(n: int) -> Array:
    basis = []
    s = 1.0 / np.sqrt(2.0)
    # ordering chosen so that n=3 reproduces hat(e_i)/sqrt(2)
    if n == 3:
        return np.stack([hat(e) * s for e in np.eye(3)])
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j] = -s
            E[j, i] = s
            basis.append(E)
    return np.stack(basis)


def _so_member(X: Array, tol: float) -> bool:
    n = X.shape[0]
    if X.shape != (n, n) or not np.all(np.isfinite(X)):
        return False
    return bool(np.linalg.norm(X.T @ X - np.eye(n)) < tol and np.linalg.det(X) > 0.0)


def polar_retract(A: Array) -> Array:
    """Nearest special-orthogonal matrix to ``A`` (orthogonal polar factor)."""
    if not math.isfinite(float(np.sum(A))):
        raise RetractionError("non-finite matrix passed to retraction")
    U, s, Vt = np.linalg.svd(A)
    if s[-1] <= 1e-12 * max(s[0], 1.0):
        raise RetractionError("singular polar factor")
    R = U @ Vt
    if np.linalg.det(R) < 0.0:
        raise RetractionError("polar factor has negative determinant")
    return R


def special_orthogonal(n: int, membership_tol: float = DEFAULT_MEMBERSHIP_TOL) -> GroupDescription:
    """SO(n) with the basis ``(e_j e_i^T - e_i e_j^T)/sqrt(2)``.

    For ``n == 3`` the basis is ``hat(e_i)/sqrt(2)`` and closed forms are used
    for the exponential and the (co)adjoint matrices.
    """
    basis = _so_basis(n)
    if n == 3:
        return GroupDescription(
            name="SO(3)",
            basis=basis,
            membership_tol=membership_tol,
            orthogonal=True,
            exp_fn=lambda u: rodrigues(np.asarray(u) / np.sqrt(2.0)),
            member_fn=_so_member,
            retract_fn=polar_retract,
            adjoint_fn=lambda X: np.array(X, dtype=float),
            ad_fn=lambda u: hat(u) / np.sqrt(2.0),
        )
    return GroupDescription(
        name=f"SO({n})",
        basis=basis,
        membership_tol=membership_tol,
        orthogonal=True,
        member_fn=_so_member,
        retract_fn=polar_retract,
    )


SO3 = special_orthogonal(3)


# ---------------------------------------------------------------------------
# Algebra operations
# ---------------------------------------------------------------------------


def project_algebra(A: Array, desc: GroupDescription = SO3) -> Array:
    """Orthogonal projection of an ``m x m`` matrix onto the algebra, in coordinates.

    For SO(n) the matrix form of the result is ``(A - A^T)/2``.
    """
    return desc.coords(A)


def group_exp(u: Array, desc: GroupDescription = SO3) -> Array:
    """Group exponential of algebra coordinates ``u``."""
    if desc.exp_fn is not None:
        return desc.exp_fn(np.asarray(u, dtype=float))
    return scipy.linalg.expm(desc.to_matrix(u))


def adjoint_matrix(X: Array, desc: GroupDescription = SO3) -> Array:
    """Coordinate matrix of ``Ad_X``; entry ``(i, j)`` is ``<E_i, X E_j X^{-1}>``."""
    if desc.adjoint_fn is not None:
        return desc.adjoint_fn(X)
    Xinv = np.linalg.inv(X)
    conj = np.einsum("ab,jbc,cd->jad", X, desc.basis, Xinv)
    return desc._flat @ conj.reshape(desc.dim_algebra, -1).T


def ad_matrix(u: Array, desc: GroupDescription = SO3) -> Array:
    """Coordinate matrix of ``ad_u``; entry ``(i, j)`` is ``<E_i, [u, E_j]>``."""
    if desc.ad_fn is not None:
        return desc.ad_fn(np.asarray(u, dtype=float))
    U = desc.to_matrix(u)
    comm = np.einsum("ab,jbc->jac", U, desc.basis) - np.einsum("jab,bc->jac", desc.basis, U)
    return desc._flat @ comm.reshape(desc.dim_algebra, -1).T


def adjoint(X: Array, u: Array, desc: GroupDescription = SO3) -> Array:
    """``Ad_X u = X u X^{-1}``."""
    return adjoint_matrix(X, desc) @ u


def co_adjoint(X: Array, p: Array, desc: GroupDescription = SO3) -> Array:
    """``Ad*_X p``, the dual of :func:`adjoint`."""
    return adjoint_matrix(X, desc).T @ p


def ad(u: Array, v: Array, desc: GroupDescription = SO3) -> Array:
    """``ad_u v = [u, v]``."""
    return ad_matrix(u, desc) @ v


def co_ad(u: Array, p: Array, desc: GroupDescription = SO3) -> Array:
    """``ad*_u p``, the dual of :func:`ad`."""
    return ad_matrix(u, desc).T @ p


def pair(p: Array, v: Array) -> float:
    """Evaluate the coalgebra element ``p`` on the algebra element ``v``."""
    return float(np.dot(p, v))


def group_inv(X: Array, desc: GroupDescription = SO3) -> Array:
    if desc.orthogonal:
        return X.T
    return np.linalg.inv(X)


def random_algebra(rng: np.random.Generator, desc: GroupDescription = SO3, scale: float = 1.0) -> Array:
    return scale * rng.standard_normal(desc.dim_algebra)


def random_group(rng: np.random.Generator, desc: GroupDescription = SO3, scale: float = 1.0) -> Array:
    """``group_exp`` of a Gaussian algebra vector."""
    return group_exp(random_algebra(rng, desc, scale), desc)
