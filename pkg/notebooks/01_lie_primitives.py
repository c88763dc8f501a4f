# %% [markdown]
# # Lie-algebra primitives on SO(3)
#
# The generic layer stores algebra elements as coordinates in an orthonormal
# (Frobenius) basis, `E_i = hat(e_i) / sqrt(2)`. Coalgebra elements use the
# dual basis, so every co-operator is just a transpose.

# %%
import numpy as np

from equitrack.lie import (
    SO3,
    ad,
    adjoint,
    co_ad,
    co_adjoint,
    frobenius,
    group_exp,
    hat,
    project_algebra,
    special_orthogonal,
    vee,
)

np.set_printoptions(precision=4, suppress=True)

# %% [markdown]
# `hat` turns a 3-vector into the matrix of its cross product.

# %%
v, u = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
print(hat(v) @ u, np.cross(v, u))
print(vee(hat(np.array([1.0, 2.0, 3.0]))))

# %% [markdown]
# The Frobenius pairing of two hats is twice the dot product, which is where
# the `sqrt(2)` in the basis comes from.

# %%
print(frobenius(hat(v), hat(v)), SO3.gram_residual())

# %% [markdown]
# Projection onto the algebra is the skew-symmetric part.

# %%
A = np.arange(9.0).reshape(3, 3)
print(SO3.to_matrix(project_algebra(A)))
print(0.5 * (A - A.T))

# %% [markdown]
# A quarter turn about `e3` maps `e1` to `e2`; a half turn has trace -1.

# %%
R = group_exp(project_algebra(hat(0.5 * np.pi * np.array([0.0, 0.0, 1.0]))))
print(R @ np.array([1.0, 0.0, 0.0]))
print(np.trace(group_exp(project_algebra(hat(np.pi * np.array([0.8, 0.6, 0.0]))))))

# %% [markdown]
# Adjoint operators, and the duality between `ad` and `ad*`.

# %%
rng = np.random.default_rng(0)
X = group_exp(rng.standard_normal(3))
a, b, p = rng.standard_normal((3, 3))
print(np.allclose(SO3.to_matrix(adjoint(X, a)), X @ SO3.to_matrix(a) @ X.T))
print(co_ad(a, p) @ b - p @ ad(a, b))
print(co_adjoint(X, p) @ b - p @ adjoint(X, b))

# %% [markdown]
# Nothing here is specific to SO(3): SO(4) goes through the generic path
# (scipy's `expm`, adjoint matrices built from the basis).

# %%
SO4 = special_orthogonal(4)
Y = group_exp(rng.standard_normal(SO4.dim_algebra), SO4)
print(SO4.dim_algebra, SO4.is_member(Y), SO4.check_bracket_closure())
