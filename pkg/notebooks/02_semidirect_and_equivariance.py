# %% [markdown]
# # The semidirect product and equivariance
#
# Phase states `(Q, P)` form a group with
# `(Q1, P1)(Q2, P2) = (Q1 Q2, Ad*_{Q2} P1 + P2)`. It acts on states by right
# multiplication (`phi`) and on inputs `(U, tau)` by `psi`. The extended
# Euler-Poincare vector field is equivariant under this pair of actions.

# %%
import numpy as np

from equitrack.dynamics import equivariance_residuals
from equitrack.semidirect import PhaseState, phi, psi, sd_inv, sd_mul
from equitrack.verify import random_input, random_state

rng = np.random.default_rng(1)
a, b, x = (random_state(rng) for _ in range(3))

# %% [markdown]
# Group axioms: associativity and inverses hold to machine precision.

# %%
lhs, rhs = sd_mul(sd_mul(a, b), x), sd_mul(a, sd_mul(b, x))
print(np.max(np.abs(lhs.Q - rhs.Q)), np.max(np.abs(lhs.P - rhs.P)))
e = sd_mul(a, sd_inv(a))
print(np.max(np.abs(e.Q - np.eye(3))), np.max(np.abs(e.P)))

# %% [markdown]
# Both actions are right actions: acting by `a` then `b` equals acting by `ab`.

# %%
inp = random_input(rng)
s1, s2 = phi(b, phi(a, x)), phi(sd_mul(a, b), x)
i1, i2 = psi(b, psi(a, inp)), psi(sd_mul(a, b), inp)
print(np.max(np.abs(s1.Q - s2.Q)), np.max(np.abs(i1.U - i2.U)), np.max(np.abs(i1.tau - i2.tau)))

# %% [markdown]
# Equivariance: pushing the vector field forward by `phi_g` equals the vector
# field at the transformed state and input. The first number compares the
# analytic pushforward, the second a central difference with step `1e-4`.

# %%
worst = np.zeros(2)
for _ in range(200):
    g, x, inp = random_state(rng), random_state(rng), random_input(rng)
    worst = np.maximum(worst, equivariance_residuals(g, x, inp))
print(worst)

# %% [markdown]
# A pure-momentum group element `(I, P)` exercises the coriolis term of `psi`.

# %%
g = PhaseState(np.eye(3), rng.standard_normal(3))
print(equivariance_residuals(g, random_state(rng), random_input(rng)))
