# %% [markdown]
# # Tracking error dynamics
#
# For a plant `x` and a reference `xd` the error `e = phi(xd^{-1}, x)` obeys
# the same extended Euler-Poincare equations, driven by the transformed
# inputs `psi(xd^{-1}, u - ud)`. Below, both trajectories run with unrelated
# smooth inputs and the numerically differentiated error is compared with the
# error vector field.

# %%
import numpy as np

from equitrack.dynamics import step_coupled
from equitrack.semidirect import InputPair
from equitrack.tracking import (
    control_errors,
    error_energy,
    error_energy_rate,
    error_vector_field,
    inertia_error,
    inertia_error_inv_derivative,
    tracking_error,
)
from equitrack.verify import random_inertia, random_state, smooth_signal

rng = np.random.default_rng(2)
signals = [smooth_signal(rng) for _ in range(4)]


def mismatched(t, xs):
    return [InputPair(signals[0](t), signals[1](t)), InputPair(signals[2](t), signals[3](t))]


# %%
h = 1e-4
states = [random_state(rng), random_state(rng)]
for t in np.arange(0.0, 2.0, 0.5):
    s1 = step_coupled(states, mismatched, h, t)
    s2 = step_coupled(s1, mismatched, h, t + h)
    e0, e2 = tracking_error(*states), tracking_error(*s2)
    inp, ind = mismatched(t + h, s1)
    v = error_vector_field(tracking_error(*s1), control_errors(inp, ind, s1[1]))
    gap = max(np.max(np.abs((e2.Q - e0.Q) / (2 * h) - v.dQ)), np.max(np.abs((e2.P - e0.P) / (2 * h) - v.dP)))
    print(f"t={t:.1f}  max deviation {gap:.2e}")
    states = step_coupled(states, mismatched, 0.5, t)

# %% [markdown]
# With both trajectories physical (`U = I^{-1} P`) the error kinetic energy
# `P_E Ibar^{-1} P_E / 2` uses the time-varying inertia `Ibar`. Its derivative
# picks up a term from `Ibar` rotating with the reference.

# %%
inertia = random_inertia(rng)
inv = np.linalg.inv(inertia)


def physical(t, xs):
    return [InputPair(inv @ x.P, s(t)) for x, s in zip(xs, (signals[1], signals[3]))]


states = [random_state(rng), random_state(rng)]
s1 = step_coupled(states, physical, h, 0.0)
s2 = step_coupled(s1, physical, h, h)
E = lambda xs: error_energy(tracking_error(*xs), inertia_error(inertia, xs[1].Q))  # noqa: E731
inp, ind = physical(h, s1)
ce = control_errors(inp, ind, s1[1])
closed = error_energy_rate(tracking_error(*s1), ce.tau_tilde, inertia_error(inertia, s1[1].Q), s1[1].Q, ind.U)
print((E(s2) - E(states)) / (2 * h), closed)

# %% [markdown]
# The derivative of `Ibar^{-1}` is a commutator-like expression and therefore
# traceless.

# %%
D = inertia_error_inv_derivative(inertia, s1[1].Q, ind.U)
print(np.trace(D))
