# %% [markdown]
# # The antipodal equilibria
#
# Besides the identity, the closed loop has equilibria at half-turn errors
# (`tr R_E = -1`, `p_E = 0`). There the configuration term `|R_E - I|^2`
# is at its maximum of 8, and moving along the rotation axis reduces it by
# about `2 s^2`. Those equilibria are therefore unstable.

# %%
import dataclasses

import numpy as np

from equitrack import so3
from equitrack.lie import random_group, rodrigues
from equitrack.semidirect import PhaseState
from equitrack.sim import BUNDLED_SCENARIO, TorqueWaveform, load_scenario, simulate_states

Lam = np.diag([1.0, -1.0, -1.0])
R = random_group(np.random.default_rng(5))

# %%
for s in (0.0, 0.01, 0.02, 0.05):
    err = PhaseState(R @ Lam @ R.T @ rodrigues(s * R[:, 0]), np.zeros(3))
    print(f"s={s:.2f}  value={so3.configuration_error(err):.8f}  8-2s^2={8 - 2 * s * s:.8f}")

# %% [markdown]
# Starting exactly on the set with a quiet reference the state stays put;
# a small perturbation escapes and converges to the identity.

# %%
base = dataclasses.replace(load_scenario(BUNDLED_SCENARIO), Omega0=np.zeros(3), duration=20.0)
for s, tau_d in ((0.0, TorqueWaveform("zero")), (0.05, base.tau_d)):
    sc = dataclasses.replace(base, R0=R @ Lam @ R.T @ rodrigues(s * R[:, 0]), tau_d=tau_d)
    labels = {}
    for t, x, xd in simulate_states(sc):
        if round(t, 6) in (0.0, 1.0, 5.0, 10.0, 20.0):
            labels[round(t)] = so3.classify_equilibrium(so3.so3_error(x, xd)).value
    print(f"s={s}: {labels}")
