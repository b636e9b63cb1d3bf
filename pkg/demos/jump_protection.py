"""
Recycling a decaying qutrit pair
================================

Two qutrits decay down the ladder 2 -> 1 -> 0.  Every detected photon is
answered by the recycling pulse, which lifts the emitting qutrit back into
the codespace {|1>, |2>}.  With ideal feedback the entanglement of the W
state (|12> + |21>)/sqrt(2) never moves.
"""
import numpy as np

from qutrit_feedback.channels import ladder_indistinguishable, local_channels
from qutrit_feedback.codes import jump_code
from qutrit_feedback.qcore import normalize, product_ket
from qutrit_feedback.trajectories import SimParams, simulate_jumps

cs = local_channels(ladder_indistinguishable(), 2)
psi = normalize(product_ket(1, 2) + product_ket(2, 1))
code = jump_code()

# %%
# Without feedback the pair loses its excitations and its entanglement.
free = simulate_jumps(psi, cs, None, SimParams(dt=1e-3, t_max=5.0, record_stride=500), range(200))
print("no feedback, mean negativity:", np.round(free.mean_negativity, 3))

# %%
# With instantaneous recycling each trajectory stays at N = 1.
fed = simulate_jumps(psi, cs, code, SimParams(dt=1e-3, t_max=5.0, record_stride=500), range(200))
print("feedback,    mean negativity:", np.round(fed.mean_negativity, 3))
print("clicks per trajectory:", np.mean([len(r) for r in fed.events]) / 2)

# %%
# Imperfections: a delay, a lossy detector and a jittery pulse all cost something.
for label, p in [("tau = 0.3", SimParams(dt=1e-3, t_max=5.0, tau=0.3, record_stride=5000)),
                 ("eta = 0.9", SimParams(dt=1e-3, t_max=5.0, eta=0.9, record_stride=5000)),
                 ("var(delta) = 0.1", SimParams(dt=1e-3, t_max=5.0, delta_var=0.1, record_stride=5000))]:
    r = simulate_jumps(psi, cs, code, p, range(200))
    print(f"{label:>17}: N(5) = {r.mean_negativity[-1]:.3f} +- {r.stderr_negativity[-1]:.3f}")
