"""
Homodyne feedback on the {|0>, |2>} code
========================================

A continuous photocurrent dQ drives the feedback Hamiltonian F dQ(t - tau).
With zero delay the Bell-like state (|00> + |22>)/sqrt(2) is held in place;
the residual infidelity comes from the finite time step and shrinks with it.
"""
import numpy as np

from qutrit_feedback.channels import ladder_indistinguishable, local_channels
from qutrit_feedback.codes import diffusion_code
from qutrit_feedback.qcore import normalize, product_ket
from qutrit_feedback.trajectories import SimParams, simulate_diffusion

cs = local_channels(ladder_indistinguishable(), 2)
psi = normalize(product_ket(0, 0) + product_ket(2, 2))
code = diffusion_code()
print("stabilizer S =", np.diag(code.stabilizer).real)

for dt in (4e-4, 2e-4, 1e-4):
    r = simulate_diffusion(psi, cs, code, SimParams(dt=dt, t_max=1.0, record_stride=10**6), range(50))
    print(f"dt = {dt:.0e}: mean infidelity {1 - r.fidelity[:, -1].mean():.2e}")

# %%
# Turning the feedback off lets the code population leak away.
r = simulate_diffusion(psi, cs, None, SimParams(dt=1e-3, t_max=1.0, record_stride=250), range(50))
print("no feedback, fidelity:", np.round(r.fidelity.mean(axis=0), 3))
