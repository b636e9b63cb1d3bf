"""
How a delayed pulse still restores the W state
==============================================

Replays a scripted record: qutrit 0 clicks at t = 0, qutrit 1 clicks 0.3
after the first pulse lands.  Between events the state follows the
no-click evolution, which reweights the branches by e^{-tau/2}; the second
delay undoes that reweighting, so the final state is W again.
"""
import numpy as np

from qutrit_feedback.channels import ladder_indistinguishable, local_channels
from qutrit_feedback.codes import jump_code
from qutrit_feedback.qcore import dm, negativity, normalize, product_ket
from qutrit_feedback.trajectories import replay_jumps

cs = local_channels(ladder_indistinguishable(), 2)
W = normalize(product_ket(1, 2) + product_ket(2, 1))
tau = 0.7
labels = [f"|{i}{j}>" for i in range(3) for j in range(3)]


def show(psi):
    return " ".join(f"{psi[k].real:+.4f}{labels[k]}" for k in np.flatnonzero(np.abs(psi) > 1e-12))


steps, final = replay_jumps(W, cs, jump_code(), [(0.0, 0), (tau + 0.3, 1)], tau, 3.0)
for s in steps:
    print(f"t = {s.time:.2f}  {s.kind:<16} site {s.site}")
    print("   before:", show(s.before), f"  N = {negativity(dm(s.before)):.4f}")
    print("   after: ", show(s.after), f"  N = {negativity(dm(s.after)):.4f}")
print("final:", show(final))
print("e^{-tau/2} =", np.exp(-tau / 2))
