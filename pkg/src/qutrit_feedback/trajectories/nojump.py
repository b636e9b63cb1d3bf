"""Conditional evolution given that no detector ever clicks."""
from __future__ import annotations

import numpy as np
from scipy.linalg import eigh

from ..channels import ChannelSet
from ..errors import NumericalError

UNDERFLOW = 1e-280


def no_jump_propagate(psi0, cs: ChannelSet, t):
    """``exp(H_eff t) psi0`` renormalized, with ``H_eff = -1/2 sum Pi^dag Pi``.

    ``t`` may be a scalar or an array of times (result stacked along axis 0).
    ``H_eff`` is Hermitian, so the propagator is built from its
    eigendecomposition and is exact for any ``t``.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1) > 1e-9:
        raise ValueError(f"initial ket has norm {nrm}")
    heff = cs.effective_hamiltonian()
    if heff.shape[0] != psi0.size:
        raise ValueError("ket dimension does not match the channel set")
    w, V = eigh(heff)
    c = V.conj().T @ psi0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 0):
        raise ValueError("time must be non-negative")
    amp = np.exp(np.outer(ts, w))
    out = (amp * c[None, :]) @ V.T
    norms = np.linalg.norm(out, axis=1)
    if np.any(norms < UNDERFLOW):
        raise NumericalError("no-click state decayed below floating-point range")
    out = out / norms[:, None]
    return out[0] if np.ndim(t) == 0 else out
