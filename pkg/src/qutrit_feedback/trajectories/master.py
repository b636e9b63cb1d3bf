"""Unconditional Lindblad dynamics by fixed-step RK4."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channels import ChannelSet
from ..errors import NumericalError
from ..qcore import lindbladian
from .params import SimParams

POSITIVITY_FLOOR = -1e-6


@dataclass
class MasterResult:
    times: np.ndarray
    states: np.ndarray  # (n_times, D, D), or (n_init, n_times, D, D) for a batch


def rk4_propagator(generator: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step for the linear ODE ``x' = A x``, as a matrix."""
    h = dt * generator
    eye = np.eye(h.shape[0], dtype=complex)
    h2 = h @ h
    return eye + h + h2 / 2 + h2 @ h / 6 + h2 @ h2 / 24


def master_evolve(rho0, cs: ChannelSet | None, H: np.ndarray | None = None,
                  params: SimParams = SimParams(), check_positivity: bool = True) -> MasterResult:
    """Integrate ``d rho/dt = -i[H, rho] + sum_k D[Pi_k] rho`` with RK4.

    ``rho0`` may be one density matrix or a stack ``(n, D, D)``; states are
    returned at ``params.sample_steps()``.  A sampled state with an
    eigenvalue below ``-1e-6`` raises :class:`NumericalError`.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    single = rho0.ndim == 2
    batch = rho0[None] if single else rho0
    n, D, _ = batch.shape
    ops = [] if cs is None else cs.operators
    if H is not None:
        H = np.asarray(H, dtype=complex)
        if np.max(np.abs(H - H.conj().T)) > 1e-10:
            raise ValueError("Hamiltonian is not Hermitian")
    if not ops and H is None:
        gen = np.zeros((D * D, D * D), dtype=complex)
    else:
        gen = lindbladian(ops, H)
    if gen.shape[0] != D * D:
        raise ValueError("channel dimension does not match the state")
    step = rk4_propagator(gen, params.dt).T
    samples = params.sample_steps()
    out = np.empty((n, len(samples), D, D), dtype=complex)
    vec = batch.reshape(n, D * D)
    out[:, 0] = batch
    done = 0
    for i, target in enumerate(samples[1:], start=1):
        for _ in range(target - done):
            vec = vec @ step
        done = target
        rho = vec.reshape(n, D, D)
        if check_positivity:
            lo = np.linalg.eigvalsh(0.5 * (rho + np.swapaxes(rho, 1, 2).conj())).min()
            if lo < POSITIVITY_FLOOR:
                raise NumericalError(f"state lost positivity (eigenvalue {lo:.2e}) at t={target * params.dt:.4g}; reduce dt")
        out[:, i] = rho
    return MasterResult(samples * params.dt, out[0] if single else out)
