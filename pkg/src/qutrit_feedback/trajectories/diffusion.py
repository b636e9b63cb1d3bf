"""Homodyne (diffusive) unraveling with delayed Markovian feedback."""
from __future__ import annotations

import numpy as np

from ..channels import ChannelSet
from ..codes import CodeSpec
from ..qcore import matrix_exponential
from ._ops import (SparseOp, apply_local_dm, apply_local_ket, embed_local, local_unitaries,
                   norm_sq, real_trace, sum_last)
from .jumps import _check_code, _initial_state, code_projector
from .params import SimParams
from .records import EnsembleResult, Observer, TrajectoryRecord
from .rng import UniformBlocks, normal_from_uniform

# a step that changes the unnormalized norm by more than this is suspect
NORM_JUMP_LIMIT = 0.2


def simulate_diffusion(state0, cs: ChannelSet, code: CodeSpec | None = None,
                       params: SimParams = SimParams(), indices=(0,), *,
                       hamiltonian: np.ndarray | None = None, keep_states: bool = False,
                       keep_dq: bool = False, force_density: bool = False) -> EnsembleResult:
    """Euler-Maruyama integration of the linear homodyne equation, batched.

    Per step: ``dQ_k = eta_k <Pi_k + Pi_k^dag> dt + sqrt(eta_k) dW_k``; the
    unnormalized state takes ``rho + L rho dt + sum_k (Pi_k rho + rho Pi_k^dag) dQ_k``
    (kets: ``psi + (-K/2 dt + sum_k Pi_k dQ_k) psi``).  Density matrices are
    advanced as ``M rho M^dag + sum_k (1 - eta_k) Pi_k rho Pi_k^dag dt`` with
    ``M = 1 + G dt + sum_k Pi_k dQ_k``, equal to the above up to terms that
    vanish in the Ito limit and positive by construction.  With a code, the drive
    ``exp(-i H dt)`` and then the delayed feedback ``exp(-i F dQ_k(t - tau)/eta_k)``
    act on each channel's site; finally the state is renormalized.
    """
    dims = tuple(cs.dims)
    D = int(np.prod(dims))
    state0 = _initial_state(state0, dims)
    _check_code(cs, code, "diffusion")
    indices = np.asarray(indices, dtype=np.int64)
    n, dt, nch = len(indices), params.dt, len(cs)
    etas = params.etas(nch)
    use_kets = state0.ndim == 1 and np.all(etas == 1.0) and not force_density
    cut = params.cut_sites(len(dims))
    sqdt = np.sqrt(dt)

    ops = [SparseOp(L) for L in cs.operators]
    H = np.zeros((D, D), dtype=complex) if hamiltonian is None else np.asarray(hamiltonian, dtype=complex)
    G = SparseOp(-0.5 * cs.decay_operator() - 1j * H)

    sites = np.array(cs.sites)
    tau_steps = params.tau_steps
    ring_len = tau_steps + 1
    ring = np.zeros((n, ring_len, nch))
    if code is not None:
        w, V = code.feedback_eigensystem()
        drive = {s: SparseOp(embed_local(matrix_exponential(-1j * dt * code.drive), dims, s))
                 for s in np.unique(sites)}

    observer = Observer(state0, dims, cut, code_projector(code, len(dims)))
    samples = params.sample_steps()
    sample_pos = {int(s): i for i, s in enumerate(samples)}
    S = len(samples)
    neg_out = np.zeros((n, S))
    spec_out = np.zeros((n, S, D))
    fid_out = np.zeros((n, S))
    pop_out = np.zeros((n, S))
    states_out = np.zeros((n, S, D, D), dtype=complex) if keep_states else None
    dq_out = np.zeros((n, params.n_steps, nch)) if keep_dq else None
    flagged = np.zeros(n, dtype=bool)

    if use_kets:
        state = np.tile(state0, (n, 1))
    else:
        rho0 = np.outer(state0, state0.conj()) if state0.ndim == 1 else state0
        state = np.tile(rho0, (n, 1, 1))

    def record(pos, st):
        neg, spec, fid, pop, rho = observer(st)
        neg_out[:, pos], spec_out[:, pos], fid_out[:, pos], pop_out[:, pos] = neg, spec, fid, pop
        if keep_states:
            states_out[:, pos] = rho

    record(0, state)
    blocks = UniformBlocks(params.seed, indices, nch)
    for s in range(params.n_steps):
        dW = sqdt * normal_from_uniform(blocks.at(s))
        dQ = np.empty((n, nch))
        if use_kets:
            kicked = [op.ket(state) for op in ops]
            new = state + dt * G.ket(state)
            for k in range(nch):
                x = 2.0 * _real_dot(state, kicked[k])
                dQ[:, k] = etas[k] * x * dt + np.sqrt(etas[k]) * dW[:, k]
                new += dQ[:, k][:, None] * kicked[k]
            nrm = norm_sq(new)
        else:
            lefts = [op.left(state) for op in ops]
            half = state + dt * G.left(state)
            for k in range(nch):
                x = 2.0 * real_trace(lefts[k])
                dQ[:, k] = etas[k] * x * dt + np.sqrt(etas[k]) * dW[:, k]
                half += dQ[:, k][:, None, None] * lefts[k]
            new = half + dt * G.right_dag(half)
            for k, op in enumerate(ops):
                new += dQ[:, k][:, None, None] * op.right_dag(half)
                if etas[k] < 1.0:
                    new += (dt * (1.0 - etas[k])) * op.right_dag(lefts[k])
            nrm = real_trace(new)
        flagged |= np.abs(nrm - 1.0) > NORM_JUMP_LIMIT
        state = new / (np.sqrt(nrm)[:, None] if use_kets else nrm[:, None, None])
        if keep_dq:
            dq_out[:, s] = dQ

        if code is not None:
            ring[:, (s + tau_steps) % ring_len] = dQ
            due = ring[:, s % ring_len]
            for site in np.unique(sites):
                op = drive[site]
                state = op.ket(state) if use_kets else op.sandwich(state)
            for k in range(nch):
                U = local_unitaries(w, V, due[:, k] / etas[k])
                state = (apply_local_ket(U, state, dims, sites[k]) if use_kets
                         else apply_local_dm(U, state, dims, sites[k]))
            ring[:, s % ring_len] = 0.0

        pos = sample_pos.get(s + 1)
        if pos is not None:
            record(pos, state)

    return EnsembleResult(samples * dt, neg_out, spec_out, fid_out, pop_out, [[] for _ in range(n)],
                          indices, dq_out, states_out, flagged)


def _real_dot(psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``Re <psi|phi>`` per row, summed in a fixed order."""
    return sum_last(psi.real * phi.real + psi.imag * phi.imag)


def diffusion_trajectory(state0, cs: ChannelSet, code: CodeSpec | None = None,
                         params: SimParams = SimParams(), index: int = 0,
                         **kwargs) -> TrajectoryRecord:
    """Single homodyne trajectory with its photocurrent record ``dQ``."""
    kwargs.setdefault("keep_dq", True)
    return simulate_diffusion(state0, cs, code, params, [index], **kwargs).record(0)
