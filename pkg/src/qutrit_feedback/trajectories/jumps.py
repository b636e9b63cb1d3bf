"""Photon-counting unraveling with delayed, disordered, inefficient feedback."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..channels import ChannelSet
from ..codes import CodeSpec
from ..qcore import matrix_exponential, negativity, normalize, tensor_product
from ._ops import (SparseOp, apply_local_dm, apply_local_ket, embed_local, local_unitaries,
                   norm_sq, real_trace)
from .params import SimParams
from .records import EnsembleResult, Event, Observer, TrajectoryRecord
from .rng import UniformBlocks, normal_from_uniform

# uniforms consumed per step: channel selection, feedback disorder
JUMP_DRAWS = 2
MAX_STEP_PROBABILITY = 0.1


def _initial_state(state0, dims):
    state0 = np.asarray(state0, dtype=complex)
    D = int(np.prod(dims))
    if state0.shape not in ((D,), (D, D)):
        raise ValueError(f"initial state shape {state0.shape} does not fit register {dims}")
    if state0.ndim == 1:
        return normalize(state0)
    tr = np.trace(state0).real
    if abs(tr - 1) > 1e-9:
        raise ValueError(f"initial density matrix has trace {tr}")
    return state0


def _check_code(cs: ChannelSet, code: CodeSpec | None, kind: str):
    if code is None:
        return
    if code.kind != kind:
        raise ValueError(f"a {code.kind} code cannot drive the {kind} unraveling")
    for d in cs.dims:
        if d != code.dim:
            raise ValueError(f"code acts on dimension {code.dim}, register has {cs.dims}")


def code_projector(code: CodeSpec | None, n_sites: int):
    if code is None:
        return None
    return tensor_product(*([code.codespace_projector] * n_sites))


def simulate_jumps(state0, cs: ChannelSet, code: CodeSpec | None = None,
                   params: SimParams = SimParams(), indices=(0,), *,
                   hamiltonian: np.ndarray | None = None, keep_states: bool = False,
                   track_event_negativity: bool = False,
                   force_density: bool = False) -> EnsembleResult:
    """Run the jump unraveling for the trajectories in ``indices`` side by side.

    Each step a detector on channel ``k`` clicks with probability
    ``eta_k tr(Pi_k rho Pi_k^dag) dt`` (at most one click per step).  A
    click enqueues the code's recycling pulse for ``tau`` later on the
    channel's site; the pulse is ``exp(-i (1 + delta/lambda) F)`` with
    ``delta ~ N(0, delta_var)`` drawn at the click.  Without a click the
    state follows ``rho + (L rho - sum_k eta_k Pi_k rho Pi_k^dag) dt``,
    renormalized; it is evaluated in the completely positive form
    ``M rho M^dag + sum_k (1 - eta_k) Pi_k rho Pi_k^dag dt`` with
    ``M = exp(G dt)``, ``G = -iH - K/2``, which agrees to first order in ``dt``
    and keeps the state positive.  Pure states at ``eta = 1`` are carried as
    kets.  Pulses due in a step are applied after that step's measurement
    update.
    """
    dims = tuple(cs.dims)
    D = int(np.prod(dims))
    state0 = _initial_state(state0, dims)
    _check_code(cs, code, "jump")
    indices = np.asarray(indices, dtype=np.int64)
    n, dt = len(indices), params.dt
    etas = params.etas(len(cs))
    use_kets = state0.ndim == 1 and np.all(etas == 1.0) and not force_density
    cut = params.cut_sites(len(dims))

    ops = [SparseOp(L) for L in cs.operators]
    decays = [SparseOp(L.conj().T @ L) for L in cs.operators]
    H = np.zeros((D, D), dtype=complex) if hamiltonian is None else np.asarray(hamiltonian, dtype=complex)
    G = -0.5 * cs.decay_operator() - 1j * H
    no_jump = SparseOp(matrix_exponential(G * dt))

    tau_steps = params.tau_steps
    ring_len = tau_steps + 1
    ring_chan = np.full((n, ring_len), -1, dtype=np.int64)
    ring_delta = np.zeros((n, ring_len))
    if code is not None:
        lam = code.lambda_mag
        w, V = code.feedback_eigensystem()
        fixed_pulse = {s: SparseOp(embed_local(code.feedback_unitary(), dims, s), tol=1e-14)
                       for s in set(cs.sites)}
    sd = np.sqrt(params.delta_var)

    observer = Observer(state0, dims, cut, code_projector(code, len(dims)))
    samples = params.sample_steps()
    sample_pos = {int(s): i for i, s in enumerate(samples)}
    S = len(samples)
    neg_out = np.zeros((n, S))
    spec_out = np.zeros((n, S, D))
    fid_out = np.zeros((n, S))
    pop_out = np.zeros((n, S))
    states_out = np.zeros((n, S, D, D), dtype=complex) if keep_states else None
    events: list[list[Event]] = [[] for _ in range(n)]

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

    def rows_negativity(st):
        rho = np.einsum("ni,nj->nij", st, st.conj()) if use_kets else st
        return negativity(rho, dims, cut, check=False)

    record(0, state)
    blocks = UniformBlocks(params.seed, indices, JUMP_DRAWS)
    warned = False
    for s in range(params.n_steps):
        u = blocks.at(s)
        if use_kets:
            kicked = [op.ket(state) for op in ops]
            probs = np.stack([etas[k] * dt * norm_sq(kicked[k]) for k in range(len(ops))], axis=1)
            new = no_jump.ket(state)
        else:
            probs = np.stack([etas[k] * dt * decays[k].trace_with(state) for k in range(len(ops))], axis=1)
            new = no_jump.sandwich(state)
            for k, op in enumerate(ops):
                if etas[k] < 1.0:
                    new += (dt * (1.0 - etas[k])) * op.sandwich(state)
        if not warned and probs.max() > MAX_STEP_PROBABILITY:
            warnings.warn(f"jump probability {probs.max():.3f} per step; reduce dt", RuntimeWarning)
            warned = True

        chosen = np.full(n, -1, dtype=np.int64)
        acc = np.zeros(n)
        for k in range(len(ops)):
            lo = acc
            acc = acc + probs[:, k]
            chosen[(u[:, 0] >= lo) & (u[:, 0] < acc)] = k
        jumped = np.flatnonzero(chosen >= 0)

        if jumped.size:
            before = rows_negativity(state[jumped]) if track_event_negativity else None
            for k in np.unique(chosen[jumped]):
                rows = np.flatnonzero(chosen == k)
                new[rows] = kicked[k][rows] if use_kets else ops[k].sandwich(state[rows])
        if use_kets:
            new /= np.sqrt(norm_sq(new))[:, None]
        else:
            new /= real_trace(new)[:, None, None]
        state = new

        t_now = (s + 1) * dt
        if jumped.size:
            after = rows_negativity(state[jumped]) if track_event_negativity else None
            deltas = sd * normal_from_uniform(u[jumped, 1]) if sd > 0 else np.zeros(jumped.size)
            slot = (s + tau_steps) % ring_len
            for r, j in enumerate(jumped):
                k = int(chosen[j])
                events[j].append(Event(t_now, cs.channels[k].label, "jump", cs.channels[k].site,
                                       0.0, s,
                                       None if before is None else float(before[r]),
                                       None if after is None else float(after[r])))
            if code is not None:
                ring_chan[jumped, slot] = chosen[jumped]
                ring_delta[jumped, slot] = deltas

        if code is not None:
            slot = s % ring_len
            due = np.flatnonzero(ring_chan[:, slot] >= 0)
            if due.size:
                before = rows_negativity(state[due]) if track_event_negativity else None
                sites = np.array([cs.channels[k].site for k in ring_chan[due, slot]])
                for site in np.unique(sites):
                    rows = due[sites == site]
                    if sd > 0:
                        U = local_unitaries(w, V, 1.0 + ring_delta[rows, slot] / lam)
                        state[rows] = (apply_local_ket(U, state[rows], dims, site) if use_kets
                                       else apply_local_dm(U, state[rows], dims, site))
                    else:
                        op = fixed_pulse[int(site)]
                        state[rows] = op.ket(state[rows]) if use_kets else op.sandwich(state[rows])
                after = rows_negativity(state[due]) if track_event_negativity else None
                for r, j in enumerate(due):
                    k = int(ring_chan[j, slot])
                    events[j].append(Event(t_now, cs.channels[k].label, "feedback_applied",
                                           cs.channels[k].site, float(ring_delta[j, slot]), s,
                                           None if before is None else float(before[r]),
                                           None if after is None else float(after[r])))
                ring_chan[due, slot] = -1

        pos = sample_pos.get(s + 1)
        if pos is not None:
            record(pos, state)

    times = samples * dt
    return EnsembleResult(times, neg_out, spec_out, fid_out, pop_out, events, indices,
                          None, states_out, np.zeros(n, dtype=bool))


def jump_trajectory(state0, cs: ChannelSet, code: CodeSpec | None = None,
                    params: SimParams = SimParams(), index: int = 0, **kwargs) -> TrajectoryRecord:
    """Single conditioned trajectory; ``index`` selects its random stream."""
    return simulate_jumps(state0, cs, code, params, [index], **kwargs).record(0)


@dataclass
class ReplayStep:
    time: float
    kind: str
    site: int
    before: np.ndarray
    after: np.ndarray


def replay_jumps(psi0, cs: ChannelSet, code: CodeSpec | None, clicks, tau: float,
                 t_end: float | None = None) -> tuple[list[ReplayStep], np.ndarray]:
    """Replay a prescribed click record exactly.

    ``clicks`` is a list of ``(time, channel_index)``.  Between events the
    ket follows the exact no-click propagator; each click applies its jump
    operator and schedules the recycling pulse ``tau`` later on the same
    site (a click and a pulse at equal times: click first).  Returns the
    per-event snapshots and the final normalized ket at ``t_end``.
    """
    psi = normalize(np.asarray(psi0, dtype=complex))
    dims = tuple(cs.dims)
    Heff = cs.effective_hamiltonian()
    queue = []
    for t, k in clicks:
        queue.append((float(t), 0, int(k)))
        if code is not None:
            queue.append((float(t) + tau, 1, int(k)))
    queue.sort()
    pulse = None if code is None else code.recycler if code.recycler is not None else code.feedback_unitary()
    steps, t_cur = [], 0.0
    for t, prio, k in queue:
        if t < t_cur:
            raise ValueError("click times must be non-negative and ordered")
        psi = normalize(matrix_exponential(Heff * (t - t_cur)) @ psi)
        t_cur = t
        site = cs.channels[k].site
        if prio == 0:
            after = normalize(cs.channels[k].operator @ psi)
            kind = "jump"
        else:
            after = embed_local(pulse, dims, site) @ psi
            kind = "feedback_applied"
        steps.append(ReplayStep(t, kind, site, psi, after))
        psi = after
    if t_end is not None:
        if t_end < t_cur:
            raise ValueError("t_end precedes the last event")
        psi = normalize(matrix_exponential(Heff * (t_end - t_cur)) @ psi)
    return steps, psi
