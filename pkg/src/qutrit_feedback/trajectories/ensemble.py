"""Ensembles of conditioned trajectories, chunked and optionally parallel."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..qcore import trace_norm
from .diffusion import simulate_diffusion
from .jumps import simulate_jumps
from .records import EnsembleResult

ENGINES = {"jump": simulate_jumps, "diffusion": simulate_diffusion}


def _run_chunk(args):
    engine, state0, cs, code, params, indices, kwargs = args
    return ENGINES[engine](state0, cs, code, params, indices, **kwargs)


def run_ensemble(engine: str, state0, cs, code=None, params=None, n_traj: int = 1, *,
                 chunk_size: int = 500, workers: int = 1, **kwargs) -> EnsembleResult:
    """Run trajectories ``0 .. n_traj-1`` and stack them in index order.

    Trajectory ``i`` draws only from the stream keyed by ``(params.seed, i)``
    and the per-step arithmetic does not mix trajectories, so the result is
    bit-identical for any ``chunk_size`` and ``workers``.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {sorted(ENGINES)}")
    if n_traj < 1:
        raise ValueError("n_traj must be at least 1")
    if chunk_size < 1:
        raise ValueError("chunk_size must be at least 1")
    if params is None:
        from .params import SimParams
        params = SimParams()
    idx = np.arange(n_traj)
    jobs = [(engine, state0, cs, code, params, idx[i:i + chunk_size], kwargs)
            for i in range(0, n_traj, chunk_size)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    return EnsembleResult.concatenate(parts)


def trace_distance_stderr(states: np.ndarray, reference: np.ndarray, n_batches: int = 50):
    """Trace-norm error of the sample mean and its batch-means standard error.

    ``states`` has shape ``(n_traj, ..., D, D)``.  The trajectories are split
    into ``n_batches`` equal groups; with batch means ``rho_b`` and overall
    mean ``rho``, the standard error of ``||rho - reference||_1`` is taken as
    ``sqrt(mean_b ||rho_b - rho||_1^2 / (B - 1))``.
    Returns ``(error, stderr)`` with the leading trajectory axis removed.
    """
    n = states.shape[0]
    B = min(n_batches, n)
    if B < 2:
        raise ValueError("need at least two trajectories")
    m = n // B
    batches = states[: m * B].reshape((B, m) + states.shape[1:]).mean(axis=1)
    mean = states.mean(axis=0)
    err = trace_norm(mean - reference)
    spread = np.stack([trace_norm(b - mean) for b in batches])
    se = np.sqrt((spread ** 2).mean(axis=0) / (B - 1))
    return err, se
