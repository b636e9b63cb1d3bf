"""Counter-based random streams, one per trajectory.

Trajectory ``i`` of a run seeded with ``seed`` draws from a Philox stream
keyed by ``(seed, i)``.  Every engine consumes a fixed number of uniforms per
step, so the draw for (step, slot) sits at a fixed counter position and a
trajectory's noise never depends on which batch or worker ran it.
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_HALF_ULP = 2.0 ** -54


def trajectory_generator(seed: int, index: int) -> np.random.Generator:
    key = (int(index) << 64) | (int(seed) & (2**64 - 1))
    return np.random.Generator(np.random.Philox(key=key))


def open_uniform(u: np.ndarray) -> np.ndarray:
    """Shift ``[0, 1)`` doubles on the 2**-53 grid into the open interval."""
    return u + _HALF_ULP


def normal_from_uniform(u: np.ndarray) -> np.ndarray:
    """One standard normal per uniform via the inverse CDF."""
    return ndtri(open_uniform(u))


class UniformBlocks:
    """Streams ``(n_traj, block, n_draws)`` uniform arrays, step-major."""

    def __init__(self, seed: int, indices, n_draws: int, block: int = 256):
        self.gens = [trajectory_generator(seed, i) for i in indices]
        self.n_draws = n_draws
        self.block = block
        self._buf = None
        self._start = 0

    def at(self, step: int) -> np.ndarray:
        """Uniforms for ``step`` (steps must be requested in increasing order)."""
        if self._buf is None or step >= self._start + self._buf.shape[1]:
            self._start = step
            self._buf = np.stack([g.random((self.block, self.n_draws)) for g in self.gens])
        return self._buf[:, step - self._start, :]
