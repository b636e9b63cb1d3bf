from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SimParams:
    """Time grid, detector and feedback imperfections for one simulation.

    ``eta`` may be a scalar or one efficiency per channel.  ``tau`` is
    rounded to a whole number of steps.  ``cut`` lists the sites that are
    partially transposed for negativity; empty means the last site.
    """

    dt: float = 1e-3
    t_max: float = 10.0
    eta: float | tuple[float, ...] = 1.0
    tau: float = 0.0
    delta_var: float = 0.0
    seed: int = 0
    record_stride: int = 10
    cut: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > self.t_max:
            raise ValueError("dt must not exceed t_max")
        etas = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if np.any(etas <= 0) or np.any(etas > 1):
            raise ValueError(f"efficiencies must lie in (0, 1], got {self.eta}")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.delta_var < 0:
            raise ValueError("delta_var must be non-negative")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def tau_steps(self) -> int:
        return int(round(self.tau / self.dt))

    def etas(self, n_channels: int) -> np.ndarray:
        e = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if e.size == 1:
            return np.full(n_channels, float(e[0]))
        if e.size != n_channels:
            raise ValueError(f"{e.size} efficiencies given for {n_channels} channels")
        return e

    def sample_steps(self) -> np.ndarray:
        """Step counts at which observables are recorded (always includes both ends)."""
        n = self.n_steps
        s = np.arange(0, n + 1, self.record_stride)
        if s[-1] != n:
            s = np.append(s, n)
        return s

    def cut_sites(self, n_sites: int) -> tuple[int, ...]:
        return tuple(self.cut) if self.cut else (n_sites - 1,)
