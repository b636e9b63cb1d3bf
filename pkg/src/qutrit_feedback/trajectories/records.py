from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..qcore import EPS_ZERO, dm, fidelity, pt_spectrum
from ._ops import sum_last


@dataclass
class Event:
    """A detector click (``kind='jump'``) or a feedback pulse (``'feedback_applied'``).

    ``negativity_before``/``negativity_after`` are filled when the engine is
    asked to track entanglement across events.
    """

    time: float
    label: str
    kind: str
    site: int
    delta: float = 0.0
    step: int = 0
    negativity_before: float | None = None
    negativity_after: float | None = None


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    negativity: np.ndarray
    pt_spectra: np.ndarray
    fidelity: np.ndarray
    codespace_population: np.ndarray
    events: list[Event] = field(default_factory=list)
    dQ: np.ndarray | None = None
    states: np.ndarray | None = None
    flagged: bool = False

    def pt_negative_spectrum(self, k: int, eps: float = EPS_ZERO) -> np.ndarray:
        ev = self.pt_spectra[k]
        return ev[ev < -eps]

    @property
    def jumps(self) -> list[Event]:
        return [e for e in self.events if e.kind == "jump"]

    @property
    def feedbacks(self) -> list[Event]:
        return [e for e in self.events if e.kind == "feedback_applied"]


@dataclass
class EnsembleResult:
    """Per-trajectory observables stacked along axis 0 (trajectory index order)."""

    times: np.ndarray
    negativity: np.ndarray
    pt_spectra: np.ndarray
    fidelity: np.ndarray
    codespace_population: np.ndarray
    events: list[list[Event]]
    indices: np.ndarray
    dQ: np.ndarray | None = None
    states: np.ndarray | None = None
    flagged: np.ndarray | None = None

    @property
    def n_traj(self) -> int:
        return self.negativity.shape[0]

    @property
    def mean_negativity(self) -> np.ndarray:
        return self.negativity.mean(axis=0)

    @property
    def stderr_negativity(self) -> np.ndarray:
        if self.n_traj < 2:
            return np.zeros(self.negativity.shape[1])
        return self.negativity.std(axis=0, ddof=1) / np.sqrt(self.n_traj)

    def mean_state(self) -> np.ndarray:
        if self.states is None:
            raise ValueError("states were not kept; rerun with keep_states=True")
        return self.states.mean(axis=0)

    def record(self, k: int) -> TrajectoryRecord:
        return TrajectoryRecord(
            self.times, self.negativity[k], self.pt_spectra[k], self.fidelity[k],
            self.codespace_population[k], self.events[k],
            None if self.dQ is None else self.dQ[k],
            None if self.states is None else self.states[k],
            bool(self.flagged[k]) if self.flagged is not None else False,
        )

    @classmethod
    def concatenate(cls, parts: list["EnsembleResult"]) -> "EnsembleResult":
        def cat(name):
            vals = [getattr(p, name) for p in parts]
            return None if vals[0] is None else np.concatenate(vals)

        return cls(
            parts[0].times, cat("negativity"), cat("pt_spectra"), cat("fidelity"),
            cat("codespace_population"), [ev for p in parts for ev in p.events],
            cat("indices"), cat("dQ"), cat("states"), cat("flagged"),
        )


class Observer:
    """Computes the sampled observables for a batch of states."""

    def __init__(self, state0: np.ndarray, dims, cut, projector: np.ndarray | None):
        self.dims = tuple(dims)
        self.cut = cut
        self.rho0 = dm(state0) if state0.ndim == 1 else np.asarray(state0, dtype=complex)
        self.pure0 = state0 if state0.ndim == 1 else None
        if self.pure0 is None:
            ev, vecs = np.linalg.eigh(self.rho0)
            if ev[-1] > 1 - 1e-12:
                self.pure0 = vecs[:, -1]
        self.projector = projector

    def __call__(self, states: np.ndarray):
        rho = dm(states) if states.ndim == 2 else states
        spec = pt_spectrum(rho, self.dims, self.cut)
        neg = -2.0 * sum_last(np.where(spec < 0, spec, 0.0))
        if self.pure0 is not None:
            v = sum_last(rho * self.pure0[None, None, :])
            fid = sum_last(v * self.pure0.conj()[None, :]).real
        else:
            fid = np.array([fidelity(self.rho0, r) for r in rho])
        if self.projector is None:
            pop = np.full(rho.shape[0], np.nan)
        else:
            pop = sum_last(sum_last(self.projector[None] * np.swapaxes(rho, 1, 2))).real
        return neg, spec, fid, pop, rho
