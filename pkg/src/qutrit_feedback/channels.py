"""Collapse-operator families for dissipative qutrits.

Rates are absorbed into the operators (``Pi = sqrt(gamma) * ...``) and all
times are measured in units of ``1/gamma`` with ``gamma = 1`` by default.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .qcore import tensor_product


def ketbra(i: int, j: int, d: int = 3) -> np.ndarray:
    """``|i><j|`` on a ``d``-level system."""
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1.0
    return m


@dataclass(frozen=True, eq=False)
class Channel:
    label: str
    operator: np.ndarray
    site: int = 0


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Labelled collapse operators on a register of ``len(dims)`` qutrits.

    ``alpha`` and ``beta`` record the distinguishability and rate-imbalance
    knobs used to build a ladder family (``None`` for other families).
    """

    channels: tuple[Channel, ...]
    dims: tuple[int, ...] = (3,)
    gamma: float = 1.0
    alpha: float | None = None
    beta: float | None = None
    kind: str = "ladder"

    def __post_init__(self):
        D = int(np.prod(self.dims))
        for ch in self.channels:
            if ch.operator.shape != (D, D):
                raise ValueError(f"channel {ch.label!r} has shape {ch.operator.shape}, register needs {(D, D)}")
            if not 0 <= ch.site < len(self.dims):
                raise ValueError(f"channel {ch.label!r} site {ch.site} outside register")

    def __len__(self):
        return len(self.channels)

    def __iter__(self):
        return iter(self.channels)

    @property
    def operators(self) -> list[np.ndarray]:
        return [ch.operator for ch in self.channels]

    @property
    def labels(self) -> list[str]:
        return [ch.label for ch in self.channels]

    @property
    def sites(self) -> list[int]:
        return [ch.site for ch in self.channels]

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def decay_operator(self) -> np.ndarray:
        """``sum_k Pi_k^dag Pi_k``."""
        D = int(np.prod(self.dims))
        out = np.zeros((D, D), dtype=complex)
        for op in self.operators:
            out += op.conj().T @ op
        return out

    def effective_hamiltonian(self) -> np.ndarray:
        """No-detection generator ``-1/2 sum_k Pi_k^dag Pi_k``."""
        return -0.5 * self.decay_operator()

    def __add__(self, other: "ChannelSet") -> "ChannelSet":
        if self.dims != other.dims:
            raise ValueError("cannot merge channel sets on different registers")
        return replace(self, channels=self.channels + other.channels)


def _positive(name, value):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


def ladder_indistinguishable(gamma: float = 1.0, beta: float = 1.0) -> ChannelSet:
    """Single detector for the cascade ``|2> -> |1> -> |0>``.

    ``Pi = sqrt(gamma) (sqrt(beta) |1><2| + |0><1|)``; ``beta = 1`` is the
    balanced ladder on which the jump code works.
    """
    _positive("gamma", gamma)
    _positive("beta", beta)
    op = np.sqrt(gamma) * (np.sqrt(beta) * ketbra(1, 2) + ketbra(0, 1))
    return ChannelSet((Channel("Pi", op, 0),), (3,), gamma, alpha=0.5, beta=beta, kind="ladder")


def ladder_split(gamma: float = 1.0, alpha: float = 0.5, beta: float = 1.0) -> ChannelSet:
    """Two detectors with partial which-transition information.

    ``alpha = 1/2`` is the indistinguishable ladder, ``alpha`` in ``{0, 1}``
    separates the two transitions completely.  ``beta`` rescales the upper
    transition in both detectors.
    """
    _positive("gamma", gamma)
    _positive("beta", beta)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    g = np.sqrt(gamma)
    p2 = g * (np.sqrt(alpha * beta) * ketbra(1, 2) + np.sqrt(1 - alpha) * ketbra(0, 1))
    p1 = g * (np.sqrt((1 - alpha) * beta) * ketbra(1, 2) + np.sqrt(alpha) * ketbra(0, 1))
    return ChannelSet((Channel("Pi1", p1, 0), Channel("Pi2", p2, 0)), (3,), gamma,
                      alpha=alpha, beta=beta, kind="ladder")


_STRUCTURES = {
    "E": ((0, 1), (1, 2)),
    "V": ((0, 1), (0, 2)),
    "L": ((0, 2), (1, 2)),
}


def structure_kind(kind: str) -> str:
    k = kind.strip()
    if k in ("Lambda", "lambda", "Λ", "L"):
        return "L"
    if k.upper() in ("E", "V"):
        return k.upper()
    raise ValueError(f"unknown level structure {kind!r}; expected E, V or Lambda")


def structure_ops(kind: str, gamma1: float = 1.0, gamma2: float = 1.0) -> ChannelSet:
    """Distinguishable two-channel decay for the E (cascade), V and Lambda structures."""
    k = structure_kind(kind)
    _positive("gamma1", gamma1)
    _positive("gamma2", gamma2)
    (i1, j1), (i2, j2) = _STRUCTURES[k]
    name = {"E": "E", "V": "V", "L": "Lambda"}[k]
    chans = (
        Channel(f"{name}1", np.sqrt(gamma1) * ketbra(i1, j1), 0),
        Channel(f"{name}2", np.sqrt(gamma2) * ketbra(i2, j2), 0),
    )
    return ChannelSet(chans, (3,), gamma1, kind=name)


def embed(cs: ChannelSet, site: int, n_sites: int) -> ChannelSet:
    """Place single-qutrit channels at ``site`` of an ``n_sites`` register."""
    if len(cs.dims) != 1:
        raise ValueError("embed expects a single-site channel set")
    if not 0 <= site < n_sites:
        raise ValueError(f"site {site} out of range for {n_sites} sites")
    d = cs.dims[0]
    eye = np.eye(d, dtype=complex)
    chans = []
    for ch in cs.channels:
        factors = [eye] * n_sites
        factors[site] = ch.operator
        chans.append(Channel(f"{ch.label}@{site}", tensor_product(*factors), site))
    return replace(cs, channels=tuple(chans), dims=(d,) * n_sites)


def local_channels(cs: ChannelSet, n_sites: int) -> ChannelSet:
    """Independent copies of a single-site family on every site."""
    out = embed(cs, 0, n_sites)
    for s in range(1, n_sites):
        out = out + embed(cs, s, n_sites)
    return out
