"""Jump-based recycling and diffusion-based stabilizer codes for one qutrit."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelSet, ketbra, ladder_indistinguishable
from .qcore import matrix_exponential

# magnitude of the feedback strength for the jump code: A has eigenvalues
# 0, +-i*sqrt(3) and e^{theta A} must rotate by 2*pi/3
JUMP_LAMBDA = 2 * np.pi / (3 * np.sqrt(3))

PROPORTIONALITY_TOL = 1e-10
UNITARITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """Codespace plus the feedback machinery that protects it.

    ``recycler`` and ``lambda_mag`` are set for the jump code; ``drive`` and
    ``stabilizer`` for the diffusion code.
    """

    kind: str
    channel: np.ndarray
    codespace_projector: np.ndarray
    feedback_generator: np.ndarray
    recycler: np.ndarray | None = None
    drive: np.ndarray | None = None
    stabilizer: np.ndarray | None = None
    lambda_mag: float | None = None
    gamma: float = 1.0

    @property
    def dim(self) -> int:
        return self.channel.shape[0]

    def feedback_unitary(self, scale: float = 1.0) -> np.ndarray:
        """``exp(-i * scale * F)``."""
        return matrix_exponential(-1j * scale * self.feedback_generator)

    def feedback_eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors of the Hermitian feedback generator."""
        F = self.feedback_generator
        return np.linalg.eigh(0.5 * (F + F.conj().T))


def jump_code(gamma: float = 1.0) -> CodeSpec:
    """Recycling code on ``{|1>, |2>}`` for the balanced ladder.

    A detected emission moves the codespace down one rung; the recycler
    ``R = |2><1| + |1><0| + |0><2|`` lifts it back.  The feedback generator
    ``F = lambda * A`` is fixed so that ``exp(-iF) = R``.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    pi = ladder_indistinguishable(gamma).operators[0]
    P = ketbra(1, 1) + ketbra(2, 2)
    R = pi.conj().T / np.sqrt(gamma) + ketbra(0, 2)
    A = (pi.conj().T - pi) / np.sqrt(gamma) + ketbra(0, 2) - ketbra(2, 0)
    for sign in (1, -1):
        F = sign * 1j * JUMP_LAMBDA * A
        if _phase_distance(matrix_exponential(-1j * F), R) < 1e-12:
            break
    else:  # pragma: no cover - guarded by tests on the closed form
        raise RuntimeError("no sign of lambda reproduces the recycler")
    return CodeSpec("jump", pi, P, F, recycler=R, lambda_mag=JUMP_LAMBDA, gamma=gamma)


def _phase_distance(U: np.ndarray, V: np.ndarray) -> float:
    """``min_phi ||U - e^{i phi} V||`` (Frobenius)."""
    ov = np.vdot(V, U)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(U - phase * V))


@dataclass
class RecyclabilityReport:
    ok: bool
    constants: tuple[complex, complex]
    residuals: tuple[float, float]
    unitarity_error: float
    messages: list[str] = field(default_factory=list)


def _best_multiple(target: np.ndarray, P: np.ndarray) -> tuple[complex, float]:
    c = np.vdot(P, target) / np.vdot(P, P).real
    return c, float(np.linalg.norm(target - c * P))


def verify_recyclability(Pi: np.ndarray, P_C: np.ndarray, R: np.ndarray) -> RecyclabilityReport:
    """Check ``Pi^dag Pi = c1 P_C`` and ``R Pi = c2 P_C`` with ``R`` unitary."""
    Pi, P_C, R = (np.asarray(m, dtype=complex) for m in (Pi, P_C, R))
    if not (Pi.shape == P_C.shape == R.shape and Pi.shape[0] == Pi.shape[1]):
        raise ValueError("operators must be square with matching shapes")
    c1, r1 = _best_multiple(Pi.conj().T @ Pi, P_C)
    c2, r2 = _best_multiple(R @ Pi, P_C)
    uerr = float(np.linalg.norm(R.conj().T @ R - np.eye(R.shape[0])))
    msgs = []
    if r1 >= PROPORTIONALITY_TOL:
        msgs.append(f"Pi^dag Pi is not proportional to P_C (residual {r1:.3e})")
    if r2 >= PROPORTIONALITY_TOL:
        msgs.append(f"R Pi is not proportional to P_C (residual {r2:.3e})")
    if uerr >= UNITARITY_TOL:
        msgs.append(f"R is not unitary (error {uerr:.3e})")
    return RecyclabilityReport(not msgs, (complex(c1), complex(c2)), (r1, r2), uerr, msgs)


def operator_decompose(Pi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split ``Pi = M + X + iY`` with ``M`` scalar and ``X``, ``Y`` Hermitian."""
    Pi = np.asarray(Pi, dtype=complex)
    if Pi.ndim != 2 or Pi.shape[0] != Pi.shape[1]:
        raise ValueError("operator must be square")
    d = Pi.shape[0]
    M = np.trace(Pi) / d * np.eye(d)
    T = Pi - M
    X = 0.5 * (T + T.conj().T)
    Y = (T - T.conj().T) / 2j
    return M, X, Y


def diffusion_code(gamma: float = 1.0) -> CodeSpec:
    """Homodyne feedback code on ``{|0>, |2>}``.

    The stabilizer ``S = diag(1, -1, 1)`` anticommutes with ``X`` so that
    ``F = Y - iXS`` is Hermitian and ``Pi - iF = X(1 - S)`` annihilates the
    codespace.  The constant drive ``H = -(Pi^dag F + F Pi)/2`` cancels the
    Hamiltonian part of the averaged feedback dynamics.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    pi = ladder_indistinguishable(gamma).operators[0]
    _, X, Y = operator_decompose(pi)
    S = np.diag([1.0, -1.0, 1.0]).astype(complex)
    F = Y - 1j * X @ S
    herm = np.max(np.abs(F - F.conj().T))
    if herm > UNITARITY_TOL:  # pragma: no cover - algebraic identity
        raise RuntimeError(f"feedback generator not Hermitian ({herm:.2e})")
    F = 0.5 * (F + F.conj().T)
    H = -0.5 * (pi.conj().T @ F + F @ pi)
    P = ketbra(0, 0) + ketbra(2, 2)
    return CodeSpec("diffusion", pi, P, F, drive=H, stabilizer=S, gamma=gamma)


@dataclass
class NoGoReport:
    admissible: list[np.ndarray]
    n_checked: int
    n_anticommuting: int
    lines: list[str]

    @property
    def obstruction_holds(self) -> bool:
        return not self.admissible


def qubit_no_go_check(gamma: float = 1.0, n_theta: int = 61, n_phi: int = 121) -> NoGoReport:
    """Scan stabilizers for a decaying qubit and show none protects a qubit.

    Candidates are ``S = +-1`` and ``S = n.sigma`` over a Bloch-sphere grid
    (every Hermitian involution on a qubit is one of these).  A usable ``S``
    must anticommute with ``X = sqrt(gamma)/2 sigma_x`` and have a
    two-dimensional +1 eigenspace.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0]).astype(complex)
    X = 0.5 * np.sqrt(gamma) * sx
    cands = [("+I", np.eye(2, dtype=complex)), ("-I", -np.eye(2, dtype=complex))]
    for th, ph in itertools.product(np.linspace(0, np.pi, n_theta), np.linspace(0, 2 * np.pi, n_phi, endpoint=False)):
        n = (np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th))
        cands.append((f"n=({n[0]:.3f},{n[1]:.3f},{n[2]:.3f})", n[0] * sx + n[1] * sy + n[2] * sz))
    admissible, n_anti = [], 0
    for _, S in cands:
        anti = np.linalg.norm(S @ X + X @ S) < 1e-12
        plus_dim = int(np.sum(np.linalg.eigvalsh(S) > 0.5))
        n_anti += anti
        if anti and plus_dim >= 2:
            admissible.append(S)
    lines = [
        f"checked {len(cands)} Hermitian involutions S on a qubit",
        "S = +I: [S, X] = 0 but SX + XS = 2X != 0",
        f"{n_anti} candidates anticommute with X; all have a one-dimensional +1 eigenspace",
        f"admissible stabilizers with a qubit codespace: {len(admissible)}",
    ]
    return NoGoReport(admissible, len(cands), n_anti, lines)


@dataclass
class CodespaceSearch:
    found: list[tuple[int, ...]]
    decoherence_free: list[tuple[int, ...]]
    message: str


def search_codespace(cs: ChannelSet, dim: int = 2) -> CodespaceSearch:
    """Search coordinate subspaces of one qutrit for a jump-correctable code.

    A subspace with projector ``P`` qualifies when ``P K_i^dag K_j P`` is a
    multiple of ``P`` for all error operators, the no-jump generator
    included.  Subspaces where every channel vanishes are reported as
    decoherence free instead.
    """
    if len(cs.dims) != 1:
        raise ValueError("codespace search works on a single-site channel set")
    d = cs.dims[0]
    errs = [cs.decay_operator()] + [a.conj().T @ b for a in cs.operators for b in cs.operators]
    found, dfs = [], []
    for levels in itertools.combinations(range(d), dim):
        P = np.zeros((d, d), dtype=complex)
        P[levels, levels] = 1.0
        if all(_best_multiple(P @ e @ P, P)[1] < PROPORTIONALITY_TOL for e in errs):
            if all(np.linalg.norm(op @ P) < PROPORTIONALITY_TOL for op in cs.operators):
                dfs.append(levels)
            else:
                found.append(levels)
    if found:
        msg = "correctable codespace(s): " + ", ".join(str(f) for f in found)
    elif dfs:
        msg = "no jump-correctable codespace; decoherence-free subspace(s): " + ", ".join(str(f) for f in dfs)
    elif len(cs.operators) > 1:
        msg = "no codespace: channels distinguishable"
    else:
        msg = "no codespace: Pi^dag Pi not proportional to a projector"
    return CodespaceSearch(found, dfs, msg)
