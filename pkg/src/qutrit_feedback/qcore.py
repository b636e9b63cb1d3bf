"""Dense linear algebra and entanglement measures for small registers.

States and operators are plain numpy arrays.  A register is described by
its tuple of local dimensions ``dims``; composite basis states are ordered
row-major, so for two qutrits ``|i>|j>`` lives at index ``3*i + j``.

Most functions accept stacks of matrices with shape ``(..., D, D)`` so that
whole trajectory ensembles can be analysed in one call.
"""
from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

EPS_ZERO = 1e-10
HERMITIAN_TOL = 1e-10


def basis(level: int, d: int = 3) -> np.ndarray:
    """Computational basis ket ``|level>`` of a ``d``-level system."""
    if not 0 <= level < d:
        raise ValueError(f"level {level} outside 0..{d - 1}")
    v = np.zeros(d, dtype=complex)
    v[level] = 1.0
    return v


def product_ket(*levels: int, d: int = 3) -> np.ndarray:
    """Product basis ket, e.g. ``product_ket(1, 2)`` is ``|12>``."""
    return tensor_product(*(basis(k, d) for k in levels))


def normalize(psi: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm


def dm(psi: np.ndarray) -> np.ndarray:
    """Projector ``|psi><psi|`` (works on stacks of kets too)."""
    psi = np.asarray(psi, dtype=complex)
    return psi[..., :, None] * psi[..., None, :].conj()


def tensor_product(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of kets or operators in the register's basis order."""
    if not factors:
        raise ValueError("need at least one factor")
    arrs = [np.asarray(f, dtype=complex) for f in factors]
    kinds = {a.ndim for a in arrs}
    if len(kinds) != 1 or kinds.pop() not in (1, 2):
        raise ValueError("factors must all be kets or all be square operators")
    for a in arrs:
        if a.ndim == 2 and a.shape[0] != a.shape[1]:
            raise ValueError(f"operator factor is not square: {a.shape}")
    return reduce(np.kron, arrs)


def _site_tuple(sites, n: int) -> tuple[int, ...]:
    if isinstance(sites, (int, np.integer)):
        sites = (int(sites),)
    sites = tuple(sorted(set(int(s) for s in sites)))
    for s in sites:
        if not 0 <= s < n:
            raise ValueError(f"site index {s} out of range for {n} sites")
    return sites


def _check_square(rho: np.ndarray, dims: Sequence[int]) -> int:
    D = int(np.prod(dims))
    if rho.shape[-2:] != (D, D):
        raise ValueError(f"matrix shape {rho.shape[-2:]} does not match dims {tuple(dims)}")
    return D


def partial_transpose(rho: np.ndarray, dims: Sequence[int] = (3, 3), sites=1) -> np.ndarray:
    """Transpose the tensor factors listed in ``sites``.

    Applying the same partial transpose twice returns the input exactly.
    """
    rho = np.asarray(rho)
    dims = tuple(int(d) for d in dims)
    D = _check_square(rho, dims)
    n = len(dims)
    sites = _site_tuple(sites, n)
    lead = rho.shape[:-2]
    t = rho.reshape(lead + dims + dims)
    off = len(lead)
    axes = list(range(t.ndim))
    for s in sites:
        r, c = off + s, off + n + s
        axes[r], axes[c] = axes[c], axes[r]
    return t.transpose(axes).reshape(lead + (D, D))


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced state on the sites in ``keep`` (in increasing site order)."""
    rho = np.asarray(rho)
    dims = tuple(int(d) for d in dims)
    _check_square(rho, dims)
    n = len(dims)
    keep = _site_tuple(keep, n)
    if not keep:
        raise ValueError("keep must name at least one site")
    if len(keep) == n:
        return rho.copy()
    lead = rho.shape[:-2]
    t = rho.reshape(lead + dims + dims)
    off = len(lead)
    # trace out from the highest site down so remaining axis numbers stay valid
    m = n
    for s in reversed(range(n)):
        if s in keep:
            continue
        t = np.trace(t, axis1=off + s, axis2=off + m + s)
        m -= 1
    dk = int(np.prod([dims[s] for s in keep]))
    return t.reshape(lead + (dk, dk))


def hermiticity_error(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - np.swapaxes(a, -1, -2).conj()), initial=0.0))


def pt_spectrum(rho: np.ndarray, dims: Sequence[int] = (3, 3), sites=1) -> np.ndarray:
    """Ascending eigenvalues of the partial transpose (batched)."""
    pt = partial_transpose(rho, dims, sites)
    # PT of a Hermitian matrix is Hermitian; symmetrize away rounding noise
    pt = 0.5 * (pt + np.swapaxes(pt, -1, -2).conj())
    return np.linalg.eigvalsh(pt)


def pt_negative_spectrum(rho: np.ndarray, dims: Sequence[int] = (3, 3), sites=1,
                         eps: float = EPS_ZERO) -> np.ndarray:
    """Eigenvalues of the partial transpose below ``-eps``, ascending."""
    rho = np.asarray(rho)
    if rho.ndim != 2:
        raise ValueError("pt_negative_spectrum takes a single density matrix")
    ev = pt_spectrum(rho, dims, sites)
    return ev[ev < -eps]


def negativity(rho: np.ndarray, dims: Sequence[int] = (3, 3), sites=1,
               check: bool = True):
    """Trace-norm negativity ``||rho^T_B||_1 - 1``.

    With this convention a maximally entangled qutrit pair scores 2.  Accepts
    a stack of density matrices and then returns an array.
    """
    rho = np.asarray(rho)
    if check:
        err = hermiticity_error(rho)
        if err > HERMITIAN_TOL:
            raise ValueError(f"density matrix not Hermitian (error {err:.2e})")
    ev = pt_spectrum(rho, dims, sites)
    neg = -2.0 * np.where(ev < 0, ev, 0.0).sum(axis=-1)
    # trace drift of unnormalized input is not entanglement
    tr = np.trace(rho, axis1=-2, axis2=-1).real
    out = neg / tr
    return float(out) if np.ndim(out) == 0 else out


def matrix_exponential(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix exponential needs a square matrix, got {a.shape}")
    if not a.any():
        return np.eye(a.shape[0], dtype=complex)
    return scipy.linalg.expm(a)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.ndim == 1:
        if sigma.ndim == 1:
            return float(abs(np.vdot(rho, sigma)) ** 2)
        return float(np.vdot(rho, sigma @ rho).real)
    if sigma.ndim == 1:
        return float(np.vdot(sigma, rho @ sigma).real)
    s = scipy.linalg.sqrtm(rho)
    ev = np.linalg.eigvalsh(0.5 * (s @ sigma @ s + (s @ sigma @ s).conj().T))
    return float(np.sum(np.sqrt(np.clip(ev, 0, None))) ** 2)


def trace_norm(a: np.ndarray):
    """Sum of absolute eigenvalues of Hermitian matrices (batched)."""
    a = np.asarray(a)
    a = 0.5 * (a + np.swapaxes(a, -1, -2).conj())
    return np.abs(np.linalg.eigvalsh(a)).sum(axis=-1)


def lindbladian(ops: Iterable[np.ndarray], hamiltonian: np.ndarray | None = None) -> np.ndarray:
    """Superoperator matrix acting on row-major vectorized density matrices.

    ``vec(A rho B) = kron(A, B.T) vec(rho)`` with ``vec`` = ``rho.reshape(-1)``.
    """
    ops = [np.asarray(o, dtype=complex) for o in ops]
    if hamiltonian is None and not ops:
        raise ValueError("need a Hamiltonian or at least one collapse operator")
    D = (ops[0] if ops else hamiltonian).shape[0]
    eye = np.eye(D)
    sup = np.zeros((D * D, D * D), dtype=complex)
    if hamiltonian is not None:
        h = np.asarray(hamiltonian, dtype=complex)
        sup += -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for a in ops:
        ada = a.conj().T @ a
        sup += np.kron(a, a.conj()) - 0.5 * np.kron(ada, eye) - 0.5 * np.kron(eye, ada.T)
    return sup
