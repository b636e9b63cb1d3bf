"""Batched operator application built from elementwise multiply-adds.

Each output element accumulates its terms in a fixed order that does not
depend on how many trajectories are stacked together, which keeps ensemble
results bit-identical across batch sizes and worker counts.
"""
from __future__ import annotations

import numpy as np


class SparseOp:
    """Constant operator stored as its nonzero entries."""

    def __init__(self, m: np.ndarray, tol: float = 0.0):
        m = np.asarray(m, dtype=complex)
        self.matrix = m
        rows, cols = np.nonzero(np.abs(m) > tol)
        self.entries = [(int(i), int(j), complex(m[i, j])) for i, j in zip(rows, cols)]

    def ket(self, psi: np.ndarray) -> np.ndarray:
        """``M psi`` for ``psi`` of shape ``(n, D)``."""
        out = np.zeros_like(psi)
        for i, j, v in self.entries:
            out[:, i] += v * psi[:, j]
        return out

    def left(self, rho: np.ndarray) -> np.ndarray:
        """``M rho`` for ``rho`` of shape ``(n, D, D)``."""
        out = np.zeros_like(rho)
        for i, j, v in self.entries:
            out[:, i, :] += v * rho[:, j, :]
        return out

    def right_dag(self, rho: np.ndarray) -> np.ndarray:
        """``rho M^dag``."""
        out = np.zeros_like(rho)
        for i, j, v in self.entries:
            out[:, :, i] += v.conjugate() * rho[:, :, j]
        return out

    def sandwich(self, rho: np.ndarray) -> np.ndarray:
        """``M rho M^dag``."""
        return self.right_dag(self.left(rho))

    def trace_with(self, rho: np.ndarray) -> np.ndarray:
        """``tr(M rho)`` per trajectory (real part)."""
        out = np.zeros(rho.shape[0])
        for i, j, v in self.entries:
            out += (v * rho[:, j, i]).real
        return out


def sum_last(x: np.ndarray) -> np.ndarray:
    out = x[..., 0].copy()
    for k in range(1, x.shape[-1]):
        out += x[..., k]
    return out


def norm_sq(psi: np.ndarray) -> np.ndarray:
    return sum_last(psi.real ** 2 + psi.imag ** 2)


def real_trace(rho: np.ndarray) -> np.ndarray:
    out = rho[:, 0, 0].real.copy()
    for k in range(1, rho.shape[-1]):
        out += rho[:, k, k].real
    return out


def local_unitaries(evals: np.ndarray, evecs: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """``V diag(exp(-i w x)) V^dag`` for each ``x`` in ``angles``; shape ``(n, d, d)``."""
    d = evals.size
    out = np.zeros((angles.size, d, d), dtype=complex)
    for k in range(d):
        proj = np.outer(evecs[:, k], evecs[:, k].conj())
        out += np.exp(-1j * evals[k] * angles)[:, None, None] * proj[None]
    return out


def _split(dims, site):
    a = int(np.prod(dims[:site], dtype=int))
    b = int(np.prod(dims[site + 1:], dtype=int))
    return a, dims[site], b


def apply_local_ket(U: np.ndarray, psi: np.ndarray, dims, site: int) -> np.ndarray:
    """Apply per-trajectory ``U[n]`` (shape ``(n, d, d)``) to ``site`` of kets ``(n, D)``."""
    n = psi.shape[0]
    a, d, b = _split(dims, site)
    x = psi.reshape(n, a, d, b)
    out = np.zeros_like(x)
    for i in range(d):
        for m in range(d):
            out[:, :, i, :] += U[:, i, m][:, None, None] * x[:, :, m, :]
    return out.reshape(psi.shape)


def apply_local_dm(U: np.ndarray, rho: np.ndarray, dims, site: int) -> np.ndarray:
    """``U rho U^dag`` with per-trajectory ``U`` acting on one site."""
    n, D, _ = rho.shape
    a, d, b = _split(dims, site)
    x = rho.reshape(n, a, d, b, D)
    y = np.zeros_like(x)
    for i in range(d):
        for m in range(d):
            y[:, :, i] += U[:, i, m][:, None, None, None] * x[:, :, m]
    y = y.reshape(n, D, a, d, b)
    z = np.zeros_like(y)
    Uc = U.conj()
    for i in range(d):
        for m in range(d):
            z[..., i, :] += Uc[:, i, m][:, None, None, None] * y[..., m, :]
    return z.reshape(rho.shape)


def embed_local(op: np.ndarray, dims, site: int) -> np.ndarray:
    a, _, b = _split(dims, site)
    return np.kron(np.kron(np.eye(a), op), np.eye(b))
