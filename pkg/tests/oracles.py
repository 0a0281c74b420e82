"""Independent oracles used by the test suite only.

These deliberately avoid the production code paths they check: a second
root finder (Aberth-Ehrlich), a generic Routh table, congruence products
by plain matrix multiplication, and eigendecomposition propagation of
the linear system.
"""

from __future__ import annotations

import numpy as np


def aberth_roots(asc: np.ndarray, tol: float = 1e-14, max_iter: int = 200) -> np.ndarray:
    """All roots of a polynomial (ascending coefficients) by simultaneous
    Aberth-Ehrlich iteration started on a Cauchy-bound circle."""
    desc = np.asarray(asc, dtype=complex)[::-1]
    desc = desc / desc[0]
    n = desc.size - 1
    deriv = np.polyder(desc)
    radius = 1.0 + np.max(np.abs(desc[1:]))
    angles = 2 * np.pi * (np.arange(n) + 0.25) / n
    z = radius * np.exp(1j * angles)
    for _ in range(max_iter):
        pv = np.polyval(desc, z)
        dv = np.polyval(deriv, z)
        ratio = np.where(np.abs(dv) > 0, pv / np.where(np.abs(dv) > 0, dv, 1), 0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        corr = ratio / (1 - ratio * np.sum(1.0 / diff, axis=1))
        z = z - corr
        if np.max(np.abs(corr)) < tol * max(1.0, np.max(np.abs(z))):
            break
    return z


def routh_first_column(asc) -> np.ndarray:
    """First column of the classical Routh table (descending reduction)."""
    desc = np.asarray(asc, dtype=float)[::-1]
    n = desc.size - 1
    row0 = np.array(desc[0::2], dtype=float)
    row1 = np.array(desc[1::2], dtype=float)
    if row1.size < row0.size:
        row1 = np.append(row1, 0.0)
    col = [row0[0], row1[0]]
    for _ in range(n - 1):
        new = np.zeros_like(row0)
        for j in range(row0.size - 1):
            new[j] = (row1[0] * row0[j + 1] - row0[0] * row1[j + 1]) / row1[0]
        col.append(new[0])
        row0, row1 = row1, new
    return np.array(col[: n + 1])


def congruence(transform: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Plain-product congruence Tᵀ M T."""
    return transform.T @ mat @ transform


def propagate_linear(system: np.ndarray, y0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Exact evolution of ẏ = J y via eigendecomposition; shape (len(t), n)."""
    vals, vecs = np.linalg.eig(system)
    c = np.linalg.solve(vecs, y0.astype(complex))
    out = (vecs @ (np.exp(np.outer(vals, times)) * c[:, None])).T
    return out.real


def central_difference_jacobian(fn, x0: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of fn at x0."""
    x0 = np.asarray(x0, dtype=float)
    f0 = np.asarray(fn(x0))
    jac = np.zeros((f0.size, x0.size))
    for j in range(x0.size):
        hi, lo = x0.copy(), x0.copy()
        hi[j] += step
        lo[j] -= step
        jac[:, j] = (np.asarray(fn(hi)) - np.asarray(fn(lo))) / (2 * step)
    return jac
