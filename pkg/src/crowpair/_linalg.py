"""Batched tridiagonal solves for the ring-chain matrices."""

from __future__ import annotations

import numpy as np


def solve_tridiagonal(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Solve a batch of tridiagonal systems with the Thomas algorithm.

    Parameters
    ----------
    lower, upper : ndarray, shape (B, N-1) or broadcastable
        Sub- and super-diagonals.
    diag : ndarray, shape (B, N)
    rhs : ndarray, shape (B, N)

    Notes
    -----
    No pivoting. The chain matrices have a positive-definite Hermitian part
    (every ring is damped), so the elimination never meets a zero pivot.
    """
    diag = np.asarray(diag, dtype=complex)
    b, n = diag.shape
    lower = np.broadcast_to(np.asarray(lower, dtype=complex), (b, max(n - 1, 0)))
    upper = np.broadcast_to(np.asarray(upper, dtype=complex), (b, max(n - 1, 0)))
    rhs = np.broadcast_to(np.asarray(rhs, dtype=complex), (b, n))

    cp = np.empty((b, max(n - 1, 0)), dtype=complex)
    dp = np.empty((b, n), dtype=complex)
    den = diag[:, 0]
    if n > 1:
        cp[:, 0] = upper[:, 0] / den
    dp[:, 0] = rhs[:, 0] / den
    for i in range(1, n):
        den = diag[:, i] - lower[:, i - 1] * cp[:, i - 1]
        if i < n - 1:
            cp[:, i] = upper[:, i] / den
        dp[:, i] = (rhs[:, i] - lower[:, i - 1] * dp[:, i - 1]) / den

    x = np.empty_like(dp)
    x[:, -1] = dp[:, -1]
    for i in range(n - 2, -1, -1):
        x[:, i] = dp[:, i] - cp[:, i] * x[:, i + 1]
    return x


def unit_rhs(batch: int, n: int, index: int) -> np.ndarray:
    e = np.zeros((batch, n), dtype=complex)
    e[:, index] = 1.0
    return e
