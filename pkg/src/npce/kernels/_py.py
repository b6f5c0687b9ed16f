"""NumPy fallback for the solver kernels.

Kept numerically interchangeable with the compiled core: the chain
simulator consumes the same pre-drawn uniforms with the same comparison
logic, so occupancy counts are bit-identical across backends.
"""

from __future__ import annotations

import numpy as np


def transition(P: np.ndarray, p: np.ndarray, rates: np.ndarray | None) -> np.ndarray:
    """One step of the challenge-and-contest process applied to p."""
    n = P.shape[0]
    if rates is None:
        return (P @ p + P.sum(axis=1) * p) / n
    stay = (rates * P).sum(axis=1) + (1.0 - rates.sum(axis=1))
    return p * stay + (P * rates.T) @ p


def solve_stationary(
    P: np.ndarray, rates: np.ndarray | None, tol: float, max_iters: int
) -> tuple[np.ndarray, int, float]:
    """Averaged fixed-point iteration from the uniform distribution.

    Returns (p, iterations, residual) where residual is the max-norm of
    p - T(p) for the returned iterate.
    """
    n = P.shape[0]
    p = np.full(n, 1.0 / n)
    resid = np.inf
    for it in range(1, max_iters + 1):
        tp = transition(P, p, rates)
        resid = float(np.max(np.abs(p - tp)))
        if resid <= tol:
            return p, it, resid
        p = 0.5 * (p + tp)
        np.maximum(p, 0.0, out=p)
        p /= p.sum()
    return p, max_iters, resid


def chain_counts(
    P: np.ndarray,
    rates: np.ndarray | None,
    u_init: np.ndarray,
    u_chal: np.ndarray,
    u_win: np.ndarray,
    burn_in: int,
) -> np.ndarray:
    """Simulate replicated chains; return per-replication occupancy counts.

    u_init selects starting states, u_chal[t] the challenger, u_win[t] the
    contest outcome.  Steps before burn_in are not counted.
    """
    n = P.shape[0]
    total_steps, reps = u_chal.shape
    state = np.minimum((u_init * n).astype(np.int64), n - 1)
    counts = np.zeros((reps, n), dtype=np.int64)
    rows = np.arange(reps)
    cum = None if rates is None else np.cumsum(rates, axis=1)
    for t in range(total_steps):
        if rates is None:
            q = np.minimum((u_chal[t] * n).astype(np.int64), n - 1)
            challenged = q != state
        else:
            c = cum[state]
            hit = u_chal[t][:, None] < c
            q = hit.argmax(axis=1)
            challenged = hit.any(axis=1) & (q != state)
        win = u_win[t] < P[q, state]
        state = np.where(challenged & win, q, state)
        if t >= burn_in:
            counts[rows, state] += 1
    return counts
