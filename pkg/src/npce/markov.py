"""Limiting distribution of the challenge-and-contest Markov process.

The chain's states are the options; each turn the incumbent option may be
challenged and the winner of the pairwise contest becomes the new
incumbent.  The stationary distribution of this process is the forecast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .coalitions import VictoryMatrix
from .model import DomainError

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITERS = 10_000


def _as_probabilities(P) -> np.ndarray:
    if isinstance(P, VictoryMatrix):
        return P.probabilities
    return np.asarray(P, dtype=float)


def check_distribution(p: np.ndarray, tol: float = 1e-9) -> None:
    if np.any(p < -tol):
        raise DomainError("distribution has negative components")
    if abs(float(p.sum()) - 1.0) > tol:
        raise DomainError(f"distribution sums to {p.sum()}, not 1")


def check_challenge_rates(rates: np.ndarray, n: int) -> None:
    """rates[i, j] is the probability that option j challenges incumbent i."""
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (n, n):
        raise DomainError(f"challenge matrix must be {n}x{n}")
    if np.any(rates < 0):
        raise DomainError("challenge rates must be nonnegative")
    off = rates.sum(axis=1) - np.diag(rates)
    if np.any(off > 1 + 1e-12):
        raise DomainError("challenge rates against an incumbent must sum to at most 1")


@dataclass(frozen=True)
class SolveDiagnostics:
    iterations: int
    final_residual: float
    converged: bool


def transition_step(P, p: np.ndarray, rates: np.ndarray | None = None) -> np.ndarray:
    """One turn of the process; preserves total probability and nonnegativity."""
    P = _as_probabilities(P)
    p = np.asarray(p, dtype=float)
    if p.shape != (P.shape[0],):
        raise DomainError("distribution length must match the victory matrix")
    if rates is not None:
        rates = np.asarray(rates, dtype=float)
        check_challenge_rates(rates, P.shape[0])
    return np.asarray(kernels.transition(P, p, rates))


def limiting_distribution(
    P,
    rates: np.ndarray | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> tuple[np.ndarray, SolveDiagnostics]:
    """Solve p = T(p) by averaged fixed-point iteration from uniform.

    Each iterate is renormalized to unit sum so floating-point drift cannot
    accumulate.  Non-convergence is reported in the diagnostics, never
    silently accepted.
    """
    if tolerance <= 0:
        raise DomainError("tolerance must be positive")
    P = _as_probabilities(P)
    if rates is not None:
        rates = np.asarray(rates, dtype=float)
        check_challenge_rates(rates, P.shape[0])
    p, iters, resid = kernels.solve_stationary(P, rates, tolerance, max_iters)
    return np.asarray(p), SolveDiagnostics(iters, float(resid), resid <= tolerance)


def two_option_closed_form(c12: float, c21: float) -> np.ndarray:
    """Stationary distribution of a two-option contest: strengths normalized."""
    if c12 < 0 or c21 < 0:
        raise DomainError("coalition strengths must be nonnegative")
    total = c12 + c21
    if total == 0:
        raise DomainError("both strengths zero; apply the epsilon floor upstream")
    return np.array([c12 / total, c21 / total])


@dataclass(frozen=True)
class MonteCarloResult:
    """Empirical occupancy from replicated chain simulations."""

    distribution: np.ndarray  # pooled over replications
    per_replication: np.ndarray  # (replications, n) occupancy fractions
    steps: int
    replications: int
    seed: int

    @property
    def standard_errors(self) -> np.ndarray:
        """Per-component standard error of the pooled estimate.

        Replications are independent, so the spread across them captures
        within-chain autocorrelation without modeling it.
        """
        return self.per_replication.std(axis=0, ddof=1) / np.sqrt(self.replications)


def monte_carlo_oracle(
    P,
    rates: np.ndarray | None = None,
    steps: int = 5000,
    replications: int = 100,
    seed: int = 0,
    burn_in: int = 200,
) -> MonteCarloResult:
    """Simulate the chain directly; an independent check on the solver.

    Deterministic given the seed.  Challengers are drawn from the challenge
    model (uniform when rates is None) and contest winners from P.
    """
    if steps < 1 or replications < 1:
        raise DomainError("steps and replications must be at least 1")
    P = _as_probabilities(P)
    n = P.shape[0]
    if rates is not None:
        rates = np.asarray(rates, dtype=float)
        check_challenge_rates(rates, n)
    rng = np.random.default_rng(seed)
    u_init = rng.random(replications)
    u_chal = rng.random((burn_in + steps, replications))
    u_win = rng.random((burn_in + steps, replications))
    counts = np.asarray(kernels.chain_counts(P, rates, u_init, u_chal, u_win, burn_in))
    per_rep = counts / steps
    pooled = counts.sum(axis=0) / (steps * replications)
    return MonteCarloResult(pooled, per_rep, steps, replications, seed)
