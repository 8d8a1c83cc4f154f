"""Closed-form bounds on the critical infection rates.

All quantities are deterministic functions of the weight law and the tree
degree: an upper bound on the extinction critical value lambda_c (from the
branching comparison), a lower bound on the exponential-decay critical
value lambda_e (which also lower-bounds lambda_c), the exponential decay
envelope for the survival probability, and the certified bracket for
N * lambda_c whose endpoints pinch to 1/(mean weight) as N grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .weights import WeightDistribution, expected_infection_ratio

__all__ = [
    "BoundsReport",
    "lambda_c_upper_bound",
    "lambda_e_lower_bound",
    "decay_envelope",
    "envelope_rate",
    "limit_bracket",
    "bounds_report",
]

_INFINITE_SLACK = 1e-12


class UndefinedBoundError(ValueError):
    """A bound that needs a positive mean weight was asked of a zero-mean law."""


@dataclass(frozen=True)
class BoundsReport:
    lambda_c_upper: float
    lambda_e_lower: float
    envelope_coefficient: float
    bracket: tuple[float, float]
    n: int


def lambda_c_upper_bound(dist: WeightDistribution, n: int, tol: float = 1e-12) -> float:
    """Least rate at which the branching comparison certifies survival.

    Returns inf{lam : N * E[lam*w/(1+lam*w)] > 1}, by bisection on the
    continuous nondecreasing criterion; the critical value lambda_c(N) is
    at most this.  When N * P(w > 0) <= 1 the criterion never exceeds 1
    and the answer is infinity (the process dies out at every rate).
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if n * dist.p_positive <= 1.0 + _INFINITE_SLACK:
        return math.inf

    def crit(lam: float) -> float:
        return n * expected_infection_ratio(dist, lam)

    hi = 1.0
    while crit(hi) <= 1.0:
        hi *= 2.0
        if hi > 1e18:
            return math.inf
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if crit(mid) > 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def lambda_e_lower_bound(dist: WeightDistribution, n: int) -> float:
    """(N*E[w] + M^2/E[w])^{-1}: below this rate the survival probability
    decays exponentially in time, so both critical values are above it."""
    if dist.mean <= 0:
        raise UndefinedBoundError("the lower bound needs a positive mean weight")
    return 1.0 / (n * dist.mean + dist.bound**2 / dist.mean)


def envelope_rate(dist: WeightDistribution, n: int, lam: float) -> float:
    """Exponent coefficient of the decay envelope: lam/(lower bound) - 1."""
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    return lam / lambda_e_lower_bound(dist, n) - 1.0


def decay_envelope(dist: WeightDistribution, n: int, lam: float, t: float) -> float:
    """Upper bound exp{t * [lam*(N*E[w] + M^2/E[w]) - 1]} on the survival
    probability from the root at time t, valid on the infinite tree and a
    fortiori on any absorbing truncation (which has fewer infection paths).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return math.exp(t * envelope_rate(dist, n, lam))


def limit_bracket(dist: WeightDistribution, n: int, tol: float = 1e-12) -> tuple[float, float]:
    """Certified interval for N * lambda_c(N); both ends tend to 1/E[w]."""
    upper = lambda_c_upper_bound(dist, n, tol)
    if not math.isfinite(upper):
        raise UndefinedBoundError(f"no finite upper bound at n={n} (n*q <= 1)")
    return (n * lambda_e_lower_bound(dist, n), n * upper)


def bounds_report(dist: WeightDistribution, n: int, lam: float = 0.0, tol: float = 1e-12) -> BoundsReport:
    upper = lambda_c_upper_bound(dist, n, tol)
    lower = lambda_e_lower_bound(dist, n)
    bracket = (n * lower, n * upper)
    return BoundsReport(
        lambda_c_upper=upper,
        lambda_e_lower=lower,
        envelope_coefficient=envelope_rate(dist, n, lam),
        bracket=bracket,
        n=n,
    )
