"""Log-space hypergeometric and beta-binomial distributions.

All probability masses are assembled in log space from ``math.lgamma``
and exponentiated at the last moment; cumulative sums go through
``math.fsum`` and are clamped to [0, 1].  Plan selection is sensitive to
the numeric route near a risk limit, so the route is fixed here once and
cross-checked against the exact rational path in :mod:`.exact`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import DomainError

__all__ = [
    "HypergeomParams",
    "BetaBinomParams",
    "log_binomial",
    "log_beta",
    "hypergeometric_pmf",
    "hypergeometric_cdf",
    "beta_binomial_pmf",
    "beta_binomial_log_pmf",
    "beta_binomial_cdf",
]


def log_binomial(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k)."""
    if n < 0 or k < 0:
        raise DomainError(f"log_binomial needs nonnegative arguments, got ({n}, {k})")
    if k > n:
        raise DomainError(f"log_binomial needs k <= n, got ({n}, {k})")
    if k == 0 or k == n:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _clamp_probability(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


@dataclass(frozen=True)
class HypergeomParams:
    """Sampling without replacement: lot of ``lot_size`` items with
    ``nonconforming`` bad ones, a random sample of ``sample_size``."""

    lot_size: int
    nonconforming: int
    sample_size: int

    def __post_init__(self) -> None:
        if self.lot_size < 0:
            raise DomainError("lot size must be nonnegative")
        if not 0 <= self.nonconforming <= self.lot_size:
            raise DomainError(
                f"nonconforming count {self.nonconforming} outside 0..{self.lot_size}"
            )
        if not 0 <= self.sample_size <= self.lot_size:
            raise DomainError(
                f"sample size {self.sample_size} outside 0..{self.lot_size}"
            )

    def support(self) -> range:
        low = max(0, self.sample_size - (self.lot_size - self.nonconforming))
        high = min(self.sample_size, self.nonconforming)
        return range(low, high + 1)


def hypergeometric_log_pmf(params: HypergeomParams, observed: int) -> float:
    """Log pmf; ``-inf`` outside the support."""
    if observed not in params.support():
        return -math.inf
    return (
        log_binomial(params.nonconforming, observed)
        + log_binomial(params.lot_size - params.nonconforming, params.sample_size - observed)
        - log_binomial(params.lot_size, params.sample_size)
    )


def hypergeometric_pmf(params: HypergeomParams, observed: int) -> float:
    lp = hypergeometric_log_pmf(params, observed)
    return 0.0 if lp == -math.inf else math.exp(lp)


def hypergeometric_cdf(params: HypergeomParams, observed: int) -> float:
    """P(Y <= observed), clamped to [0, 1]."""
    support = params.support()
    if observed < support.start:
        return 0.0
    if observed >= support.stop - 1:
        return 1.0
    terms = [hypergeometric_pmf(params, y) for y in range(support.start, observed + 1)]
    return _clamp_probability(math.fsum(terms))


@dataclass(frozen=True)
class BetaBinomParams:
    """Beta-binomial over {0..trials} with shape parameters alpha, beta."""

    trials: int
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.trials < 0:
            raise DomainError("trials must be nonnegative")
        if not self.alpha > 0 or not self.beta > 0:
            raise DomainError("alpha and beta must be positive")


def beta_binomial_log_pmf(params: BetaBinomParams, k: int) -> float:
    if k < 0 or k > params.trials:
        raise DomainError(f"count {k} outside 0..{params.trials}")
    return (
        log_binomial(params.trials, k)
        + log_beta(params.alpha + k, params.beta + params.trials - k)
        - log_beta(params.alpha, params.beta)
    )


def beta_binomial_pmf(params: BetaBinomParams, k: int) -> float:
    return math.exp(beta_binomial_log_pmf(params, k))


def beta_binomial_cdf(params: BetaBinomParams, k: int) -> float:
    """P(K <= k) by direct summation, clamped to [0, 1]."""
    if k < 0:
        return 0.0
    if k >= params.trials:
        return 1.0
    terms = [beta_binomial_pmf(params, j) for j in range(k + 1)]
    return _clamp_probability(math.fsum(terms))
