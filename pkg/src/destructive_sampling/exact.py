"""Exact big-rational twins of the floating-point distribution code.

Everything here returns :class:`fractions.Fraction` and is exact for
rational inputs.  It is slow and meant for desk-scale parameters only:
tests use it as an independent oracle, and the risk code calls it to
decide whether a risk sits *exactly* on a limit (a boundary tie).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exceptions import DomainError, SizeLimitError

# Exact evaluation is O(trials * threshold) Fraction operations; beyond this
# the oracle is no longer "desk scale" and callers should stay in floats.
EXACT_TRIALS_LIMIT = 5000


def binomial_exact(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise DomainError(f"binomial coefficient needs nonnegative arguments, got ({n}, {k})")
    if k > n:
        raise DomainError(f"binomial coefficient needs k <= n, got ({n}, {k})")
    return math.comb(n, k)


def hypergeometric_pmf_exact(lot_size: int, nonconforming: int, sample_size: int, observed: int) -> Fraction:
    """P(Y = observed) for draws without replacement, as an exact rational."""
    if not 0 <= nonconforming <= lot_size:
        raise DomainError("nonconforming count must lie in [0, lot_size]")
    if not 0 <= sample_size <= lot_size:
        raise DomainError("sample size must lie in [0, lot_size]")
    low = max(0, sample_size - (lot_size - nonconforming))
    high = min(sample_size, nonconforming)
    if observed < low or observed > high:
        return Fraction(0)
    return Fraction(
        binomial_exact(nonconforming, observed)
        * binomial_exact(lot_size - nonconforming, sample_size - observed),
        binomial_exact(lot_size, sample_size),
    )


def _beta_ratio(a: Fraction, b: Fraction, k: int, trials: int) -> Fraction:
    # B(a+k, b+trials-k) / B(a, b) as a product of rising factorials.
    num = Fraction(1)
    for i in range(k):
        num *= a + i
    for j in range(trials - k):
        num *= b + j
    den = Fraction(1)
    for t in range(trials):
        den *= a + b + t
    return num / den


def beta_binomial_pmf_exact(trials: int, a: Fraction, b: Fraction, k: int) -> Fraction:
    if trials < 0:
        raise DomainError("trials must be nonnegative")
    if trials > EXACT_TRIALS_LIMIT:
        raise SizeLimitError(f"exact path limited to {EXACT_TRIALS_LIMIT} trials, got {trials}")
    if a <= 0 or b <= 0:
        raise DomainError("shape parameters must be positive")
    if k < 0 or k > trials:
        raise DomainError(f"count {k} outside 0..{trials}")
    return binomial_exact(trials, k) * _beta_ratio(Fraction(a), Fraction(b), k, trials)


def beta_binomial_cdf_exact(trials: int, a: Fraction, b: Fraction, k: int) -> Fraction:
    if k < 0:
        return Fraction(0)
    k = min(k, trials)
    return sum(
        (beta_binomial_pmf_exact(trials, a, b, j) for j in range(k + 1)),
        start=Fraction(0),
    )


def specific_consumer_risk_exact(
    lot_size: int,
    sample_size: int,
    observed: int,
    lq: Fraction,
    a: Fraction,
    b: Fraction,
) -> Fraction:
    """Posterior probability of an unsatisfactory remaining lot, exactly.

    Mirrors the float path: the posterior of the remaining nonconforming
    count is Beta-binomial(lot_size - sample_size, a + observed,
    b + sample_size - observed), and an empty remaining lot has risk 0.
    """
    if not 0 <= sample_size <= lot_size:
        raise DomainError("sample size must lie in [0, lot_size]")
    if not 0 <= observed <= sample_size:
        raise DomainError("observed count must lie in [0, sample_size]")
    remaining = lot_size - sample_size
    if remaining == 0:
        return Fraction(0)
    p, q = lq.numerator, lq.denominator
    threshold = (p * remaining + q - 1) // q
    post_a = Fraction(a) + observed
    post_b = Fraction(b) + (sample_size - observed)
    return 1 - beta_binomial_cdf_exact(remaining, post_a, post_b, threshold - 1)
