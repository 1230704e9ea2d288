"""Consumer's-risk functionals for whole and remaining lots.

The classical consumer's risk conditions on the quality of the *whole*
lot and is a plain hypergeometric CDF.  Destructive testing consumes the
sample, so the quantity that matters is the quality of the *remaining*
lot.  No hypergeometric CDF describes that frequentist risk, because the
conditioning event ``k_rem = k_whole - Y`` involves the random count Y
itself; :func:`frequentist_remaining_risk` therefore always raises.

The Bayesian route works: with a beta-binomial prior on the whole-lot
nonconforming count (uniform = Beta-binomial(N, 1, 1)), observing ``y``
bad items in a clean draw of ``n`` leaves the remaining-lot count
``k_rem`` distributed Beta-binomial(N - n, a + y, b + n - y).  The
specific consumer's risk is the posterior probability that ``k_rem``
reaches the unacceptable threshold ``ceil(LQ * (N - n))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NoReturn, Optional

from . import exact
from .distributions import (
    BetaBinomParams,
    HypergeomParams,
    beta_binomial_cdf,
    beta_binomial_log_pmf,
    hypergeometric_cdf,
    hypergeometric_log_pmf,
)
from .exceptions import DomainError, NotComputable, SizeLimitError

__all__ = [
    "LIMIT_SLACK",
    "TIE_TOLERANCE",
    "PriorSpec",
    "UNIFORM_PRIOR",
    "RiskQuery",
    "RiskResult",
    "parse_lq",
    "ceil_threshold",
    "frequentist_consumer_risk",
    "frequentist_remaining_risk",
    "posterior_remaining",
    "brute_force_posterior",
    "specific_consumer_risk",
    "max_risk_over_acceptable_outcomes",
    "within_limit",
]

# A plan is accepted when risk <= limit + LIMIT_SLACK.  The slack absorbs
# float noise at exact ties (e.g. risk exactly 1/10); ties themselves are
# detected separately and flagged rather than silently resolved.
LIMIT_SLACK = 1e-9
TIE_TOLERANCE = 1e-9

BRUTE_FORCE_LIMIT = 5000


def parse_lq(text: str | Fraction) -> Fraction:
    """Parse a limiting quality as an exact rational in (0, 1].

    Accepts "2%", "1/50", "0.02" and Fractions; all equivalent spellings
    yield the identical Fraction, so downstream ceilings never depend on
    float parsing.
    """
    if isinstance(text, Fraction):
        value = text
    else:
        s = text.strip()
        try:
            if s.endswith("%"):
                value = Fraction(s[:-1].strip()) / 100
            else:
                value = Fraction(s)
        except (ValueError, ZeroDivisionError) as err:
            raise DomainError(f"cannot parse limiting quality from {text!r}") from err
    if not 0 < value <= 1:
        raise DomainError(f"limiting quality must lie in (0, 1], got {value}")
    return value


def ceil_threshold(lq: Fraction, size: int) -> int:
    """ceil(lq * size) in exact integer arithmetic.

    Floats never enter: ceil(0.02 * 50) must be 1, not 2.
    """
    if size < 0:
        raise DomainError("size must be nonnegative")
    lq = parse_lq(lq)
    p, q = lq.numerator, lq.denominator
    return (p * size + q - 1) // q


@dataclass(frozen=True)
class PriorSpec:
    """Beta-binomial hyperparameters; (1, 1) is the uniform reference prior."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self) -> None:
        if not self.a > 0 or not self.b > 0:
            raise DomainError(f"prior parameters must be positive, got ({self.a}, {self.b})")

    @staticmethod
    def parse(text: str) -> "PriorSpec":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise DomainError(f"prior must be given as 'a,b', got {text!r}")
        try:
            return PriorSpec(float(parts[0]), float(parts[1]))
        except ValueError as err:
            raise DomainError(f"prior must be given as 'a,b', got {text!r}") from err


UNIFORM_PRIOR = PriorSpec(1.0, 1.0)


@dataclass(frozen=True)
class RiskQuery:
    """One remaining-lot risk evaluation: lot of ``lot_size``, destructive
    sample of ``sample_size``, ``observed`` nonconforming items found."""

    lot_size: int
    sample_size: int
    observed: int
    lq: Fraction
    prior: PriorSpec = UNIFORM_PRIOR

    def __post_init__(self) -> None:
        if self.lot_size < 0:
            raise DomainError("lot size must be nonnegative")
        if not 0 <= self.sample_size <= self.lot_size:
            raise DomainError(
                f"sample size {self.sample_size} outside 0..{self.lot_size}"
            )
        if not 0 <= self.observed <= self.sample_size:
            raise DomainError(
                f"observed count {self.observed} outside 0..{self.sample_size}"
            )
        object.__setattr__(self, "lq", parse_lq(self.lq))

    @property
    def remaining_size(self) -> int:
        return self.lot_size - self.sample_size


@dataclass(frozen=True)
class RiskResult:
    risk: float
    threshold_c: int
    posterior_trials: int
    posterior_a: float
    posterior_b: float
    boundary_tie: bool = False
    observed: Optional[int] = None


def frequentist_consumer_risk(lot_size: int, sample_size: int, ac: int, lq: Fraction) -> float:
    """Acceptance probability when the whole lot is exactly at limiting
    quality: hypergeometric CDF at ac with ceil(LQ * N) nonconforming."""
    if ac < 0:
        raise DomainError("acceptance number must be nonnegative")
    lq = parse_lq(lq)
    k_limit = ceil_threshold(lq, lot_size)
    params = HypergeomParams(lot_size, k_limit, sample_size)
    return hypergeometric_cdf(params, ac)


def frequentist_remaining_risk(*_args, **_kwargs) -> NoReturn:
    """The frequentist remaining-lot risk has no value under this model.

    Conditioning on ``k_rem = ceil(LQ * (N - n))`` is conditioning on
    ``k_whole - Y``, an event that involves the random sample count Y, so
    the acceptance probability is not a hypergeometric CDF in any
    parametrisation and no combinatorial expression for it is known.
    Use the posterior-based specific consumer's risk instead.
    """
    raise NotComputable(
        "the consumer's risk about the remaining lot cannot be computed as a "
        "hypergeometric CDF: the conditioning event k_rem = k_whole - Y "
        "involves the random sample count Y itself; use the Bayesian "
        "specific consumer's risk instead"
    )


def posterior_remaining(query: RiskQuery) -> BetaBinomParams:
    """Closed-form posterior of the remaining-lot nonconforming count.

    The beta-binomial family is conjugate for hypergeometric sampling:
    Beta-binomial(N, a, b) prior + y of n observed nonconforming gives
    k_rem ~ Beta-binomial(N - n, a + y, b + n - y).
    """
    return BetaBinomParams(
        trials=query.remaining_size,
        alpha=query.prior.a + query.observed,
        beta=query.prior.b + (query.sample_size - query.observed),
    )


def brute_force_posterior(query: RiskQuery) -> list[float]:
    """Posterior over k_rem by literal Bayes: weight every feasible whole-lot
    count by likelihood times prior and normalise.

    Independent of :func:`posterior_remaining`; kept as the oracle the
    closed form is checked against.
    """
    n_lot = query.lot_size
    if n_lot > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(
            f"brute-force posterior limited to lot sizes <= {BRUTE_FORCE_LIMIT}, got {n_lot}"
        )
    n, y = query.sample_size, query.observed
    prior = BetaBinomParams(n_lot, query.prior.a, query.prior.b)
    log_weights = []
    for k_whole in range(y, n_lot - n + y + 1):
        lw = hypergeometric_log_pmf(HypergeomParams(n_lot, k_whole, n), y)
        if lw == -math.inf:
            log_weights.append(-math.inf)
            continue
        log_weights.append(lw + beta_binomial_log_pmf(prior, k_whole))
    peak = max(log_weights)
    weights = [math.exp(lw - peak) if lw != -math.inf else 0.0 for lw in log_weights]
    total = math.fsum(weights)
    return [w / total for w in weights]


def _exact_tie(query: RiskQuery, limit: float) -> Optional[bool]:
    """Exact equality of risk and limit, or None when the exact path is
    not feasible for these parameters."""
    if query.remaining_size > exact.EXACT_TRIALS_LIMIT:
        return None
    try:
        a = Fraction(str(query.prior.a))
        b = Fraction(str(query.prior.b))
        limit_exact = Fraction(str(limit))
    except ValueError:
        return None
    value = exact.specific_consumer_risk_exact(
        query.lot_size, query.sample_size, query.observed, query.lq, a, b
    )
    return value == limit_exact


def _tie_flag(query: RiskQuery, risk: float, limit: Optional[float]) -> bool:
    if limit is None or abs(risk - limit) > TIE_TOLERANCE:
        return False
    refined = _exact_tie(query, limit)
    return refined if refined is not None else True


def specific_consumer_risk(query: RiskQuery, limit: Optional[float] = None) -> RiskResult:
    """Posterior probability that the remaining lot is unsatisfactory.

    Risk = P(k_rem >= ceil(LQ * (N - n)) | y, N, n).  An empty remaining
    lot (n = N) has risk 0 by convention: nothing is left whose quality
    could be unsatisfactory, even though ceil(LQ * 0) = 0 would make the
    threshold event vacuously certain.

    When ``limit`` is given the result's ``boundary_tie`` records whether
    the risk sits exactly on the limit (confirmed in exact rational
    arithmetic where feasible).
    """
    remaining = query.remaining_size
    post = posterior_remaining(query)
    threshold = ceil_threshold(query.lq, remaining)
    if remaining == 0:
        risk = 0.0
    else:
        risk = 1.0 - beta_binomial_cdf(post, threshold - 1)
        risk = 0.0 if risk < 0.0 else 1.0 if risk > 1.0 else risk
    return RiskResult(
        risk=risk,
        threshold_c=threshold,
        posterior_trials=post.trials,
        posterior_a=post.alpha,
        posterior_b=post.beta,
        boundary_tie=_tie_flag(query, risk, limit),
        observed=query.observed,
    )


def max_risk_over_acceptable_outcomes(
    lot_size: int,
    sample_size: int,
    ac: int,
    lq: Fraction,
    prior: PriorSpec = UNIFORM_PRIOR,
    limit: Optional[float] = None,
) -> RiskResult:
    """Worst specific consumer's risk over all acceptable observations
    y in {0..ac}; the plan must protect for every one of them."""
    if not 0 <= ac <= sample_size:
        raise DomainError(f"acceptance number {ac} outside 0..{sample_size}")
    worst: Optional[RiskResult] = None
    for y in range(ac + 1):
        query = RiskQuery(lot_size, sample_size, y, lq, prior)
        result = specific_consumer_risk(query, limit)
        if worst is None or result.risk > worst.risk:
            worst = result
    assert worst is not None
    return worst


def within_limit(risk: float, limit: float) -> bool:
    """Acceptance test against a risk limit, with the fixed slack."""
    return risk <= limit + LIMIT_SLACK
