"""Plan representations, minimal-sample-size search, range design and
lot classification.

A plan either fixes the sample size, written ``(n, Ac)``, or fixes the
remaining-lot size, written ``[r, Ac]`` with ``r = N - n``.  The second
form is what makes concise tables possible: for a fixed remaining size
the risk only falls as the lot grows, so one bracket plan covers every
lot size from its onset upward.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional

from .exceptions import DomainError, SizeLimitError
from .risk import (
    PriorSpec,
    RiskQuery,
    RiskResult,
    UNIFORM_PRIOR,
    ceil_threshold,
    max_risk_over_acceptable_outcomes,
    specific_consumer_risk,
    within_limit,
)

__all__ = [
    "SAMPLE_FORM",
    "REMAINING_FORM",
    "Plan",
    "LotRange",
    "LotCategory",
    "RangeValidation",
    "lot_size_limit",
    "minimal_sample_size",
    "minimal_sample_sizes",
    "validate_plan_for_range",
    "design_range_plan",
    "classify_lot",
]

SAMPLE_FORM = "sample"
REMAINING_FORM = "remaining"

DEFAULT_MAX_LOT_SIZE = 100_000
MAX_LOT_SIZE_ENV = "DSP_MAX_LOT_SIZE"


def lot_size_limit() -> int:
    """Scale guard for lot-size scans; override with DSP_MAX_LOT_SIZE."""
    raw = os.environ.get(MAX_LOT_SIZE_ENV)
    if raw is None:
        return DEFAULT_MAX_LOT_SIZE
    try:
        value = int(raw)
    except ValueError as err:
        raise DomainError(f"{MAX_LOT_SIZE_ENV} must be an integer, got {raw!r}") from err
    if value <= 0:
        raise DomainError(f"{MAX_LOT_SIZE_ENV} must be positive, got {value}")
    return value


def _guard_lot_size(lot_size: int) -> None:
    limit = lot_size_limit()
    if lot_size > limit:
        raise SizeLimitError(
            f"lot size {lot_size} exceeds the scale guard {limit} "
            f"(set {MAX_LOT_SIZE_ENV} to raise it)"
        )


@dataclass(frozen=True)
class Plan:
    """Acceptance plan in sample-size or remaining-lot form.

    ``size`` is the sample size n for form "sample" and the remaining-lot
    size r for form "remaining".
    """

    form: str
    size: int
    ac: int = 0

    def __post_init__(self) -> None:
        if self.form not in (SAMPLE_FORM, REMAINING_FORM):
            raise DomainError(f"unknown plan form {self.form!r}")
        if self.ac < 0:
            raise DomainError("acceptance number must be nonnegative")
        if self.size < 0:
            raise DomainError("plan size must be nonnegative")
        if self.form == REMAINING_FORM and self.size < 1:
            raise DomainError("a remaining-lot plan needs a remaining lot (r >= 1)")

    def sample_size_at(self, lot_size: int) -> int:
        """Items destroyed when the plan is applied to a lot of ``lot_size``.

        A sample-size plan larger than the lot consumes the whole lot.
        """
        if self.form == SAMPLE_FORM:
            return min(self.size, lot_size)
        if lot_size < self.size + 1:
            raise DomainError(
                f"remaining-lot plan [{self.size}, {self.ac}] needs lot sizes "
                f">= {self.size + 1}, got {lot_size}"
            )
        return lot_size - self.size

    def __str__(self) -> str:
        if self.form == REMAINING_FORM:
            return f"[{self.size}, {self.ac}]"
        return f"({self.size}, {self.ac})"


@dataclass(frozen=True)
class LotRange:
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not 0 <= self.lo <= self.hi:
            raise DomainError(f"invalid lot range {self.lo}..{self.hi}")

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def __str__(self) -> str:
        return f"{self.lo}-{self.hi}"


class LotCategory(Enum):
    GREEN = "green"
    OLIVE = "olive"
    ORANGE = "orange"
    RED = "red"
    NEVER_ACCEPTED = "never-accepted"


def minimal_sample_size(
    lot_size: int,
    lq: Fraction,
    ac: int = 0,
    limit: float = 0.1,
    prior: PriorSpec = UNIFORM_PRIOR,
) -> Optional[int]:
    """Smallest sample size whose worst-case risk stays within the limit
    while still leaving a remaining lot.

    The scan runs over the full 0..N-1; the risk is not monotone in n (it
    can jump up whenever ceil(LQ * (N - n)) drops), so exceedances along
    the way prove nothing and never stop the scan.
    """
    if lot_size < 1:
        raise DomainError("lot size must be at least 1")
    if not 0 < limit < 1:
        raise DomainError("risk limit must lie strictly between 0 and 1")
    _guard_lot_size(lot_size)
    for n in range(lot_size):
        result = max_risk_over_acceptable_outcomes(
            lot_size, n, min(ac, n), lq, prior, limit
        )
        if within_limit(result.risk, limit):
            return n
    return None


def minimal_sample_sizes(
    lot_range: LotRange,
    lq: Fraction,
    ac: int = 0,
    limit: float = 0.1,
    prior: PriorSpec = UNIFORM_PRIOR,
) -> dict[int, Optional[int]]:
    """Per-lot minimal sample sizes for every lot size in the range.

    Incremental: for fixed remaining size the risk never grows with the
    lot, so the largest feasible remaining size r*(N) = N - n*(N) is
    nondecreasing in N and bounds the next scan.
    """
    _guard_lot_size(lot_range.hi)
    optima: dict[int, Optional[int]] = {}
    best_remaining = 0  # r*(previous N); 0 = nothing known feasible yet
    for lot in lot_range:
        if lot < 1:
            optima[lot] = None
            continue
        found: Optional[int] = None
        for n in range(min(lot, lot - best_remaining + 1)):
            result = max_risk_over_acceptable_outcomes(
                lot, n, min(ac, n), lq, prior, limit
            )
            if within_limit(result.risk, limit):
                found = n
                break
        optima[lot] = found
        if found is not None:
            best_remaining = lot - found
    return optima


@dataclass(frozen=True)
class RangeValidation:
    """Outcome of checking one plan against a whole range of lot sizes."""

    valid: bool
    binding_lot: Optional[int] = None
    binding_risk: Optional[RiskResult] = None
    census_lots: tuple[int, ...] = field(default_factory=tuple)
    tie_lots: tuple[int, ...] = field(default_factory=tuple)


def validate_plan_for_range(
    plan: Plan,
    lot_range: LotRange,
    lq: Fraction,
    limit: float = 0.1,
    prior: PriorSpec = UNIFORM_PRIOR,
) -> RangeValidation:
    """Check every lot size in the range against the limit; no shortcut.

    Sample-size plans that meet or exceed a lot consume it entirely;
    those lots carry risk 0 and are reported in ``census_lots``.  The
    report's binding lot is the one with the largest risk.
    """
    if plan.form == REMAINING_FORM and lot_range.lo < plan.size + 1:
        raise DomainError(
            f"range {lot_range} incompatible with plan {plan}: lot sizes below "
            f"{plan.size + 1} cannot leave a remaining lot of {plan.size}"
        )
    _guard_lot_size(lot_range.hi)
    valid = True
    binding_lot: Optional[int] = None
    binding: Optional[RiskResult] = None
    census: list[int] = []
    ties: list[int] = []
    for lot in lot_range:
        n = plan.sample_size_at(lot)
        if plan.form == SAMPLE_FORM and n >= lot:
            census.append(lot)
        result = max_risk_over_acceptable_outcomes(
            lot, n, min(plan.ac, n), lq, prior, limit
        )
        if result.boundary_tie:
            ties.append(lot)
        if binding is None or result.risk > binding.risk:
            binding, binding_lot = result, lot
        if not within_limit(result.risk, limit):
            valid = False
    return RangeValidation(
        valid=valid,
        binding_lot=binding_lot,
        binding_risk=binding,
        census_lots=tuple(census),
        tie_lots=tuple(ties),
    )


def _range_plan_holds(
    plan: Plan,
    lot_range: LotRange,
    lq: Fraction,
    limit: float,
    prior: PriorSpec,
) -> bool:
    # Fail-fast variant used inside design scans.
    for lot in lot_range:
        n = plan.sample_size_at(lot)
        result = max_risk_over_acceptable_outcomes(
            lot, n, min(plan.ac, n), lq, prior
        )
        if not within_limit(result.risk, limit):
            return False
    return True


def design_range_plan(
    lot_range: LotRange,
    lq: Fraction,
    ac: int = 0,
    limit: float = 0.1,
    prior: PriorSpec = UNIFORM_PRIOR,
    representation: str = REMAINING_FORM,
    require_remaining: bool = False,
) -> Optional[Plan]:
    """One plan covering a whole range of lot sizes, or None.

    Remaining-lot form: the largest r whose risk stays within the limit
    for every lot in the range (larger r means smaller samples).  Sample
    form: the smallest such n.  With ``require_remaining`` a sample-size
    plan must leave a nonempty remaining lot for *every* lot in the
    range; otherwise lots it would consume entirely count as risk-free.

    Validity is not monotone in either search direction (the risk jumps
    whenever a ceiling threshold moves), so both scans are exhaustive.
    """
    _guard_lot_size(lot_range.hi)
    if representation == REMAINING_FORM:
        for r in range(lot_range.lo - 1, 0, -1):
            plan = Plan(REMAINING_FORM, r, ac)
            # Cheap reject at the range start before sweeping the range.
            at_lo = max_risk_over_acceptable_outcomes(
                lot_range.lo, lot_range.lo - r, min(ac, lot_range.lo - r), lq, prior
            )
            if not within_limit(at_lo.risk, limit):
                continue
            if _range_plan_holds(plan, lot_range, lq, limit, prior):
                return plan
        return None
    if representation == SAMPLE_FORM:
        top = lot_range.lo - 1 if require_remaining else lot_range.hi
        for n in range(0, top + 1):
            plan = Plan(SAMPLE_FORM, n, ac)
            if _range_plan_holds(plan, lot_range, lq, limit, prior):
                return plan
        return None
    raise DomainError(f"unknown representation {representation!r}")


def classify_lot(lot_size: int, plan: Plan, lq: Fraction, k_whole: int) -> LotCategory:
    """Quality of one lot before and after an accepted destructive sample.

    Enumerates the acceptable observations this lot can produce.  A lot
    that can never be accepted is its own category.  Otherwise: red when
    every acceptable outcome leaves an unsatisfactory remaining lot and
    the lot was already unsatisfactory, orange when it was satisfactory
    before, green when the lot is satisfactory before and after every
    acceptable outcome, olive for everything in between.  An empty
    remaining lot counts as satisfactory.
    """
    lq = Fraction(lq)
    if not 0 <= k_whole <= lot_size:
        raise DomainError(f"nonconforming count {k_whole} outside 0..{lot_size}")
    n = plan.sample_size_at(lot_size)
    remaining = lot_size - n
    c_whole = ceil_threshold(lq, lot_size)
    c_rem = ceil_threshold(lq, remaining)
    y_lo = max(0, n - (lot_size - k_whole))
    y_hi = min(n, k_whole, plan.ac)
    if y_lo > y_hi:
        return LotCategory.NEVER_ACCEPTED
    bad_before = k_whole >= c_whole
    outcomes = {
        remaining > 0 and (k_whole - y) >= c_rem
        for y in range(y_lo, y_hi + 1)
    }
    if outcomes == {True}:
        return LotCategory.RED if bad_before else LotCategory.ORANGE
    if outcomes == {False} and not bad_before:
        return LotCategory.GREEN
    return LotCategory.OLIVE
