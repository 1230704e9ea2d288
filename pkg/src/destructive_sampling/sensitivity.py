"""Prior sensitivity of remaining-lot plans, and risk-curve data.

A remaining-lot plan [r, 0] has no largest applicable lot: the risk only
falls as the lot grows.  What moves with the prior is the *smallest* lot
size the plan still protects.  The sweeps here trace that minimal lot
size over the beta-binomial hyperparameters; shifting prior weight
toward bad quality (larger a, smaller b) pushes it up.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exceptions import DomainError, MonotonicityError
from .plans import Plan, REMAINING_FORM
from .risk import (
    PriorSpec,
    RiskQuery,
    UNIFORM_PRIOR,
    max_risk_over_acceptable_outcomes,
    parse_lq,
    specific_consumer_risk,
    within_limit,
)

__all__ = [
    "SensitivityPoint",
    "GridSpec",
    "CurvePoint",
    "VARY_A",
    "VARY_B",
    "VARY_AB",
    "min_required_lot_size",
    "sweep",
    "estimate_slope",
    "risk_curves",
    "default_grid",
]

VARY_A = "a"
VARY_B = "b"
VARY_AB = "ab"


@dataclass(frozen=True)
class SensitivityPoint:
    a: float
    b: float
    plan_r: int
    min_required_N: Optional[int]


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    step: float

    def values(self) -> list[float]:
        if self.step <= 0:
            raise DomainError("grid step must be positive")
        if self.hi < self.lo:
            raise DomainError("grid upper bound below lower bound")
        count = int(round((self.hi - self.lo) / self.step))
        vals = [round(self.lo + i * self.step, 12) for i in range(count + 1)]
        return [v for v in vals if v <= self.hi + 1e-12]


# Grids matching the plotted hyperparameter windows; configurable.
def default_grid(mode: str) -> GridSpec:
    if mode in (VARY_A, VARY_AB):
        return GridSpec(0.6, 1.6, 0.05)
    if mode == VARY_B:
        return GridSpec(1.0, 71.0, 1.0)
    raise DomainError(f"unknown sweep mode {mode!r}")


def min_required_lot_size(
    plan: Plan,
    lq: Fraction,
    limit: float = 0.1,
    prior: PriorSpec = UNIFORM_PRIOR,
    cap: Optional[int] = None,
) -> Optional[int]:
    """Smallest lot size the remaining-lot plan still protects, or None
    if none exists up to ``cap``.

    Scans upward from r + 1.  Termination leans on the risk being
    non-increasing in the lot size for a fixed remaining size; that is
    verified after the first hit by a lookahead over the next ceil(1/LQ)
    lot sizes, and a violation aborts loudly rather than returning a
    wrong minimum.
    """
    if plan.form != REMAINING_FORM:
        raise DomainError("minimal required lot sizes are defined for remaining-lot plans")
    if plan.ac != 0:
        raise DomainError("only zero-acceptance plans are supported here")
    lq = parse_lq(lq)
    if cap is None:
        cap = 10 * (plan.size + 1)
    if cap < plan.size + 1:
        raise DomainError(f"cap {cap} below the smallest applicable lot {plan.size + 1}")
    for lot in range(plan.size + 1, cap + 1):
        result = specific_consumer_risk(
            RiskQuery(lot, lot - plan.size, 0, lq, prior), limit
        )
        if within_limit(result.risk, limit):
            lookahead = -(-lq.denominator // lq.numerator)  # ceil(1/LQ)
            for probe in range(lot + 1, lot + lookahead + 1):
                check = specific_consumer_risk(
                    RiskQuery(probe, probe - plan.size, 0, lq, prior)
                )
                if not within_limit(check.risk, limit):
                    raise MonotonicityError(
                        f"risk of plan {plan} rose above {limit} at lot {probe} "
                        f"after qualifying at {lot}; monotone termination is unsafe "
                        f"for prior ({prior.a}, {prior.b})"
                    )
            return lot
    return None


def sweep(
    plan_set: Sequence[Plan],
    lq: Fraction,
    limit: float = 0.1,
    mode: str = VARY_A,
    grid: Optional[GridSpec] = None,
    fixed_value: float = 1.0,
    cap: Optional[int] = None,
) -> list[SensitivityPoint]:
    """Minimal required lot sizes over a hyperparameter grid.

    Output is ordered by (plan, grid value) and depends only on the
    inputs.
    """
    lq = parse_lq(lq)
    if grid is None:
        grid = default_grid(mode)
    points = []
    for plan in plan_set:
        for value in grid.values():
            if mode == VARY_A:
                prior = PriorSpec(value, fixed_value)
            elif mode == VARY_B:
                prior = PriorSpec(fixed_value, value)
            elif mode == VARY_AB:
                prior = PriorSpec(value, value)
            else:
                raise DomainError(f"unknown sweep mode {mode!r}")
            found = min_required_lot_size(plan, lq, limit, prior, cap)
            points.append(
                SensitivityPoint(a=prior.a, b=prior.b, plan_r=plan.size, min_required_N=found)
            )
    return points


def estimate_slope(points: Sequence[SensitivityPoint]) -> float:
    """Ordinary least-squares slope of min_required_N over the varied
    hyperparameter, for one plan's sweep."""
    present = [p for p in points if p.min_required_N is not None]
    if len(present) < 2:
        raise DomainError("need at least two points with a minimal lot size")
    a_varies = len({p.a for p in present}) > 1
    b_varies = len({p.b for p in present}) > 1
    if a_varies:
        xs = [p.a for p in present]
    elif b_varies:
        xs = [p.b for p in present]
    else:
        raise DomainError("no hyperparameter varies across the points")
    ys = [float(p.min_required_N) for p in present]
    return statistics.linear_regression(xs, ys).slope


@dataclass(frozen=True)
class CurvePoint:
    lot_size: int
    x_kind: str  # "n" or "r"
    x: int
    risk: float
    threshold_c: int


OVER_SAMPLE_SIZE = "sample-size"
OVER_REMAINING_SIZE = "remaining"


def risk_curves(
    mode: str,
    lot_sizes: Sequence[int],
    lq: Fraction,
    prior: PriorSpec = UNIFORM_PRIOR,
    ac: int = 0,
) -> list[CurvePoint]:
    """Risk as a function of sample size or remaining-lot size, per lot.

    Over the remaining size the risk only jumps where the unacceptable
    count ceil(LQ * r) increments, i.e. at r = 1 mod 1/LQ for integer
    1/LQ; over the sample size the jump locations differ per lot, which
    is what ruins common sample sizes for ranges.
    """
    lq = parse_lq(lq)
    points = []
    for lot in lot_sizes:
        if lot < 1:
            raise DomainError("lot sizes must be at least 1")
        if mode == OVER_SAMPLE_SIZE:
            xs = [(n, n) for n in range(lot)]
        elif mode == OVER_REMAINING_SIZE:
            xs = [(r, lot - r) for r in range(1, lot + 1)]
        else:
            raise DomainError(f"unknown curve mode {mode!r}")
        for x, n in xs:
            result = max_risk_over_acceptable_outcomes(
                lot, n, min(ac, n), lq, prior
            )
            points.append(
                CurvePoint(
                    lot_size=lot,
                    x_kind="n" if mode == OVER_SAMPLE_SIZE else "r",
                    x=x,
                    risk=result.risk,
                    threshold_c=result.threshold_c,
                )
            )
    return points
