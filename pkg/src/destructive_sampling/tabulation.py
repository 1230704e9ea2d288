"""Concise plan tables over ranges of lot sizes.

Tables are built from breakpoints (a list of range starts plus a final
inclusive end).  Per range the representation policy picks between the
remaining-lot form and the sample-size form; ``auto`` compares their
worst-case overhead against the per-lot optimal sample sizes and keeps
the form that wastes fewer items, preferring the sample form on ties.

Two named presets reproduce the reference tables this tool is anchored
to (limiting qualities 2 % and 20 %, risk limit 10 %, uniform prior,
zero acceptance number) with their published breakpoints.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exceptions import DomainError
from .plans import (
    LotRange,
    Plan,
    REMAINING_FORM,
    SAMPLE_FORM,
    design_range_plan,
    minimal_sample_sizes,
    validate_plan_for_range,
)
from .risk import PriorSpec, UNIFORM_PRIOR, parse_lq

__all__ = [
    "TableMeta",
    "TableRow",
    "PlanTable",
    "PRESETS",
    "TablePreset",
    "ranges_from_breakpoints",
    "build_table",
    "auto_partition",
    "render_table",
    "parse_table_json",
]

POLICY_AUTO = "auto"


@dataclass(frozen=True)
class TableMeta:
    lq: Fraction
    limit: float
    prior: PriorSpec
    ac: int


@dataclass(frozen=True)
class TableRow:
    lot_range: LotRange
    plan: Optional[Plan]


@dataclass(frozen=True)
class PlanTable:
    meta: TableMeta
    rows: tuple[TableRow, ...]


@dataclass(frozen=True)
class TablePreset:
    breakpoints: tuple[int, ...]
    lq: Fraction


PRESETS: dict[str, TablePreset] = {
    "paper-lq2": TablePreset(
        breakpoints=(0, 50, 99, 160, 216, 267, 317, 501, 1200),
        lq=Fraction(1, 50),
    ),
    "paper-lq20": TablePreset(
        breakpoints=(0, 17, 22, 27, 32, 36, 41, 51, 90),
        lq=Fraction(1, 5),
    ),
}


def ranges_from_breakpoints(breakpoints: Sequence[int]) -> list[LotRange]:
    """Range starts plus a final inclusive end -> contiguous lot ranges.

    [0, 50, 99] means 0-49 and 50-99.  A single pair [lo, hi] is the one
    range lo-hi.
    """
    bps = list(breakpoints)
    if len(bps) < 2:
        raise DomainError("need at least two breakpoints")
    if any(b2 <= b1 for b1, b2 in zip(bps[:-1], bps[1:-1])):
        raise DomainError(f"breakpoints must be strictly ascending, got {bps}")
    if bps[-1] < bps[-2]:
        raise DomainError(f"breakpoints must be ascending, got {bps}")
    if any(b < 0 for b in bps):
        raise DomainError("breakpoints must be nonnegative")
    ranges = [LotRange(lo, hi - 1) for lo, hi in zip(bps[:-2], bps[1:-1])]
    ranges.append(LotRange(bps[-2], bps[-1]))
    return ranges


def _worst_overhead(
    plan: Plan, lot_range: LotRange, optima: dict[int, Optional[int]]
) -> Optional[int]:
    """Max extra items destroyed versus the per-lot optimum; None when some
    lot in the range has no per-lot plan at all."""
    worst = 0
    for lot in lot_range:
        best = optima[lot]
        if best is None:
            return None
        worst = max(worst, plan.sample_size_at(lot) - best)
    return worst


def _design_row(
    lot_range: LotRange,
    meta: TableMeta,
    policy: str,
    optima: dict[int, Optional[int]],
) -> Optional[Plan]:
    if policy in (REMAINING_FORM, SAMPLE_FORM):
        return design_range_plan(
            lot_range, meta.lq, meta.ac, meta.limit, meta.prior,
            representation=policy, require_remaining=True,
        )
    if policy != POLICY_AUTO:
        raise DomainError(f"unknown representation policy {policy!r}")
    remaining = design_range_plan(
        lot_range, meta.lq, meta.ac, meta.limit, meta.prior,
        representation=REMAINING_FORM,
    )
    sample = design_range_plan(
        lot_range, meta.lq, meta.ac, meta.limit, meta.prior,
        representation=SAMPLE_FORM, require_remaining=True,
    )
    if remaining is None:
        return sample
    if sample is None:
        return remaining
    over_rem = _worst_overhead(remaining, lot_range, optima)
    over_smp = _worst_overhead(sample, lot_range, optima)
    if over_rem is None or over_smp is None:
        # Some lot admits no plan at all; neither candidate can be valid.
        return None
    return remaining if over_rem < over_smp else sample


def build_table(
    breakpoints: Sequence[int],
    lq: Fraction,
    ac: int = 0,
    limit: float = 0.1,
    prior: PriorSpec = UNIFORM_PRIOR,
    policy: str = POLICY_AUTO,
) -> PlanTable:
    """Design one plan per breakpoint range; rows with no valid plan stay
    explicit "no plan" entries.

    Tabulated plans must leave a remaining lot for every lot size they
    cover; a "plan" that may consume whole lots is not a table entry.
    """
    meta = TableMeta(lq=parse_lq(lq), limit=limit, prior=prior, ac=ac)
    ranges = ranges_from_breakpoints(breakpoints)
    rows = []
    for lot_range in ranges:
        needs_optima = policy == POLICY_AUTO and lot_range.lo >= 1
        optima = (
            minimal_sample_sizes(lot_range, meta.lq, ac, limit, prior)
            if needs_optima
            else {lot: None for lot in lot_range}
        )
        plan = _design_row(lot_range, meta, policy, optima)
        rows.append(TableRow(lot_range, plan))
    return PlanTable(meta=meta, rows=tuple(rows))


def default_partition_overhead(lq: Fraction) -> int:
    return max(1, int(Fraction(1) / parse_lq(lq)) - 1)


def auto_partition(
    lot_span: LotRange,
    lq: Fraction,
    ac: int = 0,
    limit: float = 0.1,
    prior: PriorSpec = UNIFORM_PRIOR,
    max_overhead: Optional[int] = None,
) -> list[int]:
    """Greedy left-to-right breakpoints for remaining-lot range plans.

    A range keeps extending while the plan fixed at its start wastes at
    most ``max_overhead`` items against the per-lot optimum, i.e. while
    r*(N) - r*(lo) <= max_overhead.  Lot sizes admitting no plan at all
    are grouped into leading "no plan" ranges.  Returns range starts plus
    the span end, suitable for :func:`build_table`.
    """
    lq = parse_lq(lq)
    if max_overhead is None:
        max_overhead = default_partition_overhead(lq)
    if max_overhead < 1:
        raise DomainError("max_overhead must be at least 1")
    optima = minimal_sample_sizes(lot_span, lq, ac, limit, prior)
    starts: list[int] = []
    lot = lot_span.lo
    while lot <= lot_span.hi:
        starts.append(lot)
        if optima[lot] is None:
            # Group consecutive lot sizes with no per-lot plan.
            while lot <= lot_span.hi and optima[lot] is None:
                lot += 1
            continue
        anchor = lot - optima[lot]
        lot += 1
        while lot <= lot_span.hi and optima[lot] is not None:
            if (lot - optima[lot]) - anchor > max_overhead:
                break
            lot += 1
    return starts + [lot_span.hi]


def _lq_text(lq: Fraction) -> str:
    return f"{lq.numerator}/{lq.denominator}"


def _plan_to_json(plan: Optional[Plan]) -> Optional[dict]:
    if plan is None:
        return None
    return {"form": plan.form, "size": plan.size, "ac": plan.ac}


def render_table(table: PlanTable, fmt: str = "markdown") -> str:
    """Deterministic text rendering; JSON round-trips losslessly."""
    if fmt in ("markdown", "md"):
        lines = ["| Lot size | Sampling plan |", "| --- | --- |"]
        for row in table.rows:
            cell = str(row.plan) if row.plan is not None else "no plan"
            lines.append(f"| {row.lot_range} | {cell} |")
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["lo", "hi", "form", "size", "ac"])
        for row in table.rows:
            if row.plan is None:
                writer.writerow([row.lot_range.lo, row.lot_range.hi, "", "", ""])
            else:
                writer.writerow(
                    [row.lot_range.lo, row.lot_range.hi, row.plan.form,
                     row.plan.size, row.plan.ac]
                )
        return buf.getvalue()
    if fmt == "json":
        payload = {
            "metadata": {
                "lq": _lq_text(table.meta.lq),
                "limit": table.meta.limit,
                "prior": [table.meta.prior.a, table.meta.prior.b],
                "ac": table.meta.ac,
            },
            "rows": [
                {
                    "lo": row.lot_range.lo,
                    "hi": row.lot_range.hi,
                    "plan": _plan_to_json(row.plan),
                }
                for row in table.rows
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    raise DomainError(f"unknown table format {fmt!r}")


def parse_table_json(text: str) -> PlanTable:
    payload = json.loads(text)
    meta = payload["metadata"]
    rows = []
    for row in payload["rows"]:
        plan = row["plan"]
        rows.append(
            TableRow(
                LotRange(row["lo"], row["hi"]),
                None if plan is None else Plan(plan["form"], plan["size"], plan["ac"]),
            )
        )
    return PlanTable(
        meta=TableMeta(
            lq=parse_lq(meta["lq"]),
            limit=meta["limit"],
            prior=PriorSpec(*meta["prior"]),
            ac=meta["ac"],
        ),
        rows=tuple(rows),
    )


def revalidate(table: PlanTable) -> bool:
    """Every row's plan passes its own range validation."""
    for row in table.rows:
        if row.plan is None:
            continue
        report = validate_plan_for_range(
            row.plan, row.lot_range, table.meta.lq, table.meta.limit, table.meta.prior
        )
        if not report.valid:
            return False
    return True
