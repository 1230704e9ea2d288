"""Command-line front end.

Exit codes: 0 success, 1 no plan exists, 2 usage or input error,
3 requested quantity is not computable under the model.

Risks print at 6 significant digits; identical invocations produce
byte-identical output.  JSON output carries full precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, TextIO

from . import plans, risk, sensitivity, tabulation
from .exceptions import DomainError, NotComputable, SizeLimitError

EXIT_OK = 0
EXIT_NO_PLAN = 1
EXIT_USAGE = 2
EXIT_NOT_COMPUTABLE = 3


def _fmt_risk(value: float) -> str:
    return format(value, ".6g")


def _parse_lot_range(text: str) -> plans.LotRange:
    try:
        lo_text, hi_text = text.split(":")
        return plans.LotRange(int(lo_text), int(hi_text))
    except (ValueError, DomainError) as err:
        raise DomainError(f"lot range must be LO:HI, got {text!r}") from err


def _parse_plan(text: str, form: str) -> plans.Plan:
    try:
        size_text, ac_text = text.split(",")
        return plans.Plan(form, int(size_text), int(ac_text))
    except (ValueError, DomainError) as err:
        raise DomainError(f"plan must be SIZE,AC, got {text!r}") from err


@dataclass(frozen=True)
class ExternalPlanSet:
    """Plan rows read from a config file, e.g. plans transcribed from an
    external standard for comparison."""

    rows: tuple[tuple[plans.LotRange, plans.Plan], ...]
    label: str

    @staticmethod
    def load(path: str) -> "ExternalPlanSet":
        rows = []
        label = path
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for lineno, raw in enumerate(fh, start=1):
                    line = raw.strip()
                    if line.startswith("#"):
                        if lineno == 1:
                            label = line.lstrip("# ").strip() or path
                        continue
                    if not line:
                        continue
                    parts = line.split()
                    if len(parts) != 5:
                        raise DomainError(
                            f"{path}:{lineno}: expected 'LO HI FORM SIZE AC', got {line!r}"
                        )
                    lo, hi, form, size, ac = parts
                    rows.append(
                        (
                            plans.LotRange(int(lo), int(hi)),
                            plans.Plan(form, int(size), int(ac)),
                        )
                    )
        except OSError as err:
            raise DomainError(f"cannot read plan config {path}: {err}") from err
        except ValueError as err:
            raise DomainError(f"malformed plan config {path}: {err}") from err
        if not rows:
            raise DomainError(f"plan config {path} contains no plans")
        ranges = sorted((r.lo, r.hi) for r, _ in rows)
        for (_, hi1), (lo2, _) in zip(ranges, ranges[1:]):
            if lo2 <= hi1:
                raise DomainError(f"plan config {path} has overlapping lot ranges")
        return ExternalPlanSet(rows=tuple(rows), label=label)


def _open_out(path: Optional[str]) -> TextIO:
    return open(path, "w", encoding="utf-8", newline="") if path else sys.stdout


def _emit(out: TextIO, text: str) -> None:
    out.write(text)
    if out is not sys.stdout:
        out.close()


def _add_common(parser: argparse.ArgumentParser, *, prior: bool = True, limit: bool = True) -> None:
    parser.add_argument("--lq", required=True, help="limiting quality: 'P%%', 'p/q' or decimal")
    if prior:
        parser.add_argument("--prior", default="1,1", help="beta-binomial prior 'a,b' (default 1,1)")
    if limit:
        parser.add_argument("--limit", type=float, default=0.1, help="risk limit (default 0.1)")


def cmd_risk(args: argparse.Namespace) -> int:
    lq = risk.parse_lq(args.lq)
    prior = risk.PriorSpec.parse(args.prior)
    if args.frequentist_remaining:
        try:
            risk.frequentist_remaining_risk(args.lot_size, args.sample_size, args.ac, lq)
        except NotComputable as err:
            print(f"not computable: {err}", file=sys.stderr)
            return EXIT_NOT_COMPUTABLE
    query = risk.RiskQuery(args.lot_size, args.sample_size, args.observed, lq, prior)
    result = risk.specific_consumer_risk(query, args.limit)
    lines: dict[str, object] = {
        "risk": result.risk,
        "threshold_c": result.threshold_c,
        "posterior_trials": result.posterior_trials,
        "posterior_a": result.posterior_a,
        "posterior_b": result.posterior_b,
        "boundary_tie": result.boundary_tie,
    }
    if args.frequentist:
        lines["frequentist_whole_lot_risk"] = risk.frequentist_consumer_risk(
            args.lot_size, args.sample_size, args.ac, lq
        )
    if args.oracle:
        reference = risk.brute_force_posterior(query)
        post = risk.posterior_remaining(query)
        from .distributions import beta_binomial_pmf

        closed = [beta_binomial_pmf(post, k) for k in range(post.trials + 1)]
        lines["oracle_sup_norm"] = max(
            abs(x - y) for x, y in zip(closed, reference)
        ) if closed else 0.0
    if args.format == "json":
        print(json.dumps(lines, sort_keys=True))
    else:
        for key, value in lines.items():
            text = _fmt_risk(value) if isinstance(value, float) else str(value)
            print(f"{key}: {text}")
    return EXIT_OK


def cmd_design(args: argparse.Namespace) -> int:
    lq = risk.parse_lq(args.lq)
    prior = risk.PriorSpec.parse(args.prior)
    if (args.lot_size is None) == (args.lot_range is None):
        print("exactly one of --lot-size or --lot-range is required", file=sys.stderr)
        return EXIT_USAGE

    if args.lot_size is not None:
        n = plans.minimal_sample_size(args.lot_size, lq, args.ac, args.limit, prior)
        if n is None:
            print(
                f"no plan: no sample size limits the risk to {args.limit} "
                f"while leaving a remaining lot at lot size {args.lot_size}",
                file=sys.stderr,
            )
            return EXIT_NO_PLAN
        if args.representation == "remaining":
            print(str(plans.Plan(plans.REMAINING_FORM, args.lot_size - n, args.ac)))
        else:
            print(str(plans.Plan(plans.SAMPLE_FORM, n, args.ac)))
        return EXIT_OK

    lot_range = _parse_lot_range(args.lot_range)
    require_remaining = not args.allow_census
    candidates: dict[str, Optional[plans.Plan]] = {}
    if args.representation in ("remaining", "auto"):
        candidates["remaining"] = plans.design_range_plan(
            lot_range, lq, args.ac, args.limit, prior,
            representation=plans.REMAINING_FORM,
        )
    if args.representation in ("sample-size", "auto"):
        candidates["sample"] = plans.design_range_plan(
            lot_range, lq, args.ac, args.limit, prior,
            representation=plans.SAMPLE_FORM, require_remaining=require_remaining,
        )
    if args.representation == "auto":
        optima = plans.minimal_sample_sizes(lot_range, lq, args.ac, args.limit, prior)
        chosen = tabulation._design_row(
            lot_range,
            tabulation.TableMeta(lq, args.limit, prior, args.ac),
            tabulation.POLICY_AUTO,
            optima,
        )
    else:
        chosen = next(iter(candidates.values()))
    if chosen is None:
        reason = (
            "no plan leaving a remaining lot"
            if require_remaining or args.representation == "remaining"
            else "no plan"
        )
        print(f"{reason} for lot sizes {lot_range} at limit {args.limit}", file=sys.stderr)
        return EXIT_NO_PLAN
    report = plans.validate_plan_for_range(chosen, lot_range, lq, args.limit, prior)
    print(str(chosen))
    if report.census_lots:
        lots = ", ".join(str(n) for n in report.census_lots[:5])
        more = " ..." if len(report.census_lots) > 5 else ""
        print(f"note: consumes whole lots of size {lots}{more}", file=sys.stderr)
    return EXIT_OK


def _resolve_breakpoints(args: argparse.Namespace) -> tuple[Sequence[int], Fraction]:
    if args.preset:
        preset = tabulation.PRESETS.get(args.preset)
        if preset is None:
            known = ", ".join(sorted(tabulation.PRESETS))
            raise DomainError(f"unknown preset {args.preset!r}; known presets: {known}")
        return preset.breakpoints, preset.lq
    if not args.breakpoints:
        raise DomainError("either --preset or --breakpoints is required")
    if args.lq is None:
        raise DomainError("--lq is required with --breakpoints")
    text = args.breakpoints
    if ":" in text:
        lot_range = _parse_lot_range(text)
        return (lot_range.lo, lot_range.hi), risk.parse_lq(args.lq)
    try:
        with open(text, "r", encoding="utf-8") as fh:
            tokens = fh.read().replace(",", " ").split()
        return tuple(int(t) for t in tokens), risk.parse_lq(args.lq)
    except OSError:
        pass
    try:
        return tuple(int(t) for t in text.split(",")), risk.parse_lq(args.lq)
    except ValueError as err:
        raise DomainError(f"cannot parse breakpoints from {text!r}") from err


def cmd_table(args: argparse.Namespace) -> int:
    breakpoints, lq = _resolve_breakpoints(args)
    prior = risk.PriorSpec.parse(args.prior)
    table = tabulation.build_table(
        breakpoints, lq, args.ac, args.limit, prior, policy=args.representation
    )
    _emit(_open_out(args.out), tabulation.render_table(table, args.format))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    lq = risk.parse_lq(args.lq)
    prior = risk.PriorSpec.parse(args.prior)
    external = ExternalPlanSet.load(args.plans_file)
    print(f"external plans: {external.label}")
    worst_triple = None
    any_exceedance = False
    for lot_range, plan in external.rows:
        exceed = 0
        row_worst = None
        for lot in lot_range:
            n = plan.sample_size_at(lot)
            result = risk.max_risk_over_acceptable_outcomes(
                lot, n, min(plan.ac, n), lq, prior, args.limit
            )
            if row_worst is None or result.risk > row_worst[1]:
                row_worst = (lot, result.risk)
            if not risk.within_limit(result.risk, args.limit):
                exceed += 1
                if args.details:
                    print(f"  exceeds: plan {plan} N={lot} risk={_fmt_risk(result.risk)}")
        assert row_worst is not None
        status = f"exceedances={exceed}/{lot_range.hi - lot_range.lo + 1}"
        print(
            f"plan {plan} lots {lot_range}: {status} "
            f"max risk {_fmt_risk(row_worst[1])} at N={row_worst[0]}"
        )
        any_exceedance = any_exceedance or exceed > 0
        if worst_triple is None or row_worst[1] > worst_triple[2]:
            worst_triple = (plan, row_worst[0], row_worst[1])
    assert worst_triple is not None
    plan, lot, value = worst_triple
    print(f"maximum risk {_fmt_risk(value)} at N={lot} under plan {plan}")
    print("within limit everywhere" if not any_exceedance else f"limit {args.limit} exceeded")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    lq = risk.parse_lq(args.lq)
    plan = _parse_plan(args.plan, args.plan_form)
    lines = ["k_whole,category"]
    for k_whole in range(args.lot_size + 1):
        category = plans.classify_lot(args.lot_size, plan, lq, k_whole)
        lines.append(f"{k_whole},{category.value}")
    _emit(_open_out(args.out), "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_curves(args: argparse.Namespace) -> int:
    lq = risk.parse_lq(args.lq)
    prior = risk.PriorSpec.parse(args.prior)
    lot_sizes = [int(t) for t in args.lot_sizes.split(",")]
    mode = (
        sensitivity.OVER_REMAINING_SIZE
        if args.mode == "remaining"
        else sensitivity.OVER_SAMPLE_SIZE
    )
    points = sensitivity.risk_curves(mode, lot_sizes, lq, prior, args.ac)
    lines = ["N,x_kind,x,risk,threshold_c"]
    for p in points:
        lines.append(f"{p.lot_size},{p.x_kind},{p.x},{_fmt_risk(p.risk)},{p.threshold_c}")
    _emit(_open_out(args.out), "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_sensitivity(args: argparse.Namespace) -> int:
    lq = risk.parse_lq(args.lq)
    plan_set = [
        plans.Plan(plans.REMAINING_FORM, int(t), 0) for t in args.plans.split(",")
    ]
    mode = {"a": sensitivity.VARY_A, "b": sensitivity.VARY_B, "ab": sensitivity.VARY_AB}[args.vary]
    grid = None
    if args.grid:
        try:
            lo, hi, step = (float(t) for t in args.grid.split(":"))
        except ValueError as err:
            raise DomainError(f"grid must be LO:HI:STEP, got {args.grid!r}") from err
        grid = sensitivity.GridSpec(lo, hi, step)
    fixed = args.fixed_b if mode == sensitivity.VARY_A else args.fixed_a
    points = sensitivity.sweep(plan_set, lq, args.limit, mode, grid, fixed, args.cap)
    lines = ["plan_r,ac,mode,a,b,min_required_N"]
    for p in points:
        found = "" if p.min_required_N is None else str(p.min_required_N)
        lines.append(f"{p.plan_r},0,{args.vary},{p.a:g},{p.b:g},{found}")
    _emit(_open_out(args.out), "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsp",
        description=(
            "Design, evaluate and tabulate attribute acceptance-sampling plans "
            "for destructive testing, protecting the lot that remains after the "
            "sample is consumed."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_risk = sub.add_parser("risk", help="evaluate risks for one sampling outcome")
    p_risk.add_argument("--lot-size", type=int, required=True)
    p_risk.add_argument("--sample-size", type=int, required=True)
    p_risk.add_argument("--observed", type=int, default=0)
    p_risk.add_argument("--ac", type=int, default=0)
    _add_common(p_risk)
    p_risk.add_argument("--oracle", action="store_true",
                        help="cross-check the posterior against brute-force Bayes")
    p_risk.add_argument("--frequentist", action="store_true",
                        help="also report the whole-lot frequentist consumer's risk")
    p_risk.add_argument("--frequentist-remaining", action="store_true",
                        help="ask for the frequentist remaining-lot risk (always refuses)")
    p_risk.add_argument("--format", choices=("text", "json"), default="text")
    p_risk.set_defaults(func=cmd_risk)

    p_design = sub.add_parser("design", help="find a minimal plan for a lot or range")
    p_design.add_argument("--lot-size", type=int)
    p_design.add_argument("--lot-range", help="LO:HI")
    p_design.add_argument("--ac", type=int, default=0)
    _add_common(p_design)
    p_design.add_argument(
        "--representation", choices=("auto", "sample-size", "remaining"), default="auto"
    )
    p_design.add_argument(
        "--allow-census", action="store_true",
        help="permit range plans that consume some lots entirely",
    )
    p_design.set_defaults(func=cmd_design)

    p_table = sub.add_parser("table", help="tabulate plans over lot-size ranges")
    p_table.add_argument("--preset", help=f"one of: {', '.join(sorted(tabulation.PRESETS))}")
    p_table.add_argument(
        "--breakpoints",
        help="comma list of range starts plus final end, LO:HI for one range, or a file",
    )
    p_table.add_argument("--lq", help="limiting quality (required with --breakpoints)")
    p_table.add_argument("--ac", type=int, default=0)
    p_table.add_argument("--prior", default="1,1")
    p_table.add_argument("--limit", type=float, default=0.1)
    p_table.add_argument(
        "--representation", choices=("auto", "sample", "remaining"), default="auto"
    )
    p_table.add_argument("--format", choices=("md", "markdown", "csv", "json"), default="md")
    p_table.add_argument("--out")
    p_table.set_defaults(func=cmd_table)

    p_cmp = sub.add_parser("compare", help="evaluate externally supplied plans")
    p_cmp.add_argument("--plans-file", required=True,
                       help="rows of 'LO HI FORM SIZE AC'; '#' comments")
    _add_common(p_cmp)
    p_cmp.add_argument("--details", action="store_true",
                       help="list every lot size exceeding the limit")
    p_cmp.set_defaults(func=cmd_compare)

    p_cls = sub.add_parser("classify", help="lot quality before/after an accepted sample")
    p_cls.add_argument("--lot-size", type=int, required=True)
    p_cls.add_argument("--plan", required=True, help="SIZE,AC")
    p_cls.add_argument("--plan-form", choices=("sample", "remaining"), default="sample")
    p_cls.add_argument("--lq", required=True)
    p_cls.add_argument("--out")
    p_cls.set_defaults(func=cmd_classify)

    p_cur = sub.add_parser("curves", help="risk-curve data over n or r")
    p_cur.add_argument("--mode", choices=("sample-size", "remaining"), required=True)
    p_cur.add_argument("--lot-sizes", required=True, help="comma list")
    p_cur.add_argument("--ac", type=int, default=0)
    _add_common(p_cur, limit=False)
    p_cur.add_argument("--out")
    p_cur.set_defaults(func=cmd_curves)

    p_sen = sub.add_parser("sensitivity", help="prior sensitivity sweeps")
    p_sen.add_argument("--plans", required=True, help="comma list of remaining-lot sizes r")
    p_sen.add_argument("--vary", choices=("a", "b", "ab"), required=True)
    p_sen.add_argument("--fixed-a", type=float, default=1.0)
    p_sen.add_argument("--fixed-b", type=float, default=1.0)
    p_sen.add_argument("--grid", help="LO:HI:STEP")
    p_sen.add_argument("--cap", type=int)
    _add_common(p_sen, prior=False)
    p_sen.add_argument("--out")
    p_sen.set_defaults(func=cmd_sensitivity)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotComputable as err:
        print(f"not computable: {err}", file=sys.stderr)
        return EXIT_NOT_COMPUTABLE
    except (DomainError, SizeLimitError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
