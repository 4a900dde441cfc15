"""dsmbcr command line: enumerate D^Θ, condition, fuse and compare orderings.

Exit codes: 0 success, 1 invalid input, 2 undefined computation. Results go to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from dsmbcr.belief import Bba, l1_distance
from dsmbcr.conditioning import condition, decompose, get_rule, rule_table
from dsmbcr.config import get_settings
from dsmbcr.errors import ComputationError, ValidationError
from dsmbcr.formula import dump_bba, parse_constraint, parse_formula, read_bba
from dsmbcr.frame import (
    Element,
    Frame,
    Model,
    ModelKind,
    canonical_key,
    dsm_cardinal,
    enumerate_elements,
    to_formula,
)
from dsmbcr.fusion import FusionRule, conditional_bel_pl, fuse, fuse_with_conflict, scr_condition

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPUTATION = 2

SCR = "SCR"


@dataclass
class CommandResult:
    exit_code: int
    report: str
    table: str | None = None


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as validation errors instead of exiting with 2."""

    def error(self, message: str):
        raise ValidationError(f"{self.prog}: {message}")


# ── Formatting ────────────────────────────────────────────────────────


def _number(value: float) -> str:
    return f"{value:.{get_settings().report_digits}f}"


def _fraction(value: float) -> str:
    """Exact fraction when ``value`` is a small rational, empty otherwise."""
    settings = get_settings()
    approx = Fraction(value).limit_denominator(settings.fraction_max_denominator)
    if abs(float(approx) - value) > settings.fraction_tolerance:
        return ""
    return str(approx)


def _csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _columns(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(row[k])) for row in [header, *rows]) for k in range(len(header))]
    lines = ["  ".join(cell.ljust(widths[k]) for k, cell in enumerate(row)).rstrip() for row in [header, *rows]]
    return "\n".join(lines) + "\n"


def _mass_table(bba: Bba) -> str:
    return _csv(["element", "mass"], [[to_formula(x), _number(m)] for x, m in bba.items()])


# ── Input helpers ─────────────────────────────────────────────────────


def _model_from_flags(args: argparse.Namespace) -> Model:
    if not args.frame:
        raise ValidationError("Give a bba file or --frame")
    frame = Frame(tuple(name.strip() for name in args.frame.split(",")))
    kind = ModelKind(args.model)
    if kind is not ModelKind.HYBRID:
        if args.empty:
            raise ValidationError("--empty needs --model hybrid")
        return Model(frame, kind)
    return Model(frame, kind, tuple(parse_constraint(frame, text) for text in args.empty or []))


def _conditioner(name: str) -> Callable[[Bba, Element], Bba]:
    if name.strip().upper() == SCR:
        return scr_condition
    rule = get_rule(name)
    return lambda bba, a: condition(bba, a, rule)


# ── Commands ──────────────────────────────────────────────────────────


def cmd_enumerate(args: argparse.Namespace) -> CommandResult:
    model = read_bba(args.file).model if args.file else _model_from_flags(args)
    elements = enumerate_elements(model)
    decomposition = decompose(parse_formula(model, args.truth)) if args.truth else None

    rows = []
    for x in elements:
        row = [to_formula(x), str(dsm_cardinal(x))]
        if decomposition is not None:
            row.append(decomposition.part_of(x))
        rows.append(row)

    header = ["element", "cardinal"] + (["part"] if decomposition else [])
    lines = [
        f"# D^Θ under the {model.kind} model over {', '.join(model.frame.atoms)}: "
        f"{len(elements)} nonempty elements"
    ]
    if decomposition is not None:
        lines.append(
            f"# truth {to_formula(decomposition.a)}: |d1|={len(decomposition.d1)} "
            f"|d2|={len(decomposition.d2)} |d3|={len(decomposition.d3)}"
        )
    report = "\n".join(lines) + "\n" + _columns(header, rows)
    return CommandResult(EXIT_OK, report, _csv(header, rows))


def cmd_condition(args: argparse.Namespace) -> CommandResult:
    bba = read_bba(args.file)
    truth = parse_formula(bba.model, args.truth)
    result = _conditioner(args.rule)(bba, truth)
    logger.info(f"Conditioned {args.file} on {to_formula(truth)} with {args.rule}")
    return CommandResult(EXIT_OK, dump_bba(result), _mass_table(result))


def cmd_fuse(args: argparse.Namespace) -> CommandResult:
    m1, m2 = read_bba(args.first), read_bba(args.second)
    rule = FusionRule(args.rule)
    result, conflict = fuse_with_conflict(m1, m2, rule, normalize=args.normalize)
    report = dump_bba(result)
    if rule in (FusionRule.DEMPSTER, FusionRule.DSMC):
        report += f"# conflict: {conflict:.{get_settings().mass_digits}g}\n"
    if result.conflict:
        report += "# unnormalized: masses sum to 1 - conflict; rerun with --normalize for a loadable bba\n"
    return CommandResult(EXIT_OK, report, _mass_table(result))


def cmd_compare_commute(args: argparse.Namespace) -> CommandResult:
    m1, m2 = read_bba(args.first), read_bba(args.second)
    truth = parse_formula(m1.model, args.truth)
    rule = FusionRule(args.fusion)
    conditioner = _conditioner(args.bcr)

    fused_then_conditioned = conditioner(fuse(m1, m2, rule, normalize=True), truth)
    conditioned_then_fused = fuse(conditioner(m1, truth), conditioner(m2, truth), rule, normalize=True)
    distance = l1_distance(fused_then_conditioned, conditioned_then_fused)

    support = sorted(set(fused_then_conditioned) | set(conditioned_then_fused), key=canonical_key)
    rows = []
    report_rows = []
    for x in support:
        fc, cf = fused_then_conditioned.mass_of(x), conditioned_then_fused.mass_of(x)
        rows.append([to_formula(x), _number(fc), _number(cf)])
        report_rows.append([to_formula(x), _number(fc), _number(cf), _fraction(fc), _fraction(cf)])

    report = (
        f"# fusion {rule}, conditioning {args.bcr.upper()}, truth {to_formula(truth)}\n"
        + _columns(["element", "m_FC", "m_CF", "FC exact", "CF exact"], report_rows)
        + f"# L1 distance: {_number(distance)}\n"
    )
    return CommandResult(EXIT_OK, report, _csv(["element", "m_FC", "m_CF"], rows))


def cmd_rules(args: argparse.Namespace) -> CommandResult:
    rows = [list(row) for row in rule_table()]
    header = ["rule", "d2", "d3", "selector"]
    return CommandResult(EXIT_OK, _columns(header, rows), _csv(header, rows))


def cmd_belief(args: argparse.Namespace) -> CommandResult:
    bba = read_bba(args.file)
    truth = parse_formula(bba.model, args.truth) if args.truth else None

    header = ["element", "bel", "pl"]
    if truth is not None:
        header += ["bel_given", "pl_given"]
    rows = []
    for x, bel, pl in bba.bel_pl_table():
        row = [to_formula(x), _number(bel), _number(pl)]
        if truth is not None:
            row += [_number(v) for v in conditional_bel_pl(bba, truth, x)]
        rows.append(row)
    return CommandResult(EXIT_OK, _columns(header, rows), _csv(header, rows))


# ── Parser and entry points ───────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="dsmbcr",
        description="Belief conditioning rules and fusion over DSm hyper-power sets",
    )
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level (default from DSMBCR_LOG_LEVEL)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add_format(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--format", choices=["text", "csv"], default="text")

    sub = commands.add_parser("enumerate", help="list D^Θ with DSm cardinals")
    sub.add_argument("file", nargs="?", help="bba document supplying frame and model")
    sub.add_argument("--frame", help="comma-separated atom names")
    sub.add_argument("--model", choices=[k.value for k in ModelKind], default=ModelKind.FREE.value)
    sub.add_argument("--empty", action="append", help="empty intersection, e.g. 'A & B' (hybrid)")
    sub.add_argument("--truth", help="show the d1/d2/d3 decomposition for this formula")
    add_format(sub)
    sub.set_defaults(handler=cmd_enumerate)

    sub = commands.add_parser("condition", help="condition a bba on a truth")
    sub.add_argument("file")
    sub.add_argument("--truth", required=True)
    sub.add_argument("--rule", required=True, help="BCR1..BCR31 or SCR")
    add_format(sub)
    sub.set_defaults(handler=cmd_condition)

    sub = commands.add_parser("fuse", help="combine two bbas")
    sub.add_argument("first")
    sub.add_argument("second")
    sub.add_argument("--rule", choices=[r.value for r in FusionRule], required=True)
    sub.add_argument("--normalize", action="store_true", help="divide out dsmc conflict")
    add_format(sub)
    sub.set_defaults(handler=cmd_fuse)

    sub = commands.add_parser("compare-commute", help="fusion-then-conditioning vs the reverse")
    sub.add_argument("first")
    sub.add_argument("second")
    sub.add_argument("--truth", required=True)
    sub.add_argument("--fusion", choices=[r.value for r in FusionRule], required=True)
    sub.add_argument("--bcr", required=True, help="BCR1..BCR31 or SCR")
    add_format(sub)
    sub.set_defaults(handler=cmd_compare_commute)

    sub = commands.add_parser("rules", help="print the conditioning rule table")
    add_format(sub)
    sub.set_defaults(handler=cmd_rules)

    sub = commands.add_parser("belief", help="Bel/Pl of every element")
    sub.add_argument("file")
    sub.add_argument("--truth", help="add Shafer-conditional Bel/Pl given this formula")
    add_format(sub)
    sub.set_defaults(handler=cmd_belief)

    return parser


def execute(argv: Sequence[str] | None = None) -> CommandResult:
    """Parse and run a command, turning library errors into exit codes."""
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            level=(args.log_level or get_settings().log_level).upper(),
            stream=sys.stderr,
        )
        result = args.handler(args)
    except ValidationError as exc:
        return CommandResult(EXIT_VALIDATION, f"error: {exc}\n")
    except ComputationError as exc:
        return CommandResult(EXIT_COMPUTATION, f"error: {exc}\n")
    except OSError as exc:
        return CommandResult(EXIT_VALIDATION, f"error: {exc}\n")
    if args.format == "csv":
        result.report = result.table or result.report
    return result


def main(argv: Sequence[str] | None = None) -> int:
    try:
        result = execute(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    stream = sys.stdout if result.exit_code == EXIT_OK else sys.stderr
    stream.write(result.report)
    return result.exit_code


def run() -> None:
    sys.exit(main())
