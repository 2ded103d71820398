"""Command-line interface.

Every subcommand builds a :class:`Table` and renders it as an aligned text
table, CSV or JSON.  Text and CSV round numbers to ``--digits`` significant
digits; JSON always carries full-precision floats (``"inf"`` for infinity).

Exit codes: 0 on success, 1 on a usage or validation error, 2 when a file
cannot be read or written.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .coding import bound_report, conceptual_cross_entropy, unary_code, huffman, shannon_literal_lengths
from .costbenefit import benefit
from .curves import DEFAULT_ALPHAS, CurveSpec, linear_grid, near_zero_sweep, sweep
from .divergence import Measure, compute
from .errors import DivlabError, NonPositiveCostError
from .mcda import EliminationPlan, load_plan, load_table, run_plan
from .pmf import JointPmf, one_hot, read_pmf, shannon_entropy, worst_case_pmf
from .reproduce import default_fixtures_dir, reproduce_all
from .scenarios import CATEGORIES, CategoryBands, analyze_survey, load_bundle, read_survey_csv, run_scenario

FORMATS = ("table", "csv", "json")


class UsageError(DivlabError):
    pass


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    title: str = ""
    # a single-cell table prints as a bare value in text mode
    scalar: bool = False


def _fmt_number(v: float, digits: int) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    s = f"{v:.{digits}g}"
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _cell(v, digits: int) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, float):
        return _fmt_number(v, digits)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return v


def render(tables: Sequence[Table], fmt: str, digits: int) -> str:
    if fmt == "json":
        payload = [
            {"title": t.title, "rows": [{c: _json_value(v) for c, v in zip(t.columns, r)} for r in t.rows]}
            for t in tables
        ]
        return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n"
    out = io.StringIO()
    for i, t in enumerate(tables):
        cells = [[_cell(v, digits) for v in r] for r in t.rows]
        if fmt == "csv":
            if i:
                out.write("\n")
            out.write(",".join(t.columns) + "\n")
            for r in cells:
                out.write(",".join(r) + "\n")
            continue
        if t.scalar and len(cells) == 1 and len(cells[0]) == 1:
            out.write(cells[0][0] + "\n")
            continue
        if i:
            out.write("\n")
        if t.title:
            out.write(t.title + "\n")
        widths = [max(len(c), *(len(r[j]) for r in cells)) if cells else len(c) for j, c in enumerate(t.columns)]
        out.write("  ".join(c.ljust(w) for c, w in zip(t.columns, widths)).rstrip() + "\n")
        for r in cells:
            out.write("  ".join(v.rjust(w) if _numeric(v) else v.ljust(w) for v, w in zip(r, widths)).rstrip() + "\n")
    return out.getvalue()


def _numeric(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


# ----------------------------------------------------------------------
# subcommands


def _measures(args) -> list[Measure]:
    return [Measure.parse(m) for m in (args.measure or [])]


def cmd_entropy(args) -> list[Table]:
    p = read_pmf(args.p)
    return [Table(["entropy"], [[shannon_entropy(p)]], "entropy (bits)", scalar=True)]


def cmd_divergence(args) -> list[Table]:
    p, q = read_pmf(args.p), read_pmf(args.q)
    joint = JointPmf(p.alphabet, json.loads(Path(args.joint).read_text())["r"]) if args.joint else None
    results = [compute(m, p, q, joint) for m in _measures(args)]
    if args.per_letter:
        rows = [[r.measure.label, x, float(v)] for r in results for x, v in zip(r.letters, r.per_letter)]
        rows += [[r.measure.label, "total", r.total] for r in results]
        return [Table(["measure", "letter", "value"], rows, "per-letter divergence")]
    rows = [[r.measure.label, r.total] for r in results]
    if len(rows) == 1:
        return [Table(["divergence"], [[rows[0][1]]], rows[0][0], scalar=True)]
    return [Table(["measure", "divergence"], rows, "divergence")]


def cmd_benefit(args) -> list[Table]:
    gt, rec = read_pmf(args.input), read_pmf(args.reconstruction)
    if (args.process_output is None) == (args.output_entropy is None):
        raise UsageError("give exactly one of --process-output and --output-entropy")
    out = args.output_entropy if args.process_output is None else read_pmf(args.process_output)
    rows = []
    for m in _measures(args):
        b = benefit(gt, out, rec, m, args.hmax)
        rows.append([m.label, b.alphabet_compression, b.divergence, b.potential_distortion, b.hmax, b.benefit])
    return [Table(["measure", "alphabet_compression", "divergence", "potential_distortion", "hmax", "benefit"], rows, "benefit")]


def cmd_ratio(args) -> list[Table]:
    if not args.cost > 0:
        raise NonPositiveCostError(f"--cost must be positive, got {args.cost!r}")
    return [Table(["ratio"], [[args.benefit / args.cost]], "benefit per unit cost", scalar=True)]


def cmd_curve(args) -> list[Table]:
    alphas = DEFAULT_ALPHAS if args.alphas is None else tuple(float(a) for a in args.alphas.split(","))
    grid = tuple(linear_grid(args.points))
    tables = [sweep(CurveSpec(m, alphas, grid, args.direction)) for m in _measures(args)]
    cols = {k: v for t in tables for k, v in t.columns.items()}
    base = tables[0]
    rows = [[float(a), float(p), float(q), *(float(cols[c][i]) for c in cols)]
            for i, (a, p, q) in enumerate(zip(base.alpha, base.p1, base.q1))]
    return [Table(["alpha", "p1", "q1", *cols], rows, "curve sweep")]


def cmd_nearzero(args) -> list[Table]:
    t = near_zero_sweep(_measures(args), (args.lo, args.hi), args.points_per_decade, args.direction)
    rows = [[float(x) for x in r] for r in t.rows()]
    return [Table(["alpha", "p1", "q1", *t.columns], rows, "near-zero sweep")]


def cmd_huffman(args) -> list[Table]:
    q = read_pmf(args.q)
    code = huffman(q)
    rows = [[x, float(v), w, len(w)] for x, v, w in zip(q.letters, q.p, code.codewords)]
    tables = [Table(["letter", "probability", "codeword", "length"], rows, "huffman code")]
    if args.stats:
        h = shannon_entropy(q)
        avg = code.average_length(q)
        stats = [["entropy", h], ["huffman_avg_length", avg], ["max_length", code.max_length],
                 ["kraft_sum", code.kraft_sum()]]
        if all(v > 0 for v in q.p):
            lit = shannon_literal_lengths(q)
            stats += [["shannon_avg_length", lit.avg_length],
                      ["shannon_lengths", " ".join(map(str, lit.lengths))]]
        stats.append(["sandwich_holds", h <= avg + 1e-12 and avg < h + 1])
        if args.p:
            stats.append(["conceptual_cross_entropy", conceptual_cross_entropy(read_pmf(args.p), code)])
        tables.append(Table(["statistic", "value"], stats, "statistics"))
    return tables


def cmd_worstcase(args) -> list[Table]:
    n = args.n
    eps = args.eps if args.eps is not None else 2.0 ** -(n + 1)
    q = worst_case_pmf(n, eps)
    code = huffman(q)
    unary = unary_code(n)
    rows = [[x, float(v), w, u] for x, v, w, u in zip(q.letters, q.p, code.codewords, unary.codewords)]
    ce = conceptual_cross_entropy(one_hot(q.alphabet, n - 1), code)
    tables = [
        Table(["letter", "probability", "huffman", "unary"], rows, f"worst-case PMF, n={n}, eps={eps:g}"),
        Table(["statistic", "value"], [["max_length", code.max_length], ["bound", n - 1],
                                       ["cross_entropy_one_hot_last", ce]], "bound"),
    ]
    if args.trials:
        r = bound_report(n, args.trials, args.seed)
        tables.append(Table(
            ["n", "trials", "seed", "max_cross_entropy", "max_kl", "max_codeword_length", "bound", "passed"],
            [[r.n, r.trials, r.seed, r.max_cross_entropy, r.max_kl, r.max_codeword_length, r.bound, r.passed]],
            "random trials"))
    return tables


def cmd_mcda(args) -> list[Table]:
    table = load_table(args.table)
    if args.plan:
        plan = load_plan(args.plan)
    elif args.no_plan:
        plan = EliminationPlan()
    else:
        plan = load_plan(args.table)
    result = run_plan(table, plan)
    audit = [[a.stage, a.rule, " ".join(f"{c}={a.sums[c]:g}" for c in a.sums), " ".join(a.eliminated) or "-"]
             for a in result.audit]
    ranking = [[r.rank, r.name, r.stage_sum, r.total_sum] for r in result.ranking]
    return [Table(["stage", "rule", "sums", "eliminated"], audit, "audit"),
            Table(["rank", "candidate", "stage_sum", "total_sum"], ranking, "ranking")]


def _bundle_path(name: str) -> Path:
    p = Path(name)
    if p.suffix == ".json" and p.exists():
        return p
    candidate = default_fixtures_dir() / "scenarios" / f"{name}.json"
    if not candidate.exists():
        raise FileNotFoundError(f"no scenario named {name!r} (looked for {candidate})")
    return candidate


def cmd_scenario(args) -> list[Table]:
    if args.action == "list":
        rows = []
        for path in sorted((default_fixtures_dir() / "scenarios").glob("*.json")):
            b = load_bundle(path)
            rows.append([b.name, len(b.users), " ".join(m.label for m in b.measures), b.description])
        return [Table(["name", "users", "measures", "description"], rows, "scenarios")]
    if not args.name:
        raise UsageError("scenario run needs a NAME")
    bundle = load_bundle(_bundle_path(args.name))
    rows = []
    for r in run_scenario(bundle, _measures(args) or None):
        rows.append([r.user, r.measure.label, r.divergence.total, None if r.benefit is None else r.benefit.benefit])
    return [Table(["user", "measure", "divergence", "benefit"], rows, bundle.name)]


def cmd_survey(args) -> list[Table]:
    meta_path = Path(args.questions) if args.questions else default_fixtures_dir() / "survey" / "london.json"
    meta = json.loads(meta_path.read_text())
    n = int(meta.get("n", 256))
    bands = {q: CategoryBands(int(v["xi"]), n) for q, v in meta["questions"].items()}
    records = read_survey_csv(args.records, n)
    reports = analyze_survey(records, bands, args.measure, strict=args.strict, hmax=float(meta.get("hmax", 8.0)))
    rows = [[q, *(r.counts[c] for c in CATEGORIES), r.mean_benefit, r.mean_time, r.ratio] for q, r in reports.items()]
    return [Table(["question", *CATEGORIES, "mean_benefit", "mean_time", "ratio"], rows,
                  f"survey ({Measure.parse(args.measure).label})")]


# ----------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default="table", help="output format (default: table)")
    p.add_argument("--digits", type=int, default=6, help="significant digits for text and CSV output")
    p.add_argument("-o", "--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="divlab", description="Bounded divergence measures and information-theoretic cost-benefit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("entropy", help="Shannon entropy of a PMF")
    p.add_argument("--p", required=True, help="PMF file (JSON or CSV)")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("divergence", help="divergence of P from Q")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--measure", action="append", required=True, help="measure id; repeatable")
    p.add_argument("--joint", help='JSON file {"r": [[...], ...]} for the cond measure')
    p.add_argument("--per-letter", action="store_true", help="show per-letter terms")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("benefit", help="alphabet compression minus potential distortion")
    p.add_argument("--input", required=True, help="ground-truth PMF")
    p.add_argument("--reconstruction", required=True, help="the user's reconstruction PMF")
    p.add_argument("--process-output", help="PMF produced by the process")
    p.add_argument("--output-entropy", type=float, help="entropy of the process output, in bits")
    p.add_argument("--measure", action="append", help="kl, js, dnew:k=K or dncm:k=K; repeatable (default dnew:k=2)")
    p.add_argument("--hmax", type=float, help="distortion scale (default log2 of the alphabet size)")
    p.set_defaults(func=cmd_benefit)

    p = sub.add_parser("ratio", help="benefit divided by cost")
    p.add_argument("--benefit", type=float, required=True)
    p.add_argument("--cost", type=float, required=True)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("curve", help="sweep the two-letter family over alpha and p1")
    p.add_argument("--measure", action="append", required=True)
    p.add_argument("--alphas", help="comma-separated alpha values (default 0,0.1,...,1)")
    p.add_argument("--points", type=int, default=1001, help="linear p1 grid size")
    p.add_argument("--direction", choices=("pq", "qp"), default="pq")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("nearzero", help="sweep alpha=1 on a log grid of p1 near zero")
    p.add_argument("--measure", action="append", required=True)
    p.add_argument("--lo", type=float, default=1e-10)
    p.add_argument("--hi", type=float, default=0.1)
    p.add_argument("--points-per-decade", type=int, default=20)
    p.add_argument("--direction", choices=("pq", "qp"), default="pq")
    p.set_defaults(func=cmd_nearzero)

    p = sub.add_parser("huffman", help="Huffman code for a PMF")
    p.add_argument("--q", required=True)
    p.add_argument("--p", help="PMF whose letters are sent through the code, for --stats")
    p.add_argument("--stats", action="store_true", help="add entropy, average lengths and the sandwich check")
    p.set_defaults(func=cmd_huffman)

    p = sub.add_parser("worstcase", help="worst-case PMF and the n-1 codeword bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, help="mass of the last letter (default 2^-(n+1))")
    p.add_argument("--trials", type=int, default=0, help="also check the bound on random PMF pairs")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_worstcase)

    p = sub.add_parser("mcda", help="staged elimination over a criteria table")
    p.add_argument("--table", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--plan", help="plan file (default: the table's own plan block)")
    g.add_argument("--no-plan", action="store_true", help="rank every candidate by total score")
    p.set_defaults(func=cmd_mcda)

    p = sub.add_parser("scenario", help="list or run shipped scenario bundles")
    p.add_argument("action", choices=("list", "run"))
    p.add_argument("name", nargs="?", help="bundle name or path to a bundle JSON")
    p.add_argument("--measure", action="append", help="override the bundle's measures")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("survey", help="category counts, mean benefit and cost-benefit ratio per question")
    p.add_argument("--records", required=True, help="survey CSV")
    p.add_argument("--questions", help="question metadata JSON (default: shipped walking-time questions)")
    p.add_argument("--measure", default="dnew:k=2")
    p.add_argument("--strict", action="store_true", help="ignore recorded categories and re-band every answer")
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("reproduce", help="re-run every golden check on the shipped fixtures")
    p.add_argument("--fixtures", help="fixture directory (default: $DIVLAB_FIXTURES or the shipped set)")
    p.set_defaults(func=None)

    for name, sp in sub.choices.items():
        if name != "reproduce":
            _common(sp)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "reproduce":
            return reproduce_all(args.fixtures)
        if getattr(args, "measure", None) is None and args.command == "benefit":
            args.measure = ["dnew:k=2"]
        if args.digits < 1:
            raise UsageError("--digits must be at least 1")
        text = render(args.func(args), args.format, args.digits)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"divlab: {exc}", file=sys.stderr)
        return 2
    except (DivlabError, ValueError, KeyError) as exc:
        print(f"divlab: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
