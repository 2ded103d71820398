"""Re-run every shipped golden check and report pass/fail per table.

Each check compares computed values with the values stored alongside the
fixture.  Cells listed under ``errata`` are compared with their derived
value instead of the printed one, and are reported on their own line so
the discrepancy stays visible.
"""

from __future__ import annotations

import json
import os
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

from .coding import huffman, shannon_literal_lengths
from .divergence import Measure
from .mcda import load_plan, load_table, run_plan, stage_sums
from .pmf import shannon_entropy, validate
from .scenarios import (
    CATEGORIES,
    CategoryBands,
    analyze_survey,
    category_benefit,
    load_bundle,
    read_survey_csv,
    run_scenario,
)

__all__ = ["CheckResult", "default_fixtures_dir", "reproduce_all"]

ENV_VAR = "DIVLAB_FIXTURES"


def default_fixtures_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else Path(__file__).with_name("fixtures")


@dataclass
class CheckResult:
    name: str
    max_deviation: float = 0.0
    cells: int = 0
    failures: list[str] = field(default_factory=list)
    errata: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def compare(self, label: str, got: float, want: float, tol: float) -> None:
        dev = abs(got - want)
        self.cells += 1
        self.max_deviation = max(self.max_deviation, dev)
        if not dev <= tol:
            self.failures.append(f"{label}: got {got:.6g}, expected {want:.6g} +/- {tol:g}")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.cells} cells, max deviation {self.max_deviation:.3g}"


def _errata_index(expected: dict) -> dict[tuple, dict]:
    out = {}
    for e in expected.get("errata", []):
        out[(e["quantity"], e.get("measure"), e.get("user"))] = e
    return out


def _check_bundle(path: Path) -> CheckResult:
    bundle = load_bundle(path)
    res = CheckResult(bundle.name)
    exp = dict(bundle.expected)
    errata = _errata_index(exp)
    rows = {(r.user, r.measure.label): r for r in run_scenario(bundle)}
    for quantity in ("divergence", "benefit"):
        block = exp.get(quantity)
        if not block:
            continue
        for m, per_user in block["values"].items():
            tol = block.get("tol_by_measure", {}).get(m, block["tol"])
            for user, want in per_user.items():
                row = rows[(user, Measure.parse(m).label)]
                got = row.divergence.total if quantity == "divergence" else row.benefit.benefit
                e = errata.get((quantity, m, user))
                if e is not None:
                    res.errata.append(
                        f"{bundle.name} {quantity} {m} {user}: printed {e['printed']}, "
                        f"computed {got:.4f} ({e['note']})"
                    )
                    want = e["derived"]
                    tol = max(tol, 5e-5)
                res.compare(f"{quantity} {m} {user}", got, want, tol)
    if "entropy" in exp:
        res.compare("entropy", shannon_entropy(bundle.ground_truth), exp["entropy"]["value"], exp["entropy"]["tol"])
    e = errata.get(("alphabet_compression", None, None))
    if e is not None:
        res.errata.append(f"{bundle.name} alphabet compression: printed {e['printed']}, "
                          f"computed {e['derived']} ({e['note']})")
    return res


def _check_london(root: Path) -> list[CheckResult]:
    meta = json.loads((root / "survey" / "london.json").read_text())
    exp = meta["expected"]
    hmax = meta["hmax"]

    cat = CheckResult("london-categories")
    cb = exp["category_benefit"]
    bands = CategoryBands(cb["xi"], meta["n"])
    for m, per_cat in cb["values"].items():
        for c, want in per_cat.items():
            cat.compare(f"{m} {c}", category_benefit(bands, c, m, hmax).benefit, want, cb["tol"])
    h = shannon_entropy(bands.ground_truth())
    cat.compare("entropy", h, exp["entropy"]["value"], exp["entropy"]["tol"])
    for e in exp.get("errata", []):
        cat.errata.append(f"london {e['quantity']}: printed {e['printed']}, computed {h:.4f} ({e['note']})")

    sv = exp["survey"]
    survey = CheckResult("london-survey")
    records = read_survey_csv(root / "survey" / sv["source"], meta["n"])
    qbands = {q: CategoryBands(v["xi"], meta["n"]) for q, v in meta["questions"].items()}
    measures = sorted({m for q in sv["questions"].values() for m in q["mean_benefit"]})
    reports = {m: analyze_survey(records, qbands, m, hmax=hmax) for m in measures}
    ratio_measure = Measure.parse(sv["ratio_measure"]).label
    for q, want in sv["questions"].items():
        counts = [reports[ratio_measure][q].counts[c] for c in CATEGORIES]
        if counts != want["counts"]:
            survey.failures.append(f"{q} counts: got {counts}, expected {want['counts']}")
        for m, v in want["mean_benefit"].items():
            survey.compare(f"{q} mean benefit {m}", reports[m][q].mean_benefit, v, sv["tol_benefit"])
        rep = reports[ratio_measure][q]
        survey.compare(f"{q} mean time", rep.mean_time, want["mean_time"], sv["tol_time"])
        survey.compare(f"{q} ratio", rep.ratio, want["ratio"], sv["tol_ratio"])
    return [cat, survey]


def _check_mcda(root: Path) -> CheckResult:
    path = root / "mcda" / "table3.json"
    table, plan = load_table(path), load_plan(path)
    exp = json.loads(path.read_text())["expected"]
    res = CheckResult("mcda-table3")
    result = run_plan(table, plan)
    by_stage = {a.stage: a for a in result.audit}
    for key, stage in (("stage2_sums", 2), ("stage3_sums", 3)):
        for cand, want in exp[key].items():
            res.compare(f"stage {stage} {cand}", by_stage[stage].sums[cand], want, 0)
    totals = stage_sums(table, candidates=list(exp["totals"]))
    for cand, want in exp["totals"].items():
        res.compare(f"total {cand}", totals[cand], want, 0)
    if result.winners != (exp["winner"],):
        res.failures.append(f"winner: got {result.winners}, expected {exp['winner']}")
    return res


def _check_coding(root: Path) -> CheckResult:
    data = json.loads((root / "coding" / "examples.json").read_text())
    res = CheckResult("coding-examples")
    for ex in data["examples"]:
        q = validate(ex["q"])
        exp, tol, name = ex["expected"], ex["tol"], ex["name"]
        code = huffman(q)
        lit = shannon_literal_lengths(q)
        res.compare(f"{name} huffman avg", code.average_length(q), exp["huffman_avg"], tol)
        res.compare(f"{name} shannon avg", lit.avg_length, exp["shannon_avg"], tol)
        res.compare(f"{name} entropy", shannon_entropy(q), exp["entropy"], tol)
        for key, got in (("huffman_lengths", code.lengths), ("shannon_lengths", lit.lengths)):
            if key in exp and list(got) != exp[key]:
                res.failures.append(f"{name} {key}: got {list(got)}, expected {exp[key]}")
        for e in ex.get("errata", []):
            res.errata.append(f"{name} {e['quantity']}: printed {e['printed']}, "
                              f"computed {shannon_entropy(q):.4f} ({e['note']})")
    return res


def reproduce_all(fixtures_dir: str | Path | None = None, emit: Callable[[str], None] = print) -> int:
    """Run every check, print one line per table and return an exit code.

    Returns 0 when every check passes, 1 when any fails and 2 when the
    fixture directory or one of its files is missing.
    """
    root = default_fixtures_dir() if fixtures_dir is None else Path(fixtures_dir)
    scen = sorted((root / "scenarios").glob("*.json")) if (root / "scenarios").is_dir() else []
    needed = [root / "survey" / "london.json", root / "mcda" / "table3.json", root / "coding" / "examples.json"]
    missing = [str(p) for p in needed if not p.is_file()]
    if not scen or missing:
        emit(f"missing fixtures under {root}: {', '.join(missing) or 'no scenario bundles'}")
        return 2

    results: list[CheckResult] = []
    try:
        results += [_check_bundle(p) for p in scen]
        results += _check_london(root)
        results.append(_check_mcda(root))
        results.append(_check_coding(root))
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        emit(f"unreadable fixture: {exc}")
        return 2

    for r in results:
        emit(r.line())
        for f in r.failures:
            emit(f"    {f}")
    errata = [e for r in results for e in r.errata]
    if errata:
        emit("errata (printed value differs from computed value):")
        for e in errata:
            emit(f"    {e}")
    failed = sum(not r.passed for r in results)
    emit(f"{len(results) - failed}/{len(results)} tables pass")
    return 0 if failed == 0 else 1
