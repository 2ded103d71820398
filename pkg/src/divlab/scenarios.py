"""Scenario bundles and survey ingestion.

A :class:`ScenarioBundle` pairs a ground-truth PMF with the output of a
lossy process and the PMFs with which users reconstructed the ground truth.
Running it evaluates every user against the ground truth under each
measure.

The metro-map survey is handled by :class:`CategoryBands`, which sorts
integer walking-time answers into *spot on*, *close* and *wild guess* bands
around the reference estimate, and :func:`analyze_survey`, which averages the
per-band benefit over respondents and divides by mean response time.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .costbenefit import BenefitBreakdown, benefit, ratio
from .divergence import Measure, compute, DivergenceResult
from .errors import (
    AlphabetMismatchError,
    AnswerOutOfRangeError,
    DivlabError,
    UnknownQuestionError,
)
from .pmf import Pmf, london_band_edges, one_hot, piecewise_london_pmf, shannon_entropy, validate

log = logging.getLogger(__name__)

__all__ = [
    "CATEGORIES",
    "CategoryBands",
    "QuestionReport",
    "ScenarioBundle",
    "ScenarioRow",
    "SurveyRecord",
    "analyze_survey",
    "categorize_answer",
    "category_benefit",
    "load_bundle",
    "read_survey_csv",
    "run_scenario",
]

SPOT_ON = "spot_on"
CLOSE = "close"
WILD_GUESS = "wild_guess"
CATEGORIES = (SPOT_ON, CLOSE, WILD_GUESS)

LONDON_N = 256
LONDON_HMAX = 8.0


@dataclass(frozen=True)
class User:
    label: str
    pmf: Pmf


@dataclass(frozen=True)
class ScenarioBundle:
    """Ground truth, process output and user reconstructions for one case.

    ``process_output`` may be ``None`` when only divergences are wanted;
    benefits are then skipped.  ``hmax`` overrides ``log2 n`` of the ground
    truth alphabet as the distortion scale.
    """

    name: str
    ground_truth: Pmf
    users: tuple[User, ...]
    measures: tuple[Measure, ...]
    process_output: Pmf | None = None
    hmax: float | None = None
    description: str = ""
    expected: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        for u in self.users:
            if u.pmf.alphabet != self.ground_truth.alphabet:
                raise AlphabetMismatchError(
                    f"user {u.label!r} is not on the ground-truth alphabet of {self.name!r}"
                )
        if self.hmax is not None and self.hmax < shannon_entropy(self.ground_truth) - 1e-12:
            raise DivlabError(f"hmax {self.hmax} is below H(ground truth) in {self.name!r}")

    def user(self, label: str) -> User:
        for u in self.users:
            if u.label == label:
                return u
        raise KeyError(label)

    @classmethod
    def from_dict(cls, data: Mapping) -> ScenarioBundle:
        gt = _pmf_field(data["ground_truth"])
        users = tuple(User(u["label"], _user_pmf(u, gt)) for u in data["users"])
        out = data.get("process_output")
        return cls(
            name=data["name"],
            ground_truth=gt,
            users=users,
            measures=tuple(Measure.parse(m) for m in data.get("measures", ["js"])),
            process_output=None if out is None else _pmf_field(out),
            hmax=data.get("hmax"),
            description=data.get("description", ""),
            expected=data.get("expected", {}),
        )


def _pmf_field(spec: Mapping) -> Pmf:
    """Decode a PMF object, including the compact forms used by fixtures.

    Besides ``{"letters": [...], "p": [...]}`` the fixtures use
    ``{"london_xi": 20}`` for the metro walking-time PMF and
    ``{"blocks": [[count, prob], ...], "letters": [...]}`` for long PMFs made
    of runs of equal probability.
    """
    if "london_xi" in spec:
        return piecewise_london_pmf(int(spec["london_xi"]), int(spec.get("n", LONDON_N)))
    if "blocks" in spec:
        p: list[float] = []
        for count, prob in spec["blocks"]:
            p.extend([float(prob)] * int(count))
        return validate(p, letters=spec.get("letters"))
    if "one_hot" in spec:
        letters = spec["letters"]
        return one_hot(letters, list(letters).index(spec["one_hot"]))
    return validate(spec["p"], letters=spec.get("letters"))


def _user_pmf(spec: Mapping, gt: Pmf) -> Pmf:
    if "one_hot" in spec:
        return one_hot(gt.alphabet, gt.alphabet.index(str(spec["one_hot"])))
    return validate(spec["p"], letters=gt.alphabet)


def load_bundle(path: str | Path) -> ScenarioBundle:
    return ScenarioBundle.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ScenarioRow:
    user: str
    measure: Measure
    divergence: DivergenceResult
    benefit: BenefitBreakdown | None

    def to_dict(self) -> dict:
        return {
            "user": self.user,
            "measure": self.measure.label,
            "divergence": self.divergence.to_dict(),
            "benefit": None if self.benefit is None else self.benefit.to_dict(),
        }


def run_scenario(bundle: ScenarioBundle, measures: Sequence[Measure | str] | None = None) -> list[ScenarioRow]:
    """Divergence of each user's reconstruction from the ground truth.

    Rows come user-major in bundle order.  Benefits are computed for KL and
    the bounded entropic measures when the bundle has a process output.
    """
    ms = bundle.measures if measures is None else tuple(
        Measure.parse(m) if isinstance(m, str) else m for m in measures
    )
    rows = []
    for u in bundle.users:
        for m in ms:
            div = compute(m, u.pmf, bundle.ground_truth)
            b = None
            if bundle.process_output is not None and (m.kind == "kl" or m.is_bounded_entropic):
                b = benefit(bundle.ground_truth, bundle.process_output, u.pmf, m, bundle.hmax)
            rows.append(ScenarioRow(u.label, m, div, b))
    return rows


# ----------------------------------------------------------------------
# Metro-map survey


@dataclass(frozen=True)
class CategoryBands:
    """Answer bands around the reference estimate ``xi`` on letters ``1..n``.

    spot on: ``xi-2 .. xi+2``; close: ``xi-7 .. xi-3`` and ``xi+3 .. xi+12``;
    wild guess: everything else.
    """

    xi: int
    n: int = LONDON_N

    def __post_init__(self) -> None:
        london_band_edges(self.xi, self.n)

    @property
    def ranges(self) -> dict[str, list[tuple[int, int]]]:
        return london_band_edges(self.xi, self.n)

    def categorize(self, answer: int) -> str:
        if not 1 <= answer <= self.n:
            raise AnswerOutOfRangeError(f"answer {answer} outside [1, {self.n}]")
        for cat in (SPOT_ON, CLOSE):
            if any(lo <= answer <= hi for lo, hi in self.ranges[cat]):
                return cat
        return WILD_GUESS

    def representative(self, category: str) -> int:
        """Letter used to stand for a whole band.

        ``xi`` for spot on, ``xi + 3`` for close and, for wild guesses, the
        letter farthest from ``xi``.
        """
        if category == SPOT_ON:
            return self.xi
        if category == CLOSE:
            return self.xi + 3
        if category == WILD_GUESS:
            return self.n if self.n - self.xi >= self.xi - 1 else 1
        raise ValueError(f"unknown category {category!r}")

    def ground_truth(self) -> Pmf:
        return piecewise_london_pmf(self.xi, self.n)


def categorize_answer(answer: int, bands: CategoryBands) -> str:
    return bands.categorize(answer)


def category_benefit(
    bands: CategoryBands,
    category: str,
    measure: Measure | str,
    hmax: float = LONDON_HMAX,
) -> BenefitBreakdown:
    """Benefit of a deterministic answer at the band's representative letter.

    The process output is taken to be deterministic (entropy 0).
    """
    gt = bands.ground_truth()
    answer = one_hot(gt.alphabet, bands.representative(category) - 1)
    return benefit(gt, 0.0, answer, measure, hmax)


@dataclass(frozen=True)
class SurveyRecord:
    """One answer to one question.

    ``category`` optionally pins the band as published with the source
    data; it takes precedence over the band rule unless analysis is run in
    strict mode.
    """

    surveyee: str
    question: str
    answer: int
    response_time: float
    category: str | None = None

    def __post_init__(self) -> None:
        if self.answer < 1:
            raise AnswerOutOfRangeError(f"answer must be >= 1, got {self.answer}")
        if not self.response_time > 0:
            raise DivlabError(f"response time must be positive, got {self.response_time}")
        if self.category is not None and self.category not in CATEGORIES:
            raise DivlabError(f"unknown category {self.category!r}")


def read_survey_csv(path: str | Path, n: int = LONDON_N) -> list[SurveyRecord]:
    """Parse ``surveyee,question,answer_minutes,response_time_seconds[,category]``.

    Answers above ``n`` are clamped to ``n`` with a warning.
    """
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"surveyee", "question", "answer_minutes", "response_time_seconds"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise DivlabError(f"survey CSV header must contain {sorted(need)}")
        for row in reader:
            answer = int(row["answer_minutes"])
            if answer > n:
                log.warning("answer %d for %s/%s clamped to %d", answer, row["surveyee"], row["question"], n)
                answer = n
            category = (row.get("category") or "").strip() or None
            records.append(
                SurveyRecord(
                    row["surveyee"],
                    row["question"],
                    answer,
                    float(row["response_time_seconds"]),
                    category,
                )
            )
    return records


@dataclass(frozen=True)
class QuestionReport:
    question: str
    counts: dict[str, int]
    category_benefits: dict[str, float]
    mean_benefit: float
    mean_time: float
    breakdown: BenefitBreakdown

    @property
    def ratio(self) -> float:
        return self.breakdown.ratio

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "counts": dict(self.counts),
            "category_benefits": dict(self.category_benefits),
            "mean_benefit": self.mean_benefit,
            "mean_time": self.mean_time,
            "ratio": self.ratio,
        }


def analyze_survey(
    records: Iterable[SurveyRecord],
    bands: Mapping[str, CategoryBands],
    measure: Measure | str,
    strict: bool = False,
    hmax: float = LONDON_HMAX,
) -> dict[str, QuestionReport]:
    """Per-question category counts, mean benefit, mean time and ratio.

    Mean benefit is the count-weighted average of :func:`category_benefit`;
    the ratio divides it by the mean response time.  With ``strict=True``
    recorded categories are ignored and every answer is re-banded.
    """
    if isinstance(measure, str):
        measure = Measure.parse(measure)
    grouped: dict[str, list[SurveyRecord]] = {}
    for r in records:
        if r.question not in bands:
            raise UnknownQuestionError(f"no bands for question {r.question!r}")
        grouped.setdefault(r.question, []).append(r)

    reports = {}
    for question in sorted(grouped, key=_question_key):
        recs = grouped[question]
        b = bands[question]
        cats = [
            r.category if (r.category is not None and not strict) else b.categorize(min(r.answer, b.n))
            for r in recs
        ]
        counts = Counter(cats)
        per_cat = {c: category_benefit(b, c, measure, hmax) for c in CATEGORIES}
        total = len(recs)
        w = {c: counts.get(c, 0) / total for c in CATEGORIES}
        mean_ac = sum(w[c] * per_cat[c].alphabet_compression for c in CATEGORIES)
        mean_pd = sum(w[c] * per_cat[c].potential_distortion for c in CATEGORIES)
        mean_div = sum(w[c] * per_cat[c].divergence for c in CATEGORIES)
        mean_benefit = sum(w[c] * per_cat[c].benefit for c in CATEGORIES)
        mean_time = math.fsum(r.response_time for r in recs) / total
        avg = BenefitBreakdown(mean_ac, mean_pd, mean_benefit, hmax, measure, mean_div)
        reports[question] = QuestionReport(
            question,
            {c: counts.get(c, 0) for c in CATEGORIES},
            {c: per_cat[c].benefit for c in CATEGORIES},
            mean_benefit,
            mean_time,
            ratio(avg, mean_time),
        )
    return reports


def _question_key(q: str):
    digits = "".join(ch for ch in q if ch.isdigit())
    return (int(digits) if digits else math.inf, q)
