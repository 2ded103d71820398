"""Staged multi-criteria scoring of candidate measures.

Scores are ordinal integers in [0, 5] supplied as data; this module only
adds them up and applies elimination rules stage by stage.  Importance
labels are carried as metadata: the default aggregation is an unweighted
sum.  Passing ``weights`` to :func:`stage_sums` switches to a weighted sum,
which is an extension and not used for the shipped table.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

from .errors import MissingScoreError, PlanError

__all__ = [
    "AuditEntry",
    "CriteriaTable",
    "Criterion",
    "EliminationPlan",
    "PlanResult",
    "RankedCandidate",
    "Stage",
    "load_plan",
    "load_table",
    "run_plan",
    "stage_sums",
]

IMPORTANCE_LEVELS = ("critical", "important", "helpful")

ELIMINATE_IF_ZERO_ON_CRITICAL = "eliminate-if-zero-on-critical"
KEEP_TOP_K_BY_SUM = "keep-top-k-by-sum"
ELIMINATE_NAMED = "eliminate-named"
RULES = (ELIMINATE_IF_ZERO_ON_CRITICAL, KEEP_TOP_K_BY_SUM, ELIMINATE_NAMED)


@dataclass(frozen=True)
class Criterion:
    name: str
    importance: str = "helpful"

    def __post_init__(self) -> None:
        if self.importance not in IMPORTANCE_LEVELS:
            raise PlanError(f"importance must be one of {IMPORTANCE_LEVELS}, got {self.importance!r}")


@dataclass(frozen=True)
class CriteriaTable:
    """``scores[i][j]`` is candidate ``j`` on criterion ``i``; ``None`` means not assessed."""

    criteria: tuple[Criterion, ...]
    candidates: tuple[str, ...]
    scores: tuple[tuple[int | None, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "scores", tuple(tuple(row) for row in self.scores))
        names = [c.name for c in self.criteria]
        if len(set(names)) != len(names):
            raise PlanError("criterion names must be unique")
        if len(set(self.candidates)) != len(self.candidates):
            raise PlanError("candidate names must be unique")
        if len(self.scores) != len(self.criteria):
            raise PlanError(f"{len(self.scores)} score rows for {len(self.criteria)} criteria")
        for name, row in zip(names, self.scores):
            if len(row) != len(self.candidates):
                raise PlanError(f"criterion {name!r} has {len(row)} scores for {len(self.candidates)} candidates")
            for v in row:
                if v is not None and (not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= 5):
                    raise PlanError(f"score {v!r} on {name!r} is not an integer in [0, 5]")

    @property
    def criterion_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.criteria)

    def criterion(self, name: str) -> Criterion:
        return self.criteria[self._row(name)]

    def _row(self, name: str) -> int:
        try:
            return self.criterion_names.index(name)
        except ValueError:
            raise PlanError(f"unknown criterion {name!r}") from None

    def score(self, criterion: str, candidate: str) -> int | None:
        try:
            col = self.candidates.index(candidate)
        except ValueError:
            raise PlanError(f"unknown candidate {candidate!r}") from None
        return self.scores[self._row(criterion)][col]

    @classmethod
    def from_dict(cls, data: Mapping) -> CriteriaTable:
        criteria = tuple(Criterion(c["name"], c.get("importance", "helpful")) for c in data["criteria"])
        return cls(criteria, tuple(data["candidates"]), tuple(tuple(r) for r in data["scores"]))

    def to_dict(self) -> dict:
        return {
            "criteria": [{"name": c.name, "importance": c.importance} for c in self.criteria],
            "candidates": list(self.candidates),
            "scores": [list(r) for r in self.scores],
        }


def stage_sums(
    table: CriteriaTable,
    criteria: Sequence[str] | None = None,
    candidates: Sequence[str] | None = None,
    weights: Mapping[str, float] | None = None,
) -> dict[str, float]:
    """Per-candidate sum of scores over ``criteria`` (all criteria by default).

    ``weights`` maps criterion names or importance labels to multipliers.
    Integers stay integers when no weights are given.

    Raises:
        MissingScoreError: a requested candidate was not assessed on one of
            the criteria.
    """
    crit = table.criterion_names if criteria is None else tuple(criteria)
    cands = table.candidates if candidates is None else tuple(candidates)
    sums: dict[str, float] = {}
    for cand in cands:
        total = 0
        for name in crit:
            v = table.score(name, cand)
            if v is None:
                raise MissingScoreError(f"{cand!r} has no score on criterion {name!r}")
            if weights is not None:
                c = table.criterion(name)
                w = weights.get(name, weights.get(c.importance, 1.0))
                total += w * v
            else:
                total += v
        sums[cand] = total
    return sums


@dataclass(frozen=True)
class Stage:
    criteria: tuple[str, ...]
    rule: str
    k: int | None = None
    names: tuple[str, ...] = ()
    note: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "names", tuple(self.names))
        if self.rule not in RULES:
            raise PlanError(f"unknown rule {self.rule!r}; expected one of {RULES}")
        if self.rule == KEEP_TOP_K_BY_SUM and (self.k is None or self.k < 0):
            raise PlanError("keep-top-k-by-sum needs k >= 0")


@dataclass(frozen=True)
class EliminationPlan:
    stages: tuple[Stage, ...] = ()

    def validate(self, table: CriteriaTable) -> None:
        known = set(table.criterion_names)
        for i, stage in enumerate(self.stages):
            missing = [c for c in stage.criteria if c not in known]
            if missing:
                raise PlanError(f"stage {i + 1} references unknown criteria {missing}")
            unknown = [n for n in stage.names if n not in table.candidates]
            if unknown:
                raise PlanError(f"stage {i + 1} names unknown candidates {unknown}")

    @classmethod
    def from_dict(cls, data: Mapping) -> EliminationPlan:
        stages = []
        for s in data.get("stages", []):
            stages.append(
                Stage(
                    tuple(s["criteria"]),
                    s["rule"],
                    k=s.get("k"),
                    names=tuple(s.get("names", ())),
                    note=s.get("note", ""),
                )
            )
        return cls(tuple(stages))


@dataclass(frozen=True)
class AuditEntry:
    stage: int
    rule: str
    criteria: tuple[str, ...]
    sums: dict[str, float]
    eliminated: tuple[str, ...]
    survivors: tuple[str, ...]
    note: str = ""


@dataclass(frozen=True)
class RankedCandidate:
    name: str
    rank: int
    stage_sum: float
    total_sum: float


@dataclass(frozen=True)
class PlanResult:
    ranking: tuple[RankedCandidate, ...]
    audit: tuple[AuditEntry, ...]

    @property
    def survivors(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.ranking)

    @property
    def winners(self) -> tuple[str, ...]:
        """All candidates sharing rank 1; ties are not broken."""
        return tuple(r.name for r in self.ranking if r.rank == 1)


def _zero_on_critical(table: CriteriaTable, stage: Stage, alive: Sequence[str]) -> list[str]:
    out = []
    for cand in alive:
        for name in stage.criteria:
            if table.criterion(name).importance != "critical":
                continue
            v = table.score(name, cand)
            if v is None:
                raise MissingScoreError(f"{cand!r} has no score on criterion {name!r}")
            if v == 0:
                out.append(cand)
                break
    return out


def _competition_ranks(sums: Mapping[str, float], order: Sequence[str]) -> list[tuple[str, int]]:
    ranked = sorted(order, key=lambda c: (-sums[c], order.index(c)))
    out, prev, rank = [], None, 0
    for i, cand in enumerate(ranked):
        if sums[cand] != prev:
            rank, prev = i + 1, sums[cand]
        out.append((cand, rank))
    return out


def _assessed_total(table: CriteriaTable, cand: str) -> float:
    return sum(v for name in table.criterion_names if (v := table.score(name, cand)) is not None)


def run_plan(table: CriteriaTable, plan: EliminationPlan) -> PlanResult:
    """Apply ``plan`` stage by stage.

    Each stage sums the surviving candidates over its criteria, then removes
    candidates per its rule.  The survivors of the last stage are ranked by
    that stage's sums (by the sum over every assessed criterion when the plan
    is empty), with tied candidates sharing a rank.
    """
    plan.validate(table)
    alive = list(table.candidates)
    audit: list[AuditEntry] = []
    last_sums: dict[str, float] | None = None
    for i, stage in enumerate(plan.stages, start=1):
        if stage.rule == ELIMINATE_IF_ZERO_ON_CRITICAL:
            # candidates zeroed on a critical criterion are dropped before summing
            gone = _zero_on_critical(table, stage, alive)
            kept = [c for c in alive if c not in gone]
            sums = stage_sums(table, stage.criteria, alive)
        elif stage.rule == ELIMINATE_NAMED:
            sums = stage_sums(table, stage.criteria, alive)
            gone = [c for c in alive if c in stage.names]
            kept = [c for c in alive if c not in gone]
        else:
            sums = stage_sums(table, stage.criteria, alive)
            if stage.k == 0 or not alive:
                kept = []
            else:
                ordered = sorted((sums[c] for c in alive), reverse=True)
                cutoff = ordered[min(stage.k, len(ordered)) - 1]
                kept = [c for c in alive if sums[c] >= cutoff]
            gone = [c for c in alive if c not in kept]
        audit.append(AuditEntry(i, stage.rule, stage.criteria, sums, tuple(gone), tuple(kept), stage.note))
        alive = kept
        last_sums = {c: sums[c] for c in kept}

    totals = {c: _assessed_total(table, c) for c in alive}
    final = totals if last_sums is None else last_sums
    ranking = tuple(
        RankedCandidate(c, rank, final[c], totals[c]) for c, rank in _competition_ranks(final, alive)
    )
    return PlanResult(ranking, tuple(audit))


def load_table(path: str | Path) -> CriteriaTable:
    return CriteriaTable.from_dict(json.loads(Path(path).read_text()))


def load_plan(path: str | Path) -> EliminationPlan:
    """Read the ``"plan"`` block of a table file, or a bare plan file."""
    data = json.loads(Path(path).read_text())
    return EliminationPlan.from_dict(data.get("plan", data))
