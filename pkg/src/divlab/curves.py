"""Parametric sweeps over the two-letter family of PMF pairs.

``P = {p1, 1 - p1}`` and ``Q = {q1, 1 - q1}`` with
``q1 = (1 - alpha) p1 + alpha (1 - p1)``: ``alpha = 0`` makes ``Q == P`` and
``alpha = 1`` mirrors ``Q`` to ``{1 - p1, p1}``.  The output tables are
plot-ready; nothing here draws.
"""

from __future__ import annotations

import io
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .divergence import Measure, compute
from .errors import GridEmptyError
from .pmf import Alphabet, Pmf

__all__ = [
    "CurveSpec",
    "CurveTable",
    "DEFAULT_ALPHAS",
    "linear_grid",
    "log_grid",
    "mirror_q1",
    "near_zero_sweep",
    "sweep",
]

_BINARY = Alphabet(("z1", "z2"))
DEFAULT_ALPHAS = tuple(round(0.1 * i, 1) for i in range(11))


def mirror_q1(alpha: float, p1: float) -> float:
    return (1.0 - alpha) * p1 + alpha * (1.0 - p1)


def linear_grid(count: int = 1001) -> np.ndarray:
    if count < 1:
        raise GridEmptyError("grid needs at least one point")
    if count == 1:
        return np.array([0.5])
    return np.linspace(0.0, 1.0, count)


def log_grid(lo: float = 1e-10, hi: float = 0.1, points_per_decade: int = 20) -> np.ndarray:
    """Log-spaced points from ``lo`` to ``hi`` inclusive."""
    if points_per_decade < 1 or not 0 < lo < hi:
        raise GridEmptyError(f"empty log grid for [{lo}, {hi}] at {points_per_decade}/decade")
    decades = math.log10(hi / lo)
    count = max(2, int(round(decades * points_per_decade)) + 1)
    return np.logspace(math.log10(lo), math.log10(hi), count)


def _binary(x: float) -> Pmf:
    return Pmf(_BINARY, np.array([x, 1.0 - x]))


@dataclass(frozen=True)
class CurveSpec:
    """One measure evaluated over ``alphas x p1_grid``.

    ``direction="pq"`` evaluates ``D(P || Q)``; ``"qp"`` swaps the arguments.
    """

    measure: Measure
    alphas: Sequence[float] = DEFAULT_ALPHAS
    p1_grid: Sequence[float] = field(default_factory=lambda: tuple(linear_grid()))
    direction: str = "pq"

    def __post_init__(self) -> None:
        if isinstance(self.measure, str):
            object.__setattr__(self, "measure", Measure.parse(self.measure))
        alphas = tuple(float(a) for a in self.alphas)
        grid = tuple(float(x) for x in self.p1_grid)
        if not alphas or not grid:
            raise GridEmptyError("alpha list and p1 grid must be non-empty")
        if any(not 0.0 <= a <= 1.0 for a in alphas):
            raise GridEmptyError("alpha values must lie in [0, 1]")
        if any(not 0.0 <= x <= 1.0 for x in grid):
            raise GridEmptyError("p1 values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise GridEmptyError("p1 grid must be strictly increasing")
        if self.direction not in ("pq", "qp"):
            raise ValueError(f"direction must be 'pq' or 'qp', got {self.direction!r}")
        object.__setattr__(self, "alphas", tuple(sorted(alphas)))
        object.__setattr__(self, "p1_grid", grid)


@dataclass(frozen=True, eq=False)
class CurveTable:
    """Rows of ``(alpha, p1, q1)`` with one value column per measure."""

    alpha: np.ndarray
    p1: np.ndarray
    q1: np.ndarray
    columns: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.alpha)

    def column(self, measure: Measure | str) -> np.ndarray:
        key = measure.label if isinstance(measure, Measure) else Measure.parse(measure).label
        return self.columns[key]

    def rows(self):
        names = list(self.columns)
        for i in range(len(self)):
            yield (self.alpha[i], self.p1[i], self.q1[i], *(self.columns[c][i] for c in names))

    def to_csv(self, digits: int | None = None) -> str:
        """CSV text with header ``alpha,p1,q1,<measure>...``; infinities print as ``inf``."""
        out = io.StringIO()
        out.write(",".join(["alpha", "p1", "q1", *self.columns]) + "\n")
        for row in self.rows():
            out.write(",".join(_cell(v, digits) for v in row) + "\n")
        return out.getvalue()


def _cell(v: float, digits: int | None) -> str:
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if digits is None:
        return repr(v)
    return f"{v:.{digits}g}"


def _value(measure: Measure, p1: float, q1: float, direction: str) -> float:
    p, q = _binary(p1), _binary(q1)
    if direction == "qp":
        p, q = q, p
    return compute(measure, p, q).total


def sweep(spec: CurveSpec) -> CurveTable:
    """Evaluate ``spec.measure`` on every ``(alpha, p1)``, ordered by alpha then p1."""
    alphas, p1s, q1s, values = [], [], [], []
    for a in spec.alphas:
        for x in spec.p1_grid:
            q1 = mirror_q1(a, x)
            alphas.append(a)
            p1s.append(x)
            q1s.append(q1)
            values.append(_value(spec.measure, x, q1, spec.direction))
    return CurveTable(
        np.array(alphas), np.array(p1s), np.array(q1s), {spec.measure.label: np.array(values)}
    )


def near_zero_sweep(
    measures: Sequence[Measure | str],
    p1_range: tuple[float, float] = (1e-10, 0.1),
    points_per_decade: int = 20,
    direction: str = "pq",
) -> CurveTable:
    """All ``measures`` at ``alpha = 1`` (``q1 = 1 - p1``) on a log grid near zero."""
    lo, hi = p1_range
    if not 0.0 < lo < hi < 0.5:
        raise GridEmptyError(f"near-zero range must satisfy 0 < lo < hi < 0.5, got {p1_range}")
    if not measures:
        raise GridEmptyError("no measures given")
    parsed = [Measure.parse(m) if isinstance(m, str) else m for m in measures]
    grid = log_grid(lo, hi, points_per_decade)
    q1 = np.array([mirror_q1(1.0, x) for x in grid])
    cols = {
        m.label: np.array([_value(m, x, y, direction) for x, y in zip(grid, q1)]) for m in parsed
    }
    return CurveTable(np.ones_like(grid), grid, q1, cols)
