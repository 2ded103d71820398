"""Divergence measures between two PMFs on a shared alphabet.

Every measure returns a :class:`DivergenceResult` holding the total and a
per-letter breakdown.  For the entropic measures the per-letter terms sum
to the total.  Minkowski distances report the pre-root terms
``|p_i - q_i|^k``, whose sum is ``total ** k``.

KL-divergence and cross entropy are unbounded; when some ``p_i > 0`` meets
``q_i == 0`` the total is ``math.inf`` rather than an exception.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import (
    AlphabetMismatchError,
    MeasureParseError,
    MissingJointError,
    NonPositiveKError,
)
from .pmf import JointPmf, Pmf, shannon_entropy

__all__ = [
    "DivergenceResult",
    "Measure",
    "compute",
    "conditional_entropy",
    "cross_entropy",
    "d_ncm",
    "d_new",
    "js",
    "kl",
    "minkowski",
]

KL = "kl"
SCALED_KL = "scaled_kl"
JS = "js"
COND = "cond"
DNEW = "dnew"
DNCM = "dncm"
MINK = "mink"

_KINDS_WITH_K = {DNEW, DNCM, MINK}
BOUNDED_ENTROPIC = {JS, DNEW, DNCM}


@dataclass(frozen=True)
class Measure:
    """Identifier of a divergence measure plus its parameter.

    The string form follows the CLI grammar: ``kl``, ``kl*0.3``, ``js``,
    ``cond``, ``dnew:k=2``, ``dncm:k=1``, ``mink:k=200``.
    """

    kind: str
    k: float | None = None
    factor: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in {KL, SCALED_KL, JS, COND, DNEW, DNCM, MINK}:
            raise MeasureParseError(f"unknown measure kind {self.kind!r}")
        if self.kind in _KINDS_WITH_K:
            if self.k is None or not self.k > 0:
                raise NonPositiveKError(f"{self.kind} needs k > 0, got {self.k!r}")
        elif self.k is not None:
            raise MeasureParseError(f"{self.kind} takes no k parameter")
        if self.kind == SCALED_KL:
            if self.factor is None or not self.factor > 0:
                raise MeasureParseError(f"scaled KL needs factor > 0, got {self.factor!r}")
        elif self.factor is not None:
            raise MeasureParseError(f"{self.kind} takes no scale factor")

    @classmethod
    def parse(cls, text: str) -> Measure:
        s = text.strip().lower().replace(" ", "")
        if s in (KL, JS, COND):
            return cls(s)
        m = re.fullmatch(r"kl\*([0-9.eE+-]+)", s) or re.fullmatch(r"([0-9.eE+-]+)\*kl", s)
        if m:
            return cls(SCALED_KL, factor=_number(m.group(1), text))
        m = re.fullmatch(r"(dnew|dncm|mink):k=([0-9.eE+-]+)", s)
        if m:
            return cls(m.group(1), k=_number(m.group(2), text))
        raise MeasureParseError(
            f"cannot parse measure {text!r}; expected one of kl, kl*F, js, cond, "
            "dnew:k=K, dncm:k=K, mink:k=K"
        )

    @property
    def label(self) -> str:
        if self.kind == SCALED_KL:
            return f"kl*{_fmt(self.factor)}"
        if self.kind in _KINDS_WITH_K:
            return f"{self.kind}:k={_fmt(self.k)}"
        return self.kind

    def __str__(self) -> str:
        return self.label

    @property
    def is_bounded_entropic(self) -> bool:
        return self.kind in BOUNDED_ENTROPIC

    @property
    def upper_bound(self) -> float:
        if self.kind in BOUNDED_ENTROPIC:
            return 1.0
        if self.kind == MINK:
            return 2.0 ** (1.0 / self.k)
        return math.inf


def _number(token: str, text: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise MeasureParseError(f"bad number {token!r} in measure {text!r}") from None


def _fmt(x: float | None) -> str:
    return f"{x:g}"


@dataclass(frozen=True, eq=False)
class DivergenceResult:
    total: float
    per_letter: NDArray[np.float64]
    measure: Measure
    letters: tuple[str, ...] = field(default=())

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.total)

    def __float__(self) -> float:
        return float(self.total)

    def scaled(self, factor: float, measure: Measure) -> DivergenceResult:
        return DivergenceResult(self.total * factor, self.per_letter * factor, measure, self.letters)

    def to_dict(self) -> dict:
        return {
            "measure": self.measure.label,
            "total": self.total,
            "per_letter": dict(zip(self.letters, (float(v) for v in self.per_letter))),
        }


def _pair(p: Pmf, q: Pmf) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    if p.alphabet != q.alphabet:
        raise AlphabetMismatchError(
            f"PMFs live on different alphabets ({p.n} vs {q.n} letters)"
        )
    return p.p, q.p


def _check_k(k: float) -> float:
    if not k > 0:
        raise NonPositiveKError(f"k must be > 0, got {k!r}")
    return float(k)


def _kl_terms(p: NDArray[np.float64], q: NDArray[np.float64]) -> NDArray[np.float64]:
    terms = np.zeros_like(p)
    support = p > 0
    blocked = support & (q <= 0)
    ok = support & ~blocked
    # difference of logs avoids overflow when q is subnormal
    terms[ok] = p[ok] * (np.log2(p[ok]) - np.log2(q[ok]))
    terms[blocked] = math.inf
    return terms


def _clamped(q: Pmf, floor: float) -> Pmf:
    arr = np.maximum(q.p, floor)
    return Pmf(q.alphabet, arr / arr.sum())


def kl(p: Pmf, q: Pmf, clamp: float | None = None) -> DivergenceResult:
    """KL-divergence of ``p`` from ``q`` in bits.

    ``clamp`` floors every ``q_i`` at the given value and renormalizes before
    evaluating; it exists for experiments with thresholded PMFs and is off by
    default.
    """
    if clamp is not None:
        _pair(p, q)
        q = _clamped(q, clamp)
    pa, qa = _pair(p, q)
    terms = _kl_terms(pa, qa)
    return DivergenceResult(float(terms.sum()), terms, Measure(KL), p.letters)


def cross_entropy(p: Pmf, q: Pmf, clamp: float | None = None) -> float:
    """``-sum p_i log2 q_i``; ``inf`` when ``p`` has mass where ``q`` has none."""
    if clamp is not None:
        _pair(p, q)
        q = _clamped(q, clamp)
    pa, qa = _pair(p, q)
    support = pa > 0
    if np.any(qa[support] <= 0):
        return math.inf
    return float(-(pa[support] * np.log2(qa[support])).sum())


def js(p: Pmf, q: Pmf) -> DivergenceResult:
    """Jensen-Shannon divergence, in [0, 1] with base-2 logs."""
    pa, qa = _pair(p, q)
    m = 0.5 * (pa + qa)
    terms = 0.5 * (_kl_terms(pa, m) + _kl_terms(qa, m))
    return DivergenceResult(float(terms.sum()), terms, Measure(JS), p.letters)


def _log_gap(pa: NDArray[np.float64], qa: NDArray[np.float64], k: float) -> NDArray[np.float64]:
    return np.log2(np.abs(pa - qa) ** k + 1.0)


def d_new(p: Pmf, q: Pmf, k: float = 2) -> DivergenceResult:
    """Symmetric bounded divergence ``1/2 sum (p_i + q_i) log2(|p_i - q_i|^k + 1)``."""
    k = _check_k(k)
    pa, qa = _pair(p, q)
    terms = 0.5 * (pa + qa) * _log_gap(pa, qa, k)
    return DivergenceResult(float(terms.sum()), terms, Measure(DNEW, k=k), p.letters)


def d_ncm(p: Pmf, q: Pmf, k: float = 1) -> DivergenceResult:
    """Non-commutative variant ``sum p_i log2(|p_i - q_i|^k + 1)``."""
    k = _check_k(k)
    pa, qa = _pair(p, q)
    terms = pa * _log_gap(pa, qa, k)
    return DivergenceResult(float(terms.sum()), terms, Measure(DNCM, k=k), p.letters)


def minkowski(p: Pmf, q: Pmf, k: float = 2) -> DivergenceResult:
    """``(sum |p_i - q_i|^k)^(1/k)``; per-letter terms are pre-root."""
    k = _check_k(k)
    pa, qa = _pair(p, q)
    terms = np.abs(pa - qa) ** k
    return DivergenceResult(float(terms.sum() ** (1.0 / k)), terms, Measure(MINK, k=k), p.letters)


def _mutual_information_terms(r: NDArray[np.float64], pa, qa) -> NDArray[np.float64]:
    outer = np.outer(pa, qa)
    terms = np.zeros_like(r)
    nz = r > 0
    terms[nz] = r[nz] * np.log2(r[nz] / outer[nz])
    return terms


def conditional_entropy_result(p: Pmf, q: Pmf, joint: JointPmf) -> DivergenceResult:
    """``H(P|Q)`` with a per-letter breakdown over the letters of ``P``.

    The term for letter ``i`` is ``-p_i log2 p_i - sum_j r_ij log2(r_ij / (p_i q_j))``.
    """
    pa, qa = _pair(p, q)
    if joint.alphabet != p.alphabet:
        raise AlphabetMismatchError("joint PMF is defined on a different alphabet")
    joint.check_marginals(p, q)
    h_terms = np.zeros_like(pa)
    nz = pa > 0
    h_terms[nz] = -pa[nz] * np.log2(pa[nz])
    mi_rows = _mutual_information_terms(joint.r, pa, qa).sum(axis=1)
    terms = h_terms - mi_rows
    total = float(terms.sum())
    # mutual information cannot exceed H(P); clamp rounding noise into range
    total = min(max(total, 0.0), shannon_entropy(p))
    return DivergenceResult(total, terms, Measure(COND), p.letters)


def conditional_entropy(p: Pmf, q: Pmf, joint: JointPmf) -> float:
    """``H(P) - I(P;Q)`` for the joint distribution ``joint``."""
    return conditional_entropy_result(p, q, joint).total


def compute(
    measure: Measure | str,
    p: Pmf,
    q: Pmf,
    joint: JointPmf | None = None,
) -> DivergenceResult:
    """Evaluate ``measure`` on ``(p, q)``."""
    if isinstance(measure, str):
        measure = Measure.parse(measure)
    kind = measure.kind
    if kind == KL:
        return kl(p, q)
    if kind == SCALED_KL:
        return kl(p, q).scaled(measure.factor, measure)
    if kind == JS:
        return js(p, q)
    if kind == COND:
        if joint is None:
            raise MissingJointError("conditional entropy needs a joint PMF")
        return conditional_entropy_result(p, q, joint)
    if kind == DNEW:
        return d_new(p, q, measure.k)
    if kind == DNCM:
        return d_ncm(p, q, measure.k)
    return minkowski(p, q, measure.k)
