"""Information-theoretic cost-benefit of a single process.

Benefit is alphabet compression (entropy lost between the input and
output of a process) minus potential distortion (how far a user's
reconstruction of the input drifts from the ground truth).

With KL-divergence the distortion is unbounded.  The bounded form scales a
divergence in [0, 1] by the maximum entropy of the input alphabet, so the
distortion can never exceed the information the alphabet can carry.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .divergence import DNEW, Measure, compute, kl
from .errors import AlphabetMismatchError, NonPositiveCostError, UnsupportedMeasureError
from .pmf import Pmf, max_entropy, shannon_entropy

__all__ = [
    "BenefitBreakdown",
    "FINAL_MEASURE",
    "benefit_bounded",
    "benefit_final",
    "benefit_kl",
    "ratio",
]

FINAL_MEASURE = Measure(DNEW, k=2.0)


@dataclass(frozen=True)
class BenefitBreakdown:
    """Terms of ``benefit = alphabet_compression - potential_distortion``.

    ``hmax`` is the scale applied to the divergence (``log2 n`` of the input
    alphabet unless overridden); for KL it is recorded but not applied.
    ``cost`` and ``ratio`` are filled in by :func:`ratio`.
    """

    alphabet_compression: float
    potential_distortion: float
    benefit: float
    hmax: float
    measure: Measure
    divergence: float
    cost: float | None = None
    ratio: float | None = None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["measure"] = self.measure.label
        return d


def _check_reference(input: Pmf, reconstruction: Pmf) -> None:
    if input.alphabet != reconstruction.alphabet:
        raise AlphabetMismatchError("the reconstruction must share the input alphabet")


def alphabet_compression(input: Pmf, output: Pmf | float) -> float:
    """``H(input) - H(output)``; ``output`` may be a PMF or its entropy."""
    h_out = output if isinstance(output, (int, float)) else shannon_entropy(output)
    return shannon_entropy(input) - float(h_out)


def benefit_kl(input: Pmf, output: Pmf | float, reconstruction: Pmf) -> BenefitBreakdown:
    """Original, unbounded form using ``D_KL(reconstruction || input)``.

    An infinite divergence yields ``benefit == -inf``.
    """
    _check_reference(input, reconstruction)
    ac = alphabet_compression(input, output)
    pd = kl(reconstruction, input).total
    benefit = -math.inf if math.isinf(pd) else ac - pd
    return BenefitBreakdown(ac, pd, benefit, max_entropy(input.alphabet), Measure("kl"), pd)


def benefit_bounded(
    input: Pmf,
    output: Pmf | float,
    reconstruction: Pmf,
    measure: Measure | str,
    hmax: float | None = None,
) -> BenefitBreakdown:
    """Bounded benefit ``AC - Hmax * D(reconstruction || input)``.

    ``measure`` must be JS, D_new or D_ncm.  The reconstruction is the first
    argument of the divergence and the ground-truth input the second.
    """
    if isinstance(measure, str):
        measure = Measure.parse(measure)
    if not measure.is_bounded_entropic:
        raise UnsupportedMeasureError(
            f"bounded benefit needs js, dnew or dncm; got {measure.label}"
        )
    _check_reference(input, reconstruction)
    scale = max_entropy(input.alphabet) if hmax is None else float(hmax)
    ac = alphabet_compression(input, output)
    div = compute(measure, reconstruction, input).total
    pd = scale * div
    return BenefitBreakdown(ac, pd, ac - pd, scale, measure, div)


def benefit_final(
    input: Pmf, output: Pmf | float, reconstruction: Pmf, hmax: float | None = None
) -> BenefitBreakdown:
    """Bounded benefit with ``D_new`` at ``k = 2``."""
    return benefit_bounded(input, output, reconstruction, FINAL_MEASURE, hmax)


def benefit(
    input: Pmf,
    output: Pmf | float,
    reconstruction: Pmf,
    measure: Measure | str,
    hmax: float | None = None,
) -> BenefitBreakdown:
    """Dispatch to :func:`benefit_kl` for KL and :func:`benefit_bounded` otherwise."""
    if isinstance(measure, str):
        measure = Measure.parse(measure)
    if measure.kind == "kl":
        return benefit_kl(input, output, reconstruction)
    return benefit_bounded(input, output, reconstruction, measure, hmax)


def ratio(b: BenefitBreakdown, cost: float) -> BenefitBreakdown:
    """Attach a cost and the benefit-per-unit-cost ratio."""
    if not cost > 0:
        raise NonPositiveCostError(f"cost must be positive, got {cost!r}")
    return dataclasses.replace(b, cost=float(cost), ratio=b.benefit / cost)
