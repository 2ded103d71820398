"""Bounded divergence measures and information-theoretic cost-benefit analysis."""

__version__ = "0.1.0"

from .coding import PrefixCode, bound_report, unary_code, huffman, shannon_literal_lengths
from .costbenefit import BenefitBreakdown, benefit, benefit_bounded, benefit_final, benefit_kl, ratio
from .divergence import (
    DivergenceResult,
    Measure,
    compute,
    conditional_entropy,
    cross_entropy,
    d_ncm,
    d_new,
    js,
    kl,
    minkowski,
)
from .errors import DivlabError
from .pmf import (
    Alphabet,
    JointPmf,
    Pmf,
    max_entropy,
    one_hot,
    piecewise_london_pmf,
    read_pmf,
    renormalize,
    shannon_entropy,
    uniform,
    validate,
    worst_case_pmf,
)

__all__ = [
    "Alphabet",
    "BenefitBreakdown",
    "DivergenceResult",
    "DivlabError",
    "JointPmf",
    "Measure",
    "Pmf",
    "PrefixCode",
    "benefit",
    "benefit_bounded",
    "benefit_final",
    "benefit_kl",
    "bound_report",
    "compute",
    "conditional_entropy",
    "cross_entropy",
    "d_ncm",
    "d_new",
    "unary_code",
    "huffman",
    "js",
    "kl",
    "max_entropy",
    "minkowski",
    "one_hot",
    "piecewise_london_pmf",
    "ratio",
    "read_pmf",
    "renormalize",
    "shannon_entropy",
    "shannon_literal_lengths",
    "uniform",
    "validate",
    "worst_case_pmf",
]
