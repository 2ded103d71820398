"""Exception hierarchy.

Every validation failure raised by the library derives from
:class:`DivlabError`, which is itself a :class:`ValueError` so callers that
only care about "bad input" can catch the builtin.
"""

from __future__ import annotations


class DivlabError(ValueError):
    """Base class for all input/validation errors."""


# pmf
class EmptyAlphabetError(DivlabError):
    pass


class DuplicateLetterError(DivlabError):
    pass


class NegativeMassError(DivlabError):
    pass


class MassNotUnitError(DivlabError):
    pass


class LengthMismatchError(DivlabError):
    pass


class IndexOutOfRangeError(DivlabError):
    pass


class EpsilonOutOfRangeError(DivlabError):
    pass


class XiOutOfRangeError(DivlabError):
    pass


# divergence
class AlphabetMismatchError(DivlabError):
    pass


class MarginalMismatchError(DivlabError):
    pass


class NonPositiveKError(DivlabError):
    pass


class MissingJointError(DivlabError):
    pass


class MeasureParseError(DivlabError):
    pass


# costbenefit
class UnsupportedMeasureError(DivlabError):
    pass


class NonPositiveCostError(DivlabError):
    pass


# coding
class ZeroProbabilityLetterError(DivlabError):
    pass


# curves
class GridEmptyError(DivlabError):
    pass


# mcda
class MissingScoreError(DivlabError):
    pass


class PlanError(DivlabError):
    pass


# scenarios
class AnswerOutOfRangeError(DivlabError):
    pass


class UnknownQuestionError(DivlabError):
    pass
