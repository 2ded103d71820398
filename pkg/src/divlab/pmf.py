"""Alphabets, probability mass functions and entropy.

All logarithms are base 2, so entropies are in bits.  Zero-probability
letters contribute nothing to an entropy (``0 * log2(0) == 0``).

PMFs are validated on construction and never renormalized behind the
caller's back; use :func:`renormalize` explicitly when that is wanted.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    DuplicateLetterError,
    EmptyAlphabetError,
    EpsilonOutOfRangeError,
    IndexOutOfRangeError,
    LengthMismatchError,
    MarginalMismatchError,
    MassNotUnitError,
    NegativeMassError,
    XiOutOfRangeError,
)

__all__ = [
    "Alphabet",
    "JointPmf",
    "Pmf",
    "DEFAULT_TOLERANCE",
    "london_band_edges",
    "max_entropy",
    "one_hot",
    "piecewise_london_pmf",
    "read_pmf",
    "renormalize",
    "shannon_entropy",
    "uniform",
    "validate",
    "worst_case_pmf",
    "write_pmf_csv",
]

DEFAULT_TOLERANCE = 1e-9

# Band masses of the metro walking-time PMF.
LONDON_SPOT = 0.12
LONDON_CLOSE = 0.026
LONDON_WILD_TOTAL = 0.01


@dataclass(frozen=True)
class Alphabet:
    """An ordered set of distinct letter labels."""

    letters: tuple[str, ...]

    def __post_init__(self) -> None:
        letters = tuple(str(x) for x in self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise EmptyAlphabetError("alphabet must contain at least one letter")
        if len(set(letters)) != len(letters):
            raise DuplicateLetterError(f"duplicate letters in alphabet: {letters}")

    @classmethod
    def of_size(cls, n: int, prefix: str = "z") -> Alphabet:
        """Default labels ``z1 .. zn``."""
        if n < 1:
            raise EmptyAlphabetError("alphabet must contain at least one letter")
        return cls(tuple(f"{prefix}{i}" for i in range(1, n + 1)))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def index(self, letter: str) -> int:
        return self.letters.index(letter)


def _frozen_array(values: ArrayLike, ndim: int) -> NDArray[np.float64]:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise LengthMismatchError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_mass(arr: NDArray[np.float64], tolerance: float) -> None:
    if arr.size == 0:
        raise EmptyAlphabetError("probability vector is empty")
    if np.any(np.isnan(arr)):
        raise NegativeMassError("probability vector contains NaN")
    if np.any(arr < 0):
        bad = int(np.argmax(arr < 0))
        raise NegativeMassError(f"negative probability {arr[bad]!r} at index {bad}")
    total = float(arr.sum())
    if abs(total - 1.0) > tolerance:
        raise MassNotUnitError(f"probabilities sum to {total!r}, not 1 (tolerance {tolerance})")


@dataclass(frozen=True, eq=False)
class Pmf:
    """A probability vector over an :class:`Alphabet`.

    Construction validates non-negativity and unit mass; the array is
    stored read-only.
    """

    alphabet: Alphabet
    p: NDArray[np.float64]
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        arr = _frozen_array(self.p, 1)
        object.__setattr__(self, "p", arr)
        _check_mass(arr, self.tolerance)
        if len(arr) != len(self.alphabet):
            raise LengthMismatchError(
                f"{len(arr)} probabilities for {len(self.alphabet)} letters"
            )

    @property
    def n(self) -> int:
        return len(self.alphabet)

    @property
    def letters(self) -> tuple[str, ...]:
        return self.alphabet.letters

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, letter: str) -> float:
        return float(self.p[self.alphabet.index(letter)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pmf):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.p, other.p)

    def __hash__(self) -> int:
        return hash((self.alphabet, self.p.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{x}: {v:g}" for x, v in zip(self.letters, self.p))
        return f"Pmf({{{body}}})"

    def entropy(self) -> float:
        return shannon_entropy(self)

    def to_dict(self) -> dict:
        return {"letters": list(self.letters), "p": [float(v) for v in self.p]}

    @classmethod
    def from_dict(cls, data: dict, tolerance: float = DEFAULT_TOLERANCE) -> Pmf:
        p = data["p"]
        letters = data.get("letters")
        return validate(p, letters=letters, tolerance=tolerance)


def validate(
    p: ArrayLike,
    letters: Sequence[str] | Alphabet | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Pmf:
    """Check a raw probability vector and wrap it as a :class:`Pmf`.

    Raises:
        EmptyAlphabetError: ``p`` has no entries.
        NegativeMassError: some entry is negative.
        MassNotUnitError: the entries do not sum to 1 within ``tolerance``.
    """
    arr = np.array(p, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyAlphabetError("probability vector is empty")
    if letters is None:
        alphabet = Alphabet.of_size(arr.size)
    elif isinstance(letters, Alphabet):
        alphabet = letters
    else:
        alphabet = Alphabet(tuple(letters))
    return Pmf(alphabet, arr, tolerance)


def renormalize(p: ArrayLike, letters: Sequence[str] | Alphabet | None = None) -> Pmf:
    """Scale a non-negative vector to unit mass.  Opt-in only."""
    arr = np.array(p, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyAlphabetError("probability vector is empty")
    if np.any(arr < 0):
        raise NegativeMassError("cannot renormalize negative entries")
    total = arr.sum()
    if total <= 0:
        raise MassNotUnitError("cannot renormalize a zero vector")
    return validate(arr / total, letters)


def _plogp(p: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def shannon_entropy(pmf: Pmf) -> float:
    """``-sum p log2 p`` in bits."""
    # clip guards against -0.0 and 1-ulp negatives for one-hot PMFs
    return max(0.0, float(-_plogp(pmf.p).sum()))


def max_entropy(alphabet: Alphabet | Pmf | int) -> float:
    """``log2 n`` for an alphabet of ``n`` letters."""
    if isinstance(alphabet, Pmf):
        n = alphabet.n
    elif isinstance(alphabet, Alphabet):
        n = len(alphabet)
    else:
        n = int(alphabet)
    if n < 1:
        raise EmptyAlphabetError("alphabet must contain at least one letter")
    return math.log2(n)


def _as_alphabet(alphabet: Alphabet | int | Sequence[str]) -> Alphabet:
    if isinstance(alphabet, Alphabet):
        return alphabet
    if isinstance(alphabet, int):
        return Alphabet.of_size(alphabet)
    return Alphabet(tuple(alphabet))


def one_hot(alphabet: Alphabet | int | Sequence[str], index: int) -> Pmf:
    """All mass on letter ``index`` (0-based)."""
    alpha = _as_alphabet(alphabet)
    n = len(alpha)
    if not 0 <= index < n:
        raise IndexOutOfRangeError(f"index {index} outside [0, {n})")
    p = np.zeros(n)
    p[index] = 1.0
    return Pmf(alpha, p)


def uniform(alphabet: Alphabet | int | Sequence[str]) -> Pmf:
    alpha = _as_alphabet(alphabet)
    n = len(alpha)
    return Pmf(alpha, np.full(n, 1.0 / n))


def worst_case_pmf(n: int, epsilon: float) -> Pmf:
    """The geometric PMF whose Huffman code is maximally unbalanced.

    ``q(z_n) = eps``, ``q(z_i) = (1 - eps) 2^-i`` for ``2 <= i <= n-1`` and
    ``q(z_1) = (1 - eps)(2^-1 + 2^-(n-1))``.  Requires ``n >= 2`` and
    ``0 < eps < 2^-(n-1)``.
    """
    if n < 2:
        raise EpsilonOutOfRangeError(f"n must be >= 2, got {n}")
    upper = 2.0 ** -(n - 1)
    if not 0.0 < epsilon < upper:
        raise EpsilonOutOfRangeError(f"epsilon must lie in (0, {upper!r}), got {epsilon!r}")
    q = np.empty(n)
    scale = 1.0 - epsilon
    q[0] = scale * (0.5 + upper)
    for i in range(2, n):
        q[i - 1] = scale * 2.0 ** -i
    q[n - 1] = epsilon
    return Pmf(Alphabet.of_size(n), q)


def london_band_edges(xi: int, n: int = 256) -> dict[str, list[tuple[int, int]]]:
    """Inclusive 1-based letter ranges of each band around ``xi``.

    Empty ranges (``lo > hi``) are dropped.
    """
    if not (8 <= xi <= n - 12):
        raise XiOutOfRangeError(f"xi={xi} puts a band outside [1, {n}]; need 8 <= xi <= {n - 12}")
    bands = {
        "wild_guess": [(1, xi - 8), (xi + 13, n)],
        "close": [(xi - 7, xi - 3), (xi + 3, xi + 12)],
        "spot_on": [(xi - 2, xi + 2)],
    }
    return {k: [(lo, hi) for lo, hi in v if lo <= hi] for k, v in bands.items()}


def piecewise_london_pmf(xi: int, n: int = 256) -> Pmf:
    """Walking-time ground truth peaked at ``xi`` minutes.

    Letters are the integers ``1..n``.  Five letters around ``xi`` get 0.12,
    fifteen nearby letters get 0.026 and the remaining ``n - 20`` letters
    share 0.01 equally (0.01/236 each when ``n == 256``).
    """
    edges = london_band_edges(xi, n)
    n_wild = n - 20
    q = np.full(n, LONDON_WILD_TOTAL / n_wild)
    for lo, hi in edges["close"]:
        q[lo - 1 : hi] = LONDON_CLOSE
    for lo, hi in edges["spot_on"]:
        q[lo - 1 : hi] = LONDON_SPOT
    return Pmf(Alphabet(tuple(str(i) for i in range(1, n + 1))), q)


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Joint distribution ``r[i, j]`` over pairs of letters of one alphabet."""

    alphabet: Alphabet
    r: NDArray[np.float64]
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        arr = _frozen_array(self.r, 2)
        object.__setattr__(self, "r", arr)
        n = len(self.alphabet)
        if arr.shape != (n, n):
            raise LengthMismatchError(f"joint matrix shape {arr.shape} does not match {n} letters")
        _check_mass(arr.ravel(), self.tolerance)

    @classmethod
    def independent(cls, p: Pmf, q: Pmf) -> JointPmf:
        return cls(p.alphabet, np.outer(p.p, q.p))

    def row_marginal(self) -> NDArray[np.float64]:
        return self.r.sum(axis=1)

    def col_marginal(self) -> NDArray[np.float64]:
        return self.r.sum(axis=0)

    def check_marginals(self, p: Pmf, q: Pmf, tolerance: float | None = None) -> None:
        tol = self.tolerance if tolerance is None else tolerance
        if not np.allclose(self.row_marginal(), p.p, rtol=0.0, atol=tol):
            raise MarginalMismatchError("row sums of the joint PMF do not reproduce P")
        if not np.allclose(self.col_marginal(), q.p, rtol=0.0, atol=tol):
            raise MarginalMismatchError("column sums of the joint PMF do not reproduce Q")


# ----------------------------------------------------------------------
# I/O


def read_pmf(path: str | Path, tolerance: float = DEFAULT_TOLERANCE) -> Pmf:
    """Load a PMF from JSON (``{"letters": [...], "p": [...]}``) or CSV.

    CSV files need a header and two columns, ``letter,probability``.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return _pmf_from_csv(text.splitlines(), tolerance)
    return Pmf.from_dict(json.loads(text), tolerance)


def _pmf_from_csv(lines: Iterable[str], tolerance: float) -> Pmf:
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"letter", "probability"} <= set(reader.fieldnames):
        raise LengthMismatchError("PMF CSV needs a header with 'letter,probability'")
    letters, probs = [], []
    for row in reader:
        letters.append(row["letter"])
        probs.append(float(row["probability"]))
    return validate(probs, letters=letters, tolerance=tolerance)


def write_pmf_csv(pmf: Pmf) -> str:
    rows = ["letter,probability"]
    rows += [f"{x},{float(v)!r}" for x, v in zip(pmf.letters, pmf.p)]
    return "\n".join(rows) + "\n"
