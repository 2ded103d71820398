"""Binary prefix codes and the conceptual bound on cross entropy.

Huffman coding never assigns a codeword longer than ``n - 1`` bits to an
``n``-letter alphabet, however small a letter's probability.  Reading cross
entropy as the average codeword length when a code built for ``Q`` carries
letters drawn from ``P`` therefore gives a value capped at ``n - 1``.  The
literal ``ceil(log2(1/q))`` lengths have no such cap.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatchError, EmptyAlphabetError, ZeroProbabilityLetterError
from .pmf import Alphabet, Pmf, shannon_entropy, validate

__all__ = [
    "BoundReport",
    "CodeStats",
    "PrefixCode",
    "bound_report",
    "conceptual_cross_entropy",
    "unary_code",
    "huffman",
    "shannon_literal_lengths",
]


@dataclass(frozen=True)
class PrefixCode:
    alphabet: Alphabet
    codewords: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.codewords) != len(self.alphabet):
            raise AlphabetMismatchError("one codeword per letter is required")

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.codewords)

    @property
    def max_length(self) -> int:
        return max(self.lengths)

    def kraft_sum(self) -> float:
        return sum(2.0 ** -n for n in self.lengths)

    def is_prefix_free(self) -> bool:
        words = sorted(self.codewords)
        if len(set(words)) != len(words):
            return False
        # after sorting, any prefix sits immediately before one of its extensions
        return not any(b.startswith(a) for a, b in zip(words, words[1:]))

    def average_length(self, p: Pmf) -> float:
        return conceptual_cross_entropy(p, self)

    def stats(self, p: Pmf) -> CodeStats:
        return CodeStats(self.lengths, self.average_length(p), self.max_length)

    def __getitem__(self, letter: str) -> str:
        return self.codewords[self.alphabet.index(letter)]


@dataclass(frozen=True)
class CodeStats:
    lengths: tuple[int, ...]
    avg_length: float
    max_length: int


class _Node:
    __slots__ = ("prob", "letters", "left", "right")

    def __init__(self, prob, letters, left=None, right=None):
        self.prob = prob
        self.letters = letters
        self.left = left
        self.right = right


def huffman(q: Pmf) -> PrefixCode:
    """Optimal binary prefix code for ``q``.

    Merges always take the two lowest-probability subtrees; ties go to the
    subtree whose smallest letter index is lower.  Within a merge the heavier
    branch gets ``0`` (on a tie, the branch with the lower letter index).
    Zero-probability letters are legal and simply merge first.  A
    one-letter alphabet gets the empty codeword.
    """
    n = q.n
    if n == 0:
        raise EmptyAlphabetError("cannot code an empty alphabet")
    if n == 1:
        return PrefixCode(q.alphabet, ("",))
    heap = []
    for i, prob in enumerate(q.p):
        heapq.heappush(heap, (float(prob), i, _Node(float(prob), (i,))))
    while len(heap) > 1:
        pa, ia, a = heapq.heappop(heap)
        pb, ib, b = heapq.heappop(heap)
        # a is no heavier than b; the heavier subtree takes the 0 branch
        if pa == pb and ia < ib:
            zero, one = a, b
        else:
            zero, one = b, a
        merged = _Node(pa + pb, a.letters + b.letters, zero, one)
        heapq.heappush(heap, (pa + pb, min(ia, ib), merged))
    root = heap[0][2]
    words = [""] * n
    stack = [(root, "")]
    while stack:
        node, prefix = stack.pop()
        if node.left is None:
            words[node.letters[0]] = prefix
            continue
        stack.append((node.left, prefix + "0"))
        stack.append((node.right, prefix + "1"))
    return PrefixCode(q.alphabet, tuple(words))


def shannon_literal_lengths(q: Pmf) -> CodeStats:
    """Per-letter ``ceil(log2(1/q_i))`` and the average length under ``q``."""
    if np.any(q.p <= 0):
        bad = q.letters[int(np.argmax(q.p <= 0))]
        raise ZeroProbabilityLetterError(f"letter {bad!r} has zero probability")
    lengths = tuple(math.ceil(-math.log2(float(x))) for x in q.p)
    avg = float(np.dot(q.p, lengths))
    return CodeStats(lengths, avg, max(lengths))


def conceptual_cross_entropy(p: Pmf, code: PrefixCode) -> float:
    """Average codeword length ``sum p_i len(c_i)`` when letters follow ``p``."""
    if p.alphabet != code.alphabet:
        raise AlphabetMismatchError("PMF and code are defined on different alphabets")
    return float(np.dot(p.p, code.lengths))


def unary_code(n: int) -> PrefixCode:
    """Unary-style code ``0, 10, 110, ..., 1..10, 1..11`` for ``n >= 2`` letters."""
    if n < 2:
        raise EmptyAlphabetError(f"the unary code needs n >= 2, got {n}")
    words = ["1" * i + "0" for i in range(n - 1)] + ["1" * (n - 1)]
    return PrefixCode(Alphabet.of_size(n), tuple(words))


@dataclass(frozen=True)
class BoundReport:
    n: int
    trials: int
    seed: int
    max_cross_entropy: float
    max_kl: float
    max_codeword_length: int
    bound: int
    passed: bool


def _random_pmf(rng: np.random.Generator, n: int) -> np.ndarray:
    # a spread of concentrations, from near-one-hot to near-uniform
    alpha = rng.choice([0.05, 0.3, 1.0, 5.0])
    v = rng.dirichlet(np.full(n, alpha))
    if rng.random() < 0.25:
        v[rng.integers(n)] = 0.0
        total = v.sum()
        v = v / total if total > 0 else np.full(n, 1.0 / n)
    return v


def bound_report(n: int, trials: int, seed: int = 0) -> BoundReport:
    """Check ``sum p_i len_Q(z_i) <= n - 1`` over random ``(P, Q)`` pairs.

    Each trial builds a Huffman code for ``Q`` and measures its average
    length under ``P`` (the conceptual cross entropy) and that value minus
    ``H(P)`` (the conceptual KL-divergence).  Trial ``t`` draws from
    ``default_rng([seed, t])`` so any single trial can be replayed.
    """
    if n < 2:
        raise EmptyAlphabetError(f"n must be >= 2, got {n}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    alphabet = Alphabet.of_size(n)
    max_ce = max_kl = 0.0
    max_len = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        p = validate(_random_pmf(rng, n), alphabet)
        q = validate(_random_pmf(rng, n), alphabet)
        code = huffman(q)
        ce = conceptual_cross_entropy(p, code)
        max_ce = max(max_ce, ce)
        max_kl = max(max_kl, ce - shannon_entropy(p))
        max_len = max(max_len, code.max_length)
    bound = n - 1
    # averages are float sums of p_i * len_i, so allow a few ulps over the bound
    slack = 1e-9
    passed = max_ce <= bound + slack and max_kl <= bound + slack and max_len <= bound
    return BoundReport(n, trials, seed, max_ce, max_kl, max_len, bound, passed)
