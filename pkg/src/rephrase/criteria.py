"""Evaluation criteria: ranking and acceptance policies for candidate rewrites.

A criterion object exposes two methods over ``Candidate`` values:

* ``rank(candidates)`` returns them in a total, deterministic order;
* ``accept(candidate)`` decides whether the rewrite may be applied.

``LengthCriterion`` prefers the rewrite that removes the most tokens and
accepts it when the rewritten window occurs in the corpus at least once.
``FrequencyCriterion`` keeps the same ranking but accepts only when the
rewritten window is strictly more frequent than the original one.  The three
grammar checks can be AND-composed onto either via ``compose``.

This module also houses the similarity scores used by the question-answering
engine: ``similarity`` (token LCS) and ``block_similarity`` (LCS weighted by
squared lengths of contiguous aligned blocks).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .ngrams import NgramIndex
from .rules import Match
from .text import BOS, EOS, TokenSeq

#: Token treated as an alignment wildcard by the similarity scores.
WILDCARD = "X"


@dataclass(frozen=True)
class Candidate:
    """A match plus the k-token context on each side of its span.

    ``s1`` and ``s2`` are read from the padded sequence, so they always hold
    exactly k tokens.  ``reduction`` is the net token count removed (negative
    for insertions).
    """

    match: Match
    s1: TokenSeq
    s2: TokenSeq
    reduction: int

    @property
    def window_after(self) -> TokenSeq:
        return self.s1 + self.match.replacement + self.s2

    @property
    def window_before(self) -> TokenSeq:
        return self.s1 + self.match.matched + self.s2


def make_candidate(seq: TokenSeq, match: Match, k: int) -> Candidate:
    """Build the Candidate for a match against the unpadded sequence."""
    end = match.start + match.matched_len
    s1 = ((BOS,) * k + seq[: match.start])[-k:]
    s2 = (seq[end:] + (EOS,) * k)[:k]
    return Candidate(
        match=match,
        s1=s1,
        s2=s2,
        reduction=match.matched_len - len(match.replacement),
    )


def _rank_key(c: Candidate):
    # Total order: most tokens removed, then longest span, then rule file
    # order; the trailing fields only break ties between equal-scoring
    # bindings so that ranking never depends on input order.
    return (
        -c.reduction,
        -c.match.matched_len,
        c.match.rule_id,
        c.match.start,
        c.match.replacement,
        tuple(sorted(c.match.bindings.items())),
    )


class LengthCriterion:
    """Rank by tokens removed; accept when the rewritten window is attested."""

    name = "length"

    def __init__(self, index: NgramIndex):
        self.index = index

    def rank(self, candidates: Iterable[Candidate]) -> list[Candidate]:
        return sorted(candidates, key=_rank_key)

    def accept(self, candidate: Candidate) -> bool:
        return self.index.occurs(candidate.window_after)


class FrequencyCriterion:
    """Rank as LengthCriterion; accept only on a strict frequency gain."""

    name = "frequency"

    def __init__(self, index: NgramIndex):
        self.index = index

    def rank(self, candidates: Iterable[Candidate]) -> list[Candidate]:
        return sorted(candidates, key=_rank_key)

    def accept(self, candidate: Candidate) -> bool:
        return self.index.count(candidate.window_after) > self.index.count(
            candidate.window_before
        )


class AcceptAllCriterion:
    """Unconditional acceptance, ranked by longest match then rule order.

    Used for rule sets that are applied wherever they fit, e.g. question
    normalization, where no corpus evidence is involved.
    """

    name = "always"

    def rank(self, candidates: Iterable[Candidate]) -> list[Candidate]:
        return sorted(
            candidates,
            key=lambda c: (
                -c.match.matched_len,
                c.match.rule_id,
                c.match.start,
                c.match.replacement,
                tuple(sorted(c.match.bindings.items())),
            ),
        )

    def accept(self, candidate: Candidate) -> bool:
        return True


class OccursCheck:
    """Grammar check: the rewritten window occurs at least once."""

    def __init__(self, index: NgramIndex):
        self.index = index

    def __call__(self, candidate: Candidate) -> bool:
        return self.index.occurs(candidate.window_after)


class ThresholdCheck:
    """Grammar check: relative frequency of the rewritten window >= theta.

    theta=0 accepts everything (the check is disabled by default).
    """

    def __init__(self, index: NgramIndex, theta: float = 0.0):
        self.index = index
        self.theta = theta

    def __call__(self, candidate: Candidate) -> bool:
        return self.index.relative_frequency(candidate.window_after) >= self.theta


class ContextGainCheck:
    """Grammar check: the replacement is likelier in context than out of it."""

    def __init__(self, index: NgramIndex):
        self.index = index

    def __call__(self, candidate: Candidate) -> bool:
        return self.index.context_gain(
            candidate.s1, candidate.match.replacement, candidate.s2
        )


class ComposedCriterion:
    """A ranking criterion AND-composed with extra acceptance checks."""

    def __init__(self, base, checks: Sequence[Callable[[Candidate], bool]]):
        self.base = base
        self.checks = tuple(checks)
        self.name = base.name

    def rank(self, candidates: Iterable[Candidate]) -> list[Candidate]:
        return self.base.rank(candidates)

    def accept(self, candidate: Candidate) -> bool:
        return self.base.accept(candidate) and all(
            check(candidate) for check in self.checks
        )


def compose(base, *checks: Callable[[Candidate], bool]):
    """Attach zero or more grammar checks to a ranking criterion."""
    return ComposedCriterion(base, checks) if checks else base


def similarity(p: TokenSeq, q: TokenSeq, wildcard: str | None = WILDCARD) -> int:
    """Longest common subsequence length over tokens.

    The wildcard token never produces a literal match, so wildcard positions
    contribute nothing to the score.
    """
    n, m = len(p), len(q)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    for i in range(1, n + 1):
        cur = [0] * (m + 1)
        pi = p[i - 1]
        usable = pi != wildcard
        for j in range(1, m + 1):
            if usable and pi == q[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                a, b = prev[j], cur[j - 1]
                cur[j] = a if a >= b else b
        prev = cur
    return prev[m]


def block_similarity(p: TokenSeq, q: TokenSeq, wildcard: str | None = WILDCARD) -> int:
    """Alignment score favouring long contiguous runs of matches.

    Maximizes the sum of len(block)**2 over the maximal contiguous blocks of a
    non-crossing token alignment.  Unlike plain LCS this strictly rewards
    rewrites that fix word order, which is what drives the question-answering
    hill climb.
    """
    score, _ = _block_align(p, q, wildcard)
    return score


def block_alignment(
    p: TokenSeq, q: TokenSeq, wildcard: str | None = WILDCARD
) -> list[tuple[int, int]]:
    """The (i, j) pairs of a deterministic optimal block alignment."""
    _, pairs = _block_align(p, q, wildcard)
    return pairs


def _block_align(p, q, wildcard):
    n, m = len(p), len(q)
    if n == 0 or m == 0:
        return 0, []
    # P[i][j]: best score for p[:i] vs q[:j].
    # D[i][j]: best score for alignments whose final block ends at (i, j);
    # run[i][j]: maximal common suffix run at (i, j); the chosen block may be
    # any prefix-anchored length 1..run, scored quadratically.
    P = [[0] * (m + 1) for _ in range(n + 1)]
    D = [[-1] * (m + 1) for _ in range(n + 1)]
    run = [[0] * (m + 1) for _ in range(n + 1)]
    blk = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        pi = p[i - 1]
        usable = pi != wildcard
        Pi, Pp = P[i], P[i - 1]
        for j in range(1, m + 1):
            best = -1
            if usable and pi == q[j - 1]:
                r = run[i - 1][j - 1] + 1
                run[i][j] = r
                chosen = 0
                for length in range(1, r + 1):
                    v = P[i - length][j - length] + length * length
                    if v > best:
                        best, chosen = v, length
                D[i][j] = best
                blk[i][j] = chosen
            a = Pi[j - 1]
            b = Pp[j]
            top = a if a >= b else b
            Pi[j] = best if best > top else top
    pairs: list[tuple[int, int]] = []
    i, j = n, m
    while i > 0 and j > 0:
        if D[i][j] == P[i][j] and D[i][j] >= 0:
            length = blk[i][j]
            for t in range(length):
                pairs.append((i - 1 - t, j - 1 - t))
            i -= length
            j -= length
        elif P[i - 1][j] == P[i][j]:
            i -= 1
        else:
            j -= 1
    pairs.reverse()
    return P[n][m], pairs
