"""Transformation procedures over a rule set.

``greedy_transform`` is the single left-to-right pass: at each position it
collects candidate rewrites, ranks them with the criterion, tests the top
candidate against the corpus, applies it on success and resumes right after
the replacement.  ``qa_answer`` is the similarity hill climb: the normalized
question and each candidate data sentence are rewritten one rule application
at a time, always taking the application with the greatest similarity gain,
until no application strictly improves; the answer is the data span aligned
opposite the question wildcard.
"""

from __future__ import annotations

from dataclasses import dataclass

from .criteria import (
    WILDCARD,
    AcceptAllCriterion,
    Candidate,
    block_alignment,
    block_similarity,
    make_candidate,
)
from .errors import ConfigError, Error, NormalizationError, StaleMatchError
from .ngrams import NgramIndex
from .rules import RuleSet
from .rules import apply as apply_match
from .text import Sentence, TokenSeq


@dataclass(frozen=True)
class RewriteStep:
    """One applied rewrite, with enough context to audit it later."""

    pos: int
    rule_id: int
    matched: TokenSeq
    replacement: TokenSeq
    s1: TokenSeq
    s2: TokenSeq
    reduction: int
    count_before: int | None
    count_after: int | None


@dataclass(frozen=True)
class RewriteTrace:
    """A transformation record: replaying the steps reproduces the output."""

    input: Sentence
    steps: tuple[RewriteStep, ...]
    output: TokenSeq

    def replay(self) -> TokenSeq:
        seq = self.input.tokens
        for step in self.steps:
            end = step.pos + len(step.matched)
            if seq[step.pos : end] != step.matched:
                raise StaleMatchError(f"step at {step.pos} does not fit the sequence")
            seq = seq[: step.pos] + step.replacement + seq[end:]
        return seq


def _window_count(index: NgramIndex | None, window: TokenSeq) -> int | None:
    if index is None or len(window) > index.max_n:
        return None
    return index.count(window)


def greedy_transform(
    sentence: Sentence,
    rules: RuleSet,
    criterion,
    index: NgramIndex | None = None,
    k: int | None = None,
    cascade: bool = False,
) -> RewriteTrace:
    """Left-to-right single pass; see the module docstring.

    Only the top-ranked candidate is tested at each position unless
    ``cascade`` is set, in which case lower-ranked candidates are tried in
    order until one is accepted.
    """
    if index is not None:
        if k is not None and k != index.k:
            raise ConfigError(f"k={k} does not match index k={index.k}")
        k = index.k
    elif k is None:
        k = 1
    seq = sentence.tokens
    steps: list[RewriteStep] = []
    pos = 0
    while pos <= len(seq):
        matches = rules.matches_at(seq, pos)
        chosen: Candidate | None = None
        if matches:
            candidates = [make_candidate(seq, m, k) for m in matches]
            ranked = criterion.rank(candidates)
            for candidate in ranked if cascade else ranked[:1]:
                if criterion.accept(candidate):
                    chosen = candidate
                    break
        if chosen is None:
            pos += 1
            continue
        seq = apply_match(seq, chosen.match)
        steps.append(
            RewriteStep(
                pos=chosen.match.start,
                rule_id=chosen.match.rule_id,
                matched=chosen.match.matched,
                replacement=chosen.match.replacement,
                s1=chosen.s1,
                s2=chosen.s2,
                reduction=chosen.reduction,
                count_before=_window_count(index, chosen.window_before),
                count_after=_window_count(index, chosen.window_after),
            )
        )
        pos = chosen.match.start + len(chosen.match.replacement)
        if chosen.match.matched_len == 0 and not chosen.match.replacement:
            pos += 1  # unreachable for valid rules; keeps the scan advancing
    return RewriteTrace(input=sentence, steps=tuple(steps), output=seq)


@dataclass(frozen=True)
class QaIteration:
    """One hill-climb step: the similarity reached, and what was applied."""

    similarity: int
    side: str  # "question" or "data"
    rule_id: int


@dataclass(frozen=True)
class QaResult:
    answer: TokenSeq
    support: Sentence | None
    final_similarity: int
    iterations: tuple[QaIteration, ...]

    @property
    def found(self) -> bool:
        return bool(self.answer)


def _hill_climb(
    q: TokenSeq,
    d: TokenSeq,
    rules: RuleSet,
    wildcard: str,
    max_rounds: int,
) -> tuple[TokenSeq, TokenSeq, list[QaIteration]]:
    current = block_similarity(q, d, wildcard)
    iterations: list[QaIteration] = []
    for _ in range(max_rounds):
        best_score = current
        best_key = None
        best_move = None
        for side_rank, side, seq, other in ((0, "question", q, d), (1, "data", d, q)):
            cache: dict[TokenSeq, int] = {}
            for pos in range(len(seq) + 1):
                for match in rules.matches_at(seq, pos):
                    new = apply_match(seq, match)
                    if new == seq:
                        continue
                    score = cache.get(new)
                    if score is None:
                        score = (
                            block_similarity(new, other, wildcard)
                            if side == "question"
                            else block_similarity(other, new, wildcard)
                        )
                        cache[new] = score
                    if score <= current or score < best_score:
                        continue
                    key = (
                        match.rule_id,
                        match.start,
                        side_rank,
                        match.matched_len,
                        match.replacement,
                        tuple(sorted(match.bindings.items())),
                    )
                    if score > best_score or best_key is None or key < best_key:
                        best_score, best_key, best_move = score, key, (side, new, match.rule_id)
        if best_move is None:
            return q, d, iterations
        side, new, rule_id = best_move
        if side == "question":
            q = new
        else:
            d = new
        current = best_score
        iterations.append(QaIteration(similarity=current, side=side, rule_id=rule_id))
    raise Error(f"hill climb did not converge within {max_rounds} rounds")


def _extract_answer(q: TokenSeq, d: TokenSeq, wildcard: str) -> TokenSeq:
    """Data tokens between the alignments of the wildcard's neighbours."""
    ix = q.index(wildcard)
    pairs = block_alignment(q, d, wildcard)
    j_left = max((j for i, j in pairs if i < ix), default=-1)
    j_right = min((j for i, j in pairs if i > ix), default=len(d))
    if j_right <= j_left + 1:
        return ()
    return d[j_left + 1 : j_right]


def qa_answer(
    question: Sentence,
    documents: list[Sentence],
    qrules: RuleSet,
    rules: RuleSet,
    top_n: int = 3,
    wildcard: str = WILDCARD,
    max_rounds: int = 1000,
) -> QaResult:
    """Answer a question from pre-segmented document sentences.

    The question is first normalized into declarative form by ``qrules``
    (which must introduce the wildcard token), the ``top_n`` most similar
    document sentences are hill-climbed with ``rules``, and the best final
    pair is aligned to read off the answer span.
    """
    normalized = greedy_transform(question, qrules, AcceptAllCriterion(), k=1)
    q0 = normalized.output
    if wildcard not in q0:
        raise NormalizationError(
            f"normalized question lacks the wildcard token {wildcard!r}: "
            + " ".join(q0)
        )
    scored = []
    for idx, doc in enumerate(documents):
        s = block_similarity(q0, doc.tokens, wildcard)
        if s > 0:
            scored.append((-s, idx))
    scored.sort()
    if not scored:
        return QaResult(answer=(), support=None, final_similarity=0, iterations=())
    best = None
    for _, idx in scored[:top_n]:
        q_final, d_final, iterations = _hill_climb(
            q0, documents[idx].tokens, rules, wildcard, max_rounds
        )
        final = block_similarity(q_final, d_final, wildcard)
        key = (final, -idx)
        if best is None or key > best[0]:
            best = (key, q_final, d_final, iterations, documents[idx])
    _, q_final, d_final, iterations, doc = best
    return QaResult(
        answer=_extract_answer(q_final, d_final, wildcard),
        support=Sentence(d_final, doc.source_id),
        final_similarity=best[0][0],
        iterations=tuple(iterations),
    )
