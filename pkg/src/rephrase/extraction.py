"""Mining rewrite rules from sentence pairs with equal meaning.

Both sides of a pair are aligned with a token-level minimum edit script
(LCS-based); every maximal contiguous differing region becomes one candidate
rule.  Candidates harvested across many pairs are merged by their (lhs, rhs)
and filtered by how often they recurred, on the grounds that a substitution
seen in several independent pairs is likelier to preserve meaning.

Pair file format: UTF-8 TSV, one pair per line, ``left-sentence<TAB>right-sentence``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import RuleParseError
from .rules import RewriteRule, format_rule_line
from .text import TokenSeq, tokenize

DEFAULT_MIN_SUPPORT = 2
DEFAULT_MAX_HUNK = 7


@dataclass(frozen=True)
class AlignedPair:
    """Two token sequences assumed to express the same meaning."""

    left: TokenSeq
    right: TokenSeq
    pair_id: str = ""

    def __post_init__(self) -> None:
        if not self.left or not self.right:
            raise ValueError("both sides of an aligned pair must be non-empty")


@dataclass(frozen=True)
class Hunk:
    """A maximal differing region of an alignment, as index ranges."""

    left_start: int
    left_end: int
    right_start: int
    right_end: int


@dataclass(frozen=True)
class CandidateRule:
    lhs: TokenSeq
    rhs: TokenSeq
    support_count: int
    example_pair_ids: tuple[str, ...] = ()


def _lcs_pairs(left: Sequence[str], right: Sequence[str]) -> list[tuple[int, int]]:
    """Deterministic, leftmost LCS alignment pairs."""
    n, m = len(left), len(right)
    # dp[i][j] = LCS length of left[i:], right[j:]
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = dp[i], dp[i + 1]
        li = left[i]
        for j in range(m - 1, -1, -1):
            if li == right[j]:
                row[j] = below[j + 1] + 1
            else:
                a, b = below[j], row[j + 1]
                row[j] = a if a >= b else b
    pairs = []
    i = j = 0
    while i < n and j < m:
        if left[i] == right[j] and dp[i][j] == dp[i + 1][j + 1] + 1:
            pairs.append((i, j))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            i += 1  # prefer consuming left first, as diff emits deletions first
        else:
            j += 1
    return pairs


def diff_hunks(left: TokenSeq, right: TokenSeq) -> list[Hunk]:
    """Maximal differing regions between consecutive matched tokens."""
    pairs = _lcs_pairs(left, right)
    hunks = []
    li = ri = 0
    for i, j in pairs + [(len(left), len(right))]:
        if i > li or j > ri:
            hunks.append(Hunk(li, i, ri, j))
        li, ri = i + 1, j + 1
    return hunks


def diff_align(pair: AlignedPair, max_hunk: int = DEFAULT_MAX_HUNK) -> list[CandidateRule]:
    """One candidate rule per differing region of the pair.

    Regions longer than ``max_hunk`` tokens on either side are dropped: long
    hunks are usually unrelated rewordings rather than substitutable phrases.
    """
    out = []
    for hunk in diff_hunks(pair.left, pair.right):
        lhs = pair.left[hunk.left_start : hunk.left_end]
        rhs = pair.right[hunk.right_start : hunk.right_end]
        if len(lhs) > max_hunk or len(rhs) > max_hunk:
            continue
        if lhs == rhs:
            continue
        out.append(
            CandidateRule(lhs=lhs, rhs=rhs, support_count=1,
                          example_pair_ids=(pair.pair_id,))
        )
    return out


def harvest(
    pairs: Iterable[AlignedPair], max_hunk: int = DEFAULT_MAX_HUNK
) -> list[CandidateRule]:
    """Merge candidates from all pairs; order by support, then by content."""
    merged: dict[tuple[TokenSeq, TokenSeq], tuple[int, list[str]]] = {}
    for pair in pairs:
        for cand in diff_align(pair, max_hunk):
            key = (cand.lhs, cand.rhs)
            count, ids = merged.get(key, (0, []))
            if pair.pair_id not in ids:
                ids = ids + [pair.pair_id]
            merged[key] = (count + cand.support_count, ids)
    out = [
        CandidateRule(lhs=lhs, rhs=rhs, support_count=count,
                      example_pair_ids=tuple(ids))
        for (lhs, rhs), (count, ids) in merged.items()
    ]
    out.sort(key=lambda c: (-c.support_count, c.lhs, c.rhs))
    return out


def filter_by_support(
    candidates: Iterable[CandidateRule], min_support: int = DEFAULT_MIN_SUPPORT
) -> list[RewriteRule]:
    """Keep candidates seen at least min_support times, as directed rules."""
    if min_support < 1:
        raise ValueError(f"min_support must be >= 1, got {min_support}")
    kept = [c for c in candidates if c.support_count >= min_support]
    return [
        RewriteRule(rule_id=i, lhs=c.lhs, rhs=c.rhs, support_count=c.support_count)
        for i, c in enumerate(kept)
    ]


def read_pairs(path: str | Path) -> list[AlignedPair]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise RuleParseError(
                    f"{path}:{lineno}: expected left<TAB>right, got {len(fields)} field(s)"
                )
            left = tokenize(fields[0]).tokens
            right = tokenize(fields[1]).tokens
            if not left or not right:
                raise RuleParseError(f"{path}:{lineno}: empty side in pair")
            pairs.append(AlignedPair(left=left, right=right, pair_id=str(lineno)))
    return pairs


def save_extracted(rules: Iterable[RewriteRule], path: str | Path) -> None:
    """Write extracted rules in the rule file format with their counts."""
    lines = [
        format_rule_line(r.lhs, r.rhs, [f"count={r.support_count}"]) for r in rules
    ]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
