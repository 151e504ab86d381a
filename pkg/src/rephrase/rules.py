"""Rewrite rules: storage, file format, and position matching.

A rule rewrites one token pattern into another.  Patterns mix literal tokens
with variables (``$X`` in rule files); a variable binds a non-empty span of
1..vmax tokens.  ``RuleSet`` indexes rules in a token trie keyed on their
literal prefix so matching at a position stays cheap for large rule files.

Rule file format (UTF-8, one rule per line, ``#`` starts a comment line)::

    LHS<TAB>RHS<TAB>flags

Tokens are space-separated; either side may be empty (deletion/insertion
rules).  Flags are comma-separated from ``bidir``, ``validated``, ``count=N``.
A ``bidir`` line expands into two directed rules sharing its metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import RuleParseError, RuleValidationError, StaleMatchError
from .text import TokenSeq

DEFAULT_VMAX = 5


@dataclass(frozen=True)
class Var:
    """A pattern variable; the name is a single uppercase letter."""

    name: str


PatternElem = str | Var
Pattern = tuple[PatternElem, ...]


def pattern_vars(pattern: Pattern) -> list[str]:
    return [e.name for e in pattern if isinstance(e, Var)]


def literal_len(pattern: Pattern) -> int:
    return sum(1 for e in pattern if not isinstance(e, Var))


def parse_pattern(text: str) -> Pattern:
    """Parse a space-separated pattern; ``$A``..``$Z`` are variables.

    A leading backslash escapes a literal that would otherwise read as a
    variable or an escape (``\\$X`` is the literal token ``$X``).
    """
    elems: list[str | Var] = []
    for tok in text.split():
        if len(tok) == 2 and tok[0] == "$" and tok[1].isupper():
            elems.append(Var(tok[1]))
        elif tok.startswith("\\$"):
            elems.append(tok[1:])
        else:
            elems.append(tok)
    return tuple(elems)


def pattern_text(pattern: Pattern) -> str:
    parts = []
    for e in pattern:
        if isinstance(e, Var):
            parts.append(f"${e.name}")
        elif e.startswith("$") or e.startswith("\\$"):
            parts.append("\\" + e)
        else:
            parts.append(e)
    return " ".join(parts)


@dataclass(frozen=True)
class RewriteRule:
    """A directed rewrite of lhs into rhs.

    ``bidirectional`` marks rules that came from a ``bidir`` line (each such
    line is stored as two directed rules).  ``support_count`` and ``validated``
    are provenance metadata from rule extraction and hand checking.
    """

    rule_id: int
    lhs: Pattern
    rhs: Pattern
    bidirectional: bool = False
    support_count: int = 1
    validated: bool = False

    def __post_init__(self) -> None:
        if not self.lhs and not self.rhs:
            raise RuleValidationError(f"rule {self.rule_id}: lhs and rhs are both empty")
        lhs_vars = pattern_vars(self.lhs)
        rhs_vars = pattern_vars(self.rhs)
        if len(set(lhs_vars)) != len(lhs_vars) or len(set(rhs_vars)) != len(rhs_vars):
            raise RuleValidationError(
                f"rule {self.rule_id}: variable names must be distinct within a side"
            )
        free = set(rhs_vars) - set(lhs_vars)
        if free:
            raise RuleValidationError(
                f"rule {self.rule_id}: free variable(s) on the right-hand side: "
                + ", ".join(sorted(free))
            )
        if self.support_count < 1:
            raise RuleValidationError(f"rule {self.rule_id}: support_count must be >= 1")

    def reduction(self) -> int:
        """Tokens removed by this rule, defined only for variable-free rules."""
        if pattern_vars(self.lhs) or pattern_vars(self.rhs):
            raise ValueError("reduction of a variable rule depends on the match")
        return len(self.lhs) - len(self.rhs)


@dataclass(frozen=True)
class Match:
    """One way a rule matches a sequence at a fixed start position."""

    rule_id: int
    start: int
    matched: TokenSeq
    replacement: TokenSeq
    bindings: Mapping[str, TokenSeq] = field(default_factory=dict)

    @property
    def matched_len(self) -> int:
        return len(self.matched)


def _substitute(pattern: Pattern, bindings: Mapping[str, TokenSeq]) -> TokenSeq:
    out: list[str] = []
    for e in pattern:
        if isinstance(e, Var):
            out.extend(bindings[e.name])
        else:
            out.append(e)
    return tuple(out)


def _match_key(m: Match):
    return (m.rule_id, m.matched_len, tuple(sorted(m.bindings.items())))


class _Node:
    __slots__ = ("children", "entries")

    def __init__(self) -> None:
        self.children: dict[str, _Node] = {}
        # (rule, pattern elements remaining after the literal prefix)
        self.entries: list[tuple[RewriteRule, Pattern]] = []


class RuleSet:
    """An immutable collection of rules supporting match enumeration.

    vmax bounds the token span a variable may bind; ``None`` means unbounded
    (up to the rest of the sequence).
    """

    def __init__(self, rules: Iterable[RewriteRule], vmax: int | None = DEFAULT_VMAX):
        if vmax is not None and vmax < 1:
            raise ValueError(f"vmax must be >= 1 or None, got {vmax}")
        self.rules: tuple[RewriteRule, ...] = tuple(rules)
        self.vmax = vmax
        self._root = _Node()
        for rule in self.rules:
            node = self._root
            rest = rule.lhs
            while rest and not isinstance(rest[0], Var):
                node = node.children.setdefault(rest[0], _Node())
                rest = rest[1:]
            node.entries.append((rule, rest))

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[RewriteRule]:
        return iter(self.rules)

    def max_side_len(self) -> int:
        """Longest possible matched span or replacement, counting variable bounds.

        Used to size frequency indexes.  Unbounded variables contribute
        DEFAULT_VMAX here; callers with unbounded rule sets should size
        explicitly.
        """
        bound = self.vmax if self.vmax is not None else DEFAULT_VMAX
        longest = 0
        for rule in self.rules:
            for side in (rule.lhs, rule.rhs):
                n = literal_len(side) + bound * len(pattern_vars(side))
                longest = max(longest, n)
        return longest

    def matches_at(self, seq: TokenSeq, pos: int) -> list[Match]:
        """Every match of every rule whose lhs starts exactly at pos.

        Variable bindings are enumerated exhaustively (non-empty spans up to
        vmax tokens).  Empty-lhs rules match everywhere with a zero-length
        span.  The result is sorted by (rule_id, matched length, bindings).
        """
        if not 0 <= pos <= len(seq):
            raise ValueError(f"pos {pos} out of range for sequence of length {len(seq)}")
        found: list[Match] = []
        node = self._root
        i = pos
        while True:
            for rule, rest in node.entries:
                for end, bindings in self._complete(rest, seq, i):
                    found.append(
                        Match(
                            rule_id=rule.rule_id,
                            start=pos,
                            matched=seq[pos:end],
                            replacement=_substitute(rule.rhs, bindings),
                            bindings=bindings,
                        )
                    )
            if i < len(seq) and seq[i] in node.children:
                node = node.children[seq[i]]
                i += 1
            else:
                break
        found.sort(key=_match_key)
        return found

    def _complete(
        self, elems: Pattern, seq: TokenSeq, pos: int
    ) -> Iterator[tuple[int, dict[str, TokenSeq]]]:
        """Yield (end, bindings) for each way elems matches seq starting at pos."""
        if not elems:
            yield pos, {}
            return
        head, rest = elems[0], elems[1:]
        if isinstance(head, Var):
            limit = len(seq) - pos if self.vmax is None else min(self.vmax, len(seq) - pos)
            for span in range(1, limit + 1):
                for end, bindings in self._complete(rest, seq, pos + span):
                    yield end, {head.name: seq[pos : pos + span], **bindings}
        elif pos < len(seq) and seq[pos] == head:
            yield from self._complete(rest, seq, pos + 1)


def select_rules(
    rules: Iterable[RewriteRule],
    validated_only: bool = False,
    min_support: int = 1,
) -> list[RewriteRule]:
    """Keep rules trusted to preserve meaning: hand-checked or well-supported."""
    return [
        r
        for r in rules
        if (not validated_only or r.validated) and r.support_count >= min_support
    ]


def apply(seq: TokenSeq, match: Match) -> TokenSeq:
    """Replace the matched span of seq with the match's replacement."""
    end = match.start + match.matched_len
    if seq[match.start : end] != match.matched:
        raise StaleMatchError(
            f"span {match.start}:{end} no longer holds {' '.join(match.matched)!r}"
        )
    return seq[: match.start] + match.replacement + seq[end:]


def parse_rule_line(line: str, lineno: int, next_id: int) -> list[RewriteRule]:
    """Parse one rule line into its directed rules (two for bidir lines)."""
    fields = line.split("\t")
    if len(fields) == 2:
        lhs_text, rhs_text, flag_text = fields[0], fields[1], ""
    elif len(fields) == 3:
        lhs_text, rhs_text, flag_text = fields
    else:
        raise RuleParseError(
            f"line {lineno}: expected LHS<TAB>RHS<TAB>flags, got {len(fields)} field(s)"
        )
    bidir = False
    validated = False
    count = 1
    for flag in filter(None, (f.strip() for f in flag_text.split(","))):
        if flag == "bidir":
            bidir = True
        elif flag == "validated":
            validated = True
        elif flag.startswith("count="):
            try:
                count = int(flag[6:])
            except ValueError:
                raise RuleParseError(f"line {lineno}: bad count flag {flag!r}") from None
        else:
            raise RuleParseError(f"line {lineno}: unknown flag {flag!r}")
    lhs = parse_pattern(lhs_text)
    rhs = parse_pattern(rhs_text)
    try:
        out = [
            RewriteRule(next_id, lhs, rhs, bidirectional=bidir,
                        support_count=count, validated=validated)
        ]
        if bidir:
            out.append(
                RewriteRule(next_id + 1, rhs, lhs, bidirectional=True,
                            support_count=count, validated=validated)
            )
    except RuleValidationError as exc:
        raise RuleValidationError(f"line {lineno}: {exc}") from None
    return out


def parse_rules(lines: Iterable[str]) -> list[RewriteRule]:
    rules: list[RewriteRule] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        # lines with tabs are rule lines even when otherwise blank
        if (not line.strip() and "\t" not in line) or line.lstrip().startswith("#"):
            continue
        rules.extend(parse_rule_line(line, lineno, len(rules)))
    return rules


def load_rules(path: str | Path) -> list[RewriteRule]:
    """Load a rule file; rules are numbered in file order, bidir lines expanded."""
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh)


def format_rule_line(lhs: Pattern, rhs: Pattern, flags: Iterable[str] = ()) -> str:
    return f"{pattern_text(lhs)}\t{pattern_text(rhs)}\t{','.join(flags)}"


def save_rules(rules: Iterable[RewriteRule], path: str | Path) -> None:
    """Write rules back out, collapsing adjacent bidir pairs to one line.

    A bidirectional rule whose mirror is absent (e.g. after filtering) is
    written as a plain directed line.
    """
    rules = list(rules)
    lines = []
    i = 0
    while i < len(rules):
        rule = rules[i]
        flags = []
        mirrored = (
            rule.bidirectional
            and i + 1 < len(rules)
            and rules[i + 1].lhs == rule.rhs
            and rules[i + 1].rhs == rule.lhs
            and rules[i + 1].bidirectional
        )
        if mirrored:
            flags.append("bidir")
        if rule.validated:
            flags.append("validated")
        if rule.support_count != 1:
            flags.append(f"count={rule.support_count}")
        lines.append(format_rule_line(rule.lhs, rule.rhs, flags))
        i += 2 if mirrored else 1
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
