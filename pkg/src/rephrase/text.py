"""Tokens, sentences, tokenization and boundary padding.

A token is a plain ``str`` with no internal whitespace; a token sequence is a
``tuple[str, ...]``.  Two reserved boundary tokens, ``BOS`` and ``EOS``, mark
sentence edges after padding and are never produced by the tokenizer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

TokenSeq = tuple[str, ...]

BOS = "<s>"
EOS = "</s>"

# Punctuation split off token edges by the default tokenizer.
_EDGE_PUNCT = '.,;:?!"()'

# User text that collides with a boundary token (or an escaped form of one)
# gains one leading backslash; detokenize removes it again.
_BOUNDARY_RE = re.compile(r"\\*</?s>\Z")
_ESCAPED_RE = re.compile(r"\\+</?s>\Z")


@dataclass(frozen=True)
class Sentence:
    """An immutable tokenized sentence with an optional source identifier."""

    tokens: TokenSeq
    source_id: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"bad token {tok!r}: empty or contains whitespace")
            if tok in (BOS, EOS):
                raise ValueError(f"sentence may not contain boundary token {tok!r}")

    def __len__(self) -> int:
        return len(self.tokens)

    def text(self) -> str:
        return detokenize(self.tokens)


def tokenize(text: str, source_id: str | None = None) -> Sentence:
    """Split text into a Sentence: whitespace first, then edge punctuation.

    Deterministic: leading/trailing ``.,;:?!"()`` characters become
    separate tokens, interior punctuation is left alone.  Literal boundary
    tokens in the input are backslash-escaped so they never collide with
    ``BOS``/``EOS``.
    """
    out: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        tail: list[str] = []
        while chunk and chunk[0] in _EDGE_PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in _EDGE_PUNCT:
            tail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            if _BOUNDARY_RE.fullmatch(chunk):
                chunk = "\\" + chunk
            out.append(chunk)
        out.extend(reversed(tail))
    return Sentence(tuple(out), source_id)


def detokenize(tokens: TokenSeq) -> str:
    """Join tokens with single spaces, undoing the boundary escape."""
    parts = [t[1:] if _ESCAPED_RE.fullmatch(t) else t for t in tokens]
    return " ".join(parts)


def pad(seq: TokenSeq, k: int) -> TokenSeq:
    """Surround seq with k BOS tokens on the left and k EOS tokens on the right."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return (BOS,) * k + tuple(seq) + (EOS,) * k


def read_corpus(path: str | Path, tokenizer=tokenize) -> list[Sentence]:
    """Read a UTF-8 corpus file, one sentence per line; blank lines are skipped.

    A different tokenizer (any ``(text, source_id) -> Sentence`` callable, for
    example one backed by a morphological analyzer) may be substituted.
    """
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            sentences.append(tokenizer(line, source_id=str(lineno)))
    return sentences
