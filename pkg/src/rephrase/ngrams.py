"""Exact n-gram frequency index over a padded corpus.

The index counts every contiguous window (including the empty window) of each
padded sentence up to ``max_n`` tokens, overlaps included.  It backs the
corpus-frequency checks of the evaluation criteria: occurrence tests, relative
frequencies, and the in-context versus out-of-context probability comparison.

File format: a header line ``NGRAM-INDEX v1 k=<k> max_n=<n> tokens=<total>``
followed by one ``count<TAB>tok1 tok2 ...`` entry per window, sorted by token
sequence so equal indexes serialize to byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .errors import IndexFormatError, QueryTooLongError
from .text import Sentence, TokenSeq, pad

_HEADER_PREFIX = "NGRAM-INDEX v1 "


class NgramIndex:
    """Frequency store with exact window counts and context-filler totals."""

    def __init__(self, k: int, max_n: int, counts: dict[TokenSeq, int], total_tokens: int):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if max_n < 2 * k + 1:
            raise ValueError(f"max_n must be >= 2k+1 = {2 * k + 1}, got {max_n}")
        self.k = k
        self.max_n = max_n
        self.counts = counts
        self.total_tokens = total_tokens
        # Derived: total windows per length, and per-(left, right, filler_len)
        # totals for the context-gain comparison.  Both are functions of
        # `counts`, so they are rebuilt rather than persisted.
        self._window_totals: dict[int, int] = {}
        self._context_totals: dict[tuple[TokenSeq, TokenSeq, int], int] = {}
        for seq, c in counts.items():
            n = len(seq)
            self._window_totals[n] = self._window_totals.get(n, 0) + c
            if n >= 2 * k:
                key = (seq[:k], seq[n - k :], n - 2 * k)
                self._context_totals[key] = self._context_totals.get(key, 0) + c

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NgramIndex):
            return NotImplemented
        return (
            self.k == other.k
            and self.max_n == other.max_n
            and self.total_tokens == other.total_tokens
            and self.counts == other.counts
        )

    def count(self, seq: TokenSeq) -> int:
        """Exact occurrence count of seq in the padded corpus, overlaps included."""
        seq = tuple(seq)
        if len(seq) > self.max_n:
            raise QueryTooLongError(
                f"query of length {len(seq)} exceeds max_n={self.max_n}"
            )
        return self.counts.get(seq, 0)

    def occurs(self, seq: TokenSeq) -> bool:
        return self.count(seq) >= 1

    def windows(self, n: int) -> int:
        """Total number of window positions of length n in the padded corpus."""
        if n > self.max_n:
            raise QueryTooLongError(f"window length {n} exceeds max_n={self.max_n}")
        return self._window_totals.get(n, 0)

    def relative_frequency(self, seq: TokenSeq) -> float:
        """count(seq) divided by the number of windows of the same length."""
        total = self.windows(len(tuple(seq)))
        return self.count(seq) / total if total else 0.0

    def context_gain(self, left: TokenSeq, filler: TokenSeq, right: TokenSeq) -> bool:
        """Is the filler more probable inside (left, right) than in general?

        Compares count(left+filler+right) / sum over same-length fillers seen
        between left and right, against count(filler) / all windows of that
        length.  False when left and right never co-occur at that distance.
        Comparison is exact (cross-multiplied integers).
        """
        left, filler, right = tuple(left), tuple(filler), tuple(right)
        if len(left) != self.k or len(right) != self.k:
            raise ValueError(f"context halves must each have exactly k={self.k} tokens")
        in_context = self.count(left + filler + right)
        context_total = self._context_totals.get((left, right, len(filler)), 0)
        if context_total == 0:
            return False
        flat = self.count(filler)
        flat_total = self.windows(len(filler))
        return in_context * flat_total > flat * context_total

    def save(self, path: str | Path) -> None:
        lines = [f"{_HEADER_PREFIX}k={self.k} max_n={self.max_n} tokens={self.total_tokens}"]
        for seq in sorted(self.counts):
            lines.append(f"{self.counts[seq]}\t{' '.join(seq)}")
        Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NgramIndex":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if not header.startswith(_HEADER_PREFIX):
                raise IndexFormatError(f"{path}: not an index file (bad header)")
            try:
                fields = dict(part.split("=", 1) for part in header[len(_HEADER_PREFIX):].split())
                k = int(fields["k"])
                max_n = int(fields["max_n"])
                total = int(fields["tokens"])
            except (KeyError, ValueError) as exc:
                raise IndexFormatError(f"{path}: malformed header: {exc}") from None
            counts: dict[TokenSeq, int] = {}
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                try:
                    count_text, tok_text = line.split("\t", 1)
                    count = int(count_text)
                except ValueError:
                    raise IndexFormatError(f"{path}:{lineno}: malformed entry") from None
                seq = tuple(tok_text.split(" ")) if tok_text else ()
                counts[seq] = count
        return cls(k=k, max_n=max_n, counts=counts, total_tokens=total)


def build_index(corpus: Iterable[Sentence], k: int, max_n: int) -> NgramIndex:
    """Count every window of every padded sentence, lengths 0..max_n."""
    counts: dict[TokenSeq, int] = {}
    total_tokens = 0
    for sentence in corpus:
        padded = pad(sentence.tokens, k)
        total_tokens += len(sentence.tokens)
        length = len(padded)
        for n in range(0, min(max_n, length) + 1):
            for i in range(length - n + 1):
                window = padded[i : i + n]
                counts[window] = counts.get(window, 0) + 1
    return NgramIndex(k=k, max_n=max_n, counts=counts, total_tokens=total_tokens)


def save_index(index: NgramIndex, path: str | Path) -> None:
    index.save(path)


def load_index(path: str | Path) -> NgramIndex:
    return NgramIndex.load(path)
