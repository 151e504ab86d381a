from pathlib import Path

import pytest

from rephrase.text import Sentence, tokenize

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def passage_sentences() -> list[Sentence]:
    from rephrase.text import read_corpus

    return read_corpus(DATA_DIR / "new_york_passage.txt")


def corpus_from(lines: list[str]) -> list[Sentence]:
    """Build a tokenized corpus from plain text lines."""
    return [tokenize(line, source_id=str(i + 1)) for i, line in enumerate(lines)]
