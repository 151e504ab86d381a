"""Corpus-driven paraphrasing with rewrite rules and pluggable criteria."""

from .criteria import (
    AcceptAllCriterion,
    Candidate,
    FrequencyCriterion,
    LengthCriterion,
    block_similarity,
    compose,
    similarity,
)
from .engine import QaResult, RewriteStep, RewriteTrace, greedy_transform, qa_answer
from .extraction import AlignedPair, CandidateRule, diff_align, filter_by_support, harvest
from .ngrams import NgramIndex, build_index, load_index, save_index
from .rules import Match, RewriteRule, RuleSet, Var, apply, load_rules, select_rules
from .text import BOS, EOS, Sentence, detokenize, pad, read_corpus, tokenize

__version__ = "0.1.0"

__all__ = [
    "AcceptAllCriterion",
    "AlignedPair",
    "BOS",
    "Candidate",
    "CandidateRule",
    "EOS",
    "FrequencyCriterion",
    "LengthCriterion",
    "Match",
    "NgramIndex",
    "QaResult",
    "RewriteRule",
    "RewriteStep",
    "RewriteTrace",
    "RuleSet",
    "Sentence",
    "Var",
    "apply",
    "block_similarity",
    "build_index",
    "compose",
    "detokenize",
    "diff_align",
    "filter_by_support",
    "greedy_transform",
    "harvest",
    "load_index",
    "load_rules",
    "pad",
    "qa_answer",
    "read_corpus",
    "save_index",
    "select_rules",
    "similarity",
    "tokenize",
]
