import random

import pytest

from rephrase.criteria import (
    AcceptAllCriterion,
    FrequencyCriterion,
    LengthCriterion,
)
from rephrase.engine import greedy_transform, qa_answer
from rephrase.errors import ConfigError, NormalizationError
from rephrase.ngrams import build_index
from rephrase.rules import RewriteRule, RuleSet, parse_rules
from rephrase.text import BOS, EOS, Sentence, tokenize

from conftest import corpus_from


def scan_count(corpus, k, window):
    """Independent window scan used to audit applied steps."""
    window = tuple(window)
    total = 0
    for sentence in corpus:
        padded = (BOS,) * k + sentence.tokens + (EOS,) * k
        for i in range(len(padded) - len(window) + 1):
            if padded[i : i + len(window)] == window:
                total += 1
    return total


def test_no_match_returns_input_unchanged():
    index = build_index(corpus_from(["x y z"]), k=2, max_n=6)
    ruleset = RuleSet(parse_rules(["missing\tgone\t"]))
    sentence = tokenize("x y z")
    trace = greedy_transform(sentence, ruleset, LengthCriterion(index), index=index)
    assert trace.output == sentence.tokens
    assert trace.steps == ()


def test_compression_deletes_attested_span():
    corpus = corpus_from(["rekishi no naka de ugoku", "betsu no bun desu yo"])
    index = build_index(corpus, k=2, max_n=7)
    ruleset = RuleSet(parse_rules(["nagare no\t\t"]))
    sentence = tokenize("rekishi no nagare no naka de")
    trace = greedy_transform(sentence, ruleset, LengthCriterion(index), index=index)
    assert trace.output == ("rekishi", "no", "naka", "de")
    assert len(trace.steps) == 1
    step = trace.steps[0]
    assert step.matched == ("nagare", "no") and step.replacement == ()
    assert scan_count(corpus, 2, step.s1 + step.replacement + step.s2) >= 1


def test_compression_rejects_unattested_deletion():
    corpus = corpus_from(["mattaku kankei nai"])
    index = build_index(corpus, k=2, max_n=7)
    ruleset = RuleSet(parse_rules(["nagare no\t\t"]))
    sentence = tokenize("rekishi no nagare no naka de")
    trace = greedy_transform(sentence, ruleset, LengthCriterion(index), index=index)
    assert trace.output == sentence.tokens


def test_polish_inserts_preferred_particle():
    corpus = corpus_from([
        "a shijiritsu no kaifuku b",
        "a shijiritsu no kaifuku b",
        "a shijiritsu no kaifuku b",
        "a shijiritsu kaifuku b",
    ])
    index = build_index(corpus, k=2, max_n=6)
    ruleset = RuleSet(parse_rules(["\tno\t"]))
    sentence = tokenize("a shijiritsu kaifuku b")
    trace = greedy_transform(sentence, ruleset, FrequencyCriterion(index), index=index)
    assert trace.output == ("a", "shijiritsu", "no", "kaifuku", "b")
    (step,) = trace.steps
    assert step.count_after > step.count_before


def test_trace_replay_reproduces_output():
    corpus = corpus_from(["p q r", "p r s", "q r s t"])
    index = build_index(corpus, k=2, max_n=7)
    ruleset = RuleSet(parse_rules(["q\t\t", "s t\ts\t"]))
    for line in ["p q r", "q q r s t", "p q"]:
        trace = greedy_transform(tokenize(line), ruleset, LengthCriterion(index), index=index)
        assert trace.replay() == trace.output


def test_deletion_only_rules_never_grow_output():
    rng = random.Random(77)
    vocab = ["a", "b", "c", "d"]
    corpus = [Sentence(tuple(rng.choices(vocab, k=rng.randint(3, 8)))) for _ in range(40)]
    index = build_index(corpus, k=2, max_n=7)
    rules = []
    for i in range(6):
        lhs = tuple(rng.choices(vocab, k=rng.randint(1, 3)))
        keep = sorted(rng.sample(range(len(lhs)), rng.randint(0, len(lhs) - 1)))
        rhs = tuple(lhs[j] for j in keep)
        if lhs != rhs:
            rules.append(RewriteRule(len(rules), lhs, rhs))
    ruleset = RuleSet(rules)
    criterion = LengthCriterion(index)
    for sentence in corpus[:20]:
        trace = greedy_transform(sentence, ruleset, criterion, index=index)
        assert len(trace.output) <= len(sentence.tokens)


def test_steps_audit_for_both_criteria():
    rng = random.Random(123)
    vocab = ["a", "b", "c", "d", "e"]
    corpus = [Sentence(tuple(rng.choices(vocab, k=rng.randint(3, 9)))) for _ in range(60)]
    index = build_index(corpus, k=2, max_n=7)
    rules = []
    while len(rules) < 8:
        lhs = tuple(rng.choices(vocab, k=rng.randint(1, 2)))
        rhs = tuple(rng.choices(vocab, k=rng.randint(0, 2)))
        if lhs != rhs:
            rules.append(RewriteRule(len(rules), lhs, rhs))
    ruleset = RuleSet(rules)
    applied = 0
    for criterion_cls in (LengthCriterion, FrequencyCriterion):
        criterion = criterion_cls(index)
        for sentence in corpus[:30]:
            trace = greedy_transform(sentence, ruleset, criterion, index=index)
            positions = [step.pos for step in trace.steps]
            assert positions == sorted(positions)  # greedy pass moves rightward
            for step in trace.steps:
                applied += 1
                after = scan_count(corpus, 2, step.s1 + step.replacement + step.s2)
                assert after >= 1
                if criterion_cls is FrequencyCriterion:
                    before = scan_count(corpus, 2, step.s1 + step.matched + step.s2)
                    assert after > before
    assert applied > 0


def test_determinism():
    corpus = corpus_from(["m n o p", "n o p q"])
    index = build_index(corpus, k=2, max_n=7)
    ruleset = RuleSet(parse_rules(["n o\to\t", "p q\tp\t"]))
    sentence = tokenize("m n o p q")
    first = greedy_transform(sentence, ruleset, LengthCriterion(index), index=index)
    second = greedy_transform(sentence, ruleset, LengthCriterion(index), index=index)
    assert first == second


def test_only_top_candidate_tested_without_cascade():
    # two insertion rules compete at the same position: the lower-numbered one
    # ranks first and is rejected; without cascade nothing happens, with
    # cascade the second fires.
    corpus = corpus_from(["u second v", "u second v w"])
    index = build_index(corpus, k=2, max_n=6)
    ruleset = RuleSet(parse_rules(["\tfirst\t", "\tsecond\t"]))
    sentence = tokenize("u v")
    criterion = FrequencyCriterion(index)
    plain = greedy_transform(sentence, ruleset, criterion, index=index)
    assert plain.output == sentence.tokens
    cascaded = greedy_transform(sentence, ruleset, criterion, index=index, cascade=True)
    assert cascaded.output == ("u", "second", "v")


def test_k_mismatch_is_config_error():
    index = build_index(corpus_from(["a b"]), k=2, max_n=6)
    ruleset = RuleSet([])
    with pytest.raises(ConfigError):
        greedy_transform(tokenize("a"), ruleset, LengthCriterion(index), index=index, k=3)


def test_resume_after_deletion_rescans_new_token():
    # deleting "a" at position 0 twice in a row requires rescanning pos 0
    corpus = corpus_from(["a x", "b c"])
    index = build_index(corpus, k=1, max_n=4)
    ruleset = RuleSet(parse_rules(["a\t\t"]))
    trace = greedy_transform(tokenize("a a b c"), ruleset, LengthCriterion(index), index=index)
    assert trace.output == ("b", "c")
    assert [s.pos for s in trace.steps] == [0, 0]


# ------------------------------------------------------------------- qa

QRULES = RuleSet(parse_rules(["What is $Z ?\t$Z is X\t"]), vmax=None)


def test_qa_exact_except_wildcard_needs_no_rewriting():
    docs = corpus_from(["the answer is forty-two", "noise words only here"])
    rules = RuleSet([])
    result = qa_answer(tokenize("What is the answer?"), docs, QRULES, rules)
    assert result.found
    assert result.answer == ("forty-two",)
    assert result.iterations == ()
    assert result.support.tokens == docs[0].tokens


def test_qa_no_answer_when_nothing_overlaps():
    docs = corpus_from(["completely unrelated sentence"])
    rules = RuleSet([])
    result = qa_answer(tokenize("What is the answer?"), docs, QRULES, rules)
    assert not result.found
    assert result.answer == ()


def test_qa_missing_wildcard_is_normalization_error():
    docs = corpus_from(["the answer is forty-two"])
    no_x = RuleSet(parse_rules(["What is $Z ?\t$Z is what\t"]), vmax=None)
    with pytest.raises(NormalizationError):
        qa_answer(tokenize("What is the answer?"), docs, no_x, RuleSet([]))


def test_qa_hill_climb_increases_similarity_strictly(data_dir):
    from rephrase.rules import load_rules
    from rephrase.text import read_corpus

    rules = RuleSet(load_rules(data_dir / "qa_rules.tsv"), vmax=16)
    qrules = RuleSet(load_rules(data_dir / "qa_normalize.tsv"), vmax=None)
    docs = read_corpus(data_dir / "new_york_passage.txt")
    question = tokenize(
        "What is the most general occupation among the residents of "
        "central and northern New York State?"
    )
    result = qa_answer(question, docs, qrules, rules)
    assert result.found
    sims = [it.similarity for it in result.iterations]
    assert sims == sorted(set(sims))  # strictly increasing
    assert result.final_similarity == sims[-1]
    assert {it.side for it in result.iterations} == {"question", "data"}
