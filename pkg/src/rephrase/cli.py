"""Command line interface tying the pipeline together.

Subcommands: ``extract-rules``, ``build-index``, ``compress``, ``polish``,
``spoken`` (polish against a spoken-language index) and ``qa``.  All commands
are pure functions of their inputs: identical invocations produce identical
bytes.  Exit codes: 0 success, 1 no answer found (qa), 2 usage or input
errors.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import criteria, engine, extraction, ngrams, rules as rules_mod, text
from .errors import ConfigError, Error

DEFAULTS = {
    "k": 2,
    "vmax": 5,
    "min_support": 2,
    "max_hunk": 7,
    "top_n": 3,
    "grammar": "none",
    "cascade": False,
    "jobs": 1,
}

# Replacement-length allowance when build-index is given no rule file to size from.
FALLBACK_SIDE_LEN = 8

_CONFIG_TYPES = {
    "k": int,
    "vmax": int,
    "max_n": int,
    "min_support": int,
    "max_hunk": int,
    "top_n": int,
    "jobs": int,
    "criterion": str,
    "grammar": str,
    "cascade": lambda v: v.lower() in ("1", "true", "yes", "on"),
    # path and text settings used by qa
    "rules": str,
    "qrules": str,
    "data": str,
    "question": str,
}


def _load_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_TYPES[key](value.strip())
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}") from None
    return values


def _setting(args, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _vmax_setting(args, config) -> int | None:
    vmax = _setting(args, config, "vmax", DEFAULTS["vmax"])
    return None if vmax == 0 else vmax


def _grammar_checks(choice: str, index: ngrams.NgramIndex) -> list:
    if choice == "none":
        return []
    if choice == "occurs":
        return [criteria.OccursCheck(index)]
    if choice == "context-gain":
        return [criteria.ContextGainCheck(index)]
    if choice.startswith("threshold:"):
        try:
            theta = float(choice.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad threshold in --grammar {choice!r}") from None
        return [criteria.ThresholdCheck(index, theta)]
    raise ConfigError(f"unknown --grammar value {choice!r}")


def _cmd_build_index(args) -> int:
    config = _load_config(args.config) if args.config else {}
    k = _setting(args, config, "k", DEFAULTS["k"])
    corpus = text.read_corpus(args.corpus)
    max_n = _setting(args, config, "max_n", None)
    if max_n is None:
        if args.rules:
            ruleset = rules_mod.RuleSet(
                rules_mod.load_rules(args.rules), vmax=_vmax_setting(args, config)
            )
            side = max(ruleset.max_side_len(), 1)
        else:
            side = FALLBACK_SIDE_LEN
        max_n = 2 * k + side
    index = ngrams.build_index(corpus, k=k, max_n=max_n)
    index.save(args.output)
    print(
        f"indexed {len(corpus)} sentences, {index.total_tokens} tokens, "
        f"k={k} max_n={max_n}",
        file=sys.stderr,
    )
    return 0


def _cmd_extract_rules(args) -> int:
    config = _load_config(args.config) if args.config else {}
    min_support = _setting(args, config, "min_support", DEFAULTS["min_support"])
    max_hunk = _setting(args, config, "max_hunk", DEFAULTS["max_hunk"])
    pairs = extraction.read_pairs(args.pairs)
    candidates = extraction.harvest(pairs, max_hunk=max_hunk)
    kept = extraction.filter_by_support(candidates, min_support=min_support)
    if args.output:
        extraction.save_extracted(kept, args.output)
        print(
            f"extracted {len(candidates)} candidates, kept {len(kept)} "
            f"(min support {min_support})",
            file=sys.stderr,
        )
    else:
        for rule in kept:
            print(rules_mod.format_rule_line(rule.lhs, rule.rhs,
                                             [f"count={rule.support_count}"]))
    return 0


def _score_info(step: engine.RewriteStep) -> str:
    parts = [f"reduction={step.reduction}"]
    if step.count_before is not None:
        parts.append(f"count_before={step.count_before}")
    if step.count_after is not None:
        parts.append(f"count_after={step.count_after}")
    return " ".join(parts)


def _write_trace(path: str, traces: list[engine.RewriteTrace]) -> None:
    lines = []
    for i, trace in enumerate(traces, start=1):
        lines.append(f"# sentence {i}")
        for n, step in enumerate(trace.steps, start=1):
            lines.append(
                f"{n}\t{step.pos}\t{step.rule_id}\t{' '.join(step.matched)}\t"
                f"{' '.join(step.replacement)}\t{_score_info(step)}"
            )
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def _cmd_transform(args) -> int:
    config = _load_config(args.config) if args.config else {}
    index = ngrams.load_index(args.index)
    k = _setting(args, config, "k", None)
    if k is not None and k != index.k:
        raise ConfigError(f"--k {k} does not match index k={index.k}")
    ruleset = rules_mod.RuleSet(
        rules_mod.load_rules(args.rules), vmax=_vmax_setting(args, config)
    )
    criterion_name = _setting(args, config, "criterion", args.default_criterion)
    if criterion_name == "length":
        base = criteria.LengthCriterion(index)
    elif criterion_name == "frequency":
        base = criteria.FrequencyCriterion(index)
    else:
        raise ConfigError(f"unknown --criterion value {criterion_name!r}")
    grammar = _setting(args, config, "grammar", DEFAULTS["grammar"])
    criterion = criteria.compose(base, *_grammar_checks(grammar, index))
    cascade = _setting(args, config, "cascade", DEFAULTS["cascade"])
    jobs = _setting(args, config, "jobs", DEFAULTS["jobs"])

    lines = sys.stdin.read().splitlines()

    def transform(line: str) -> engine.RewriteTrace:
        return engine.greedy_transform(
            text.tokenize(line), ruleset, criterion, index=index, cascade=cascade
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(transform, lines))
    else:
        traces = [transform(line) for line in lines]
    for trace in traces:
        print(text.detokenize(trace.output))
    if args.trace:
        _write_trace(args.trace, traces)
    return 0


def _cmd_qa(args) -> int:
    config = _load_config(args.config) if args.config else {}
    vmax = _vmax_setting(args, config)
    top_n = _setting(args, config, "top_n", DEFAULTS["top_n"])
    settings = {}
    for key in ("rules", "qrules", "data", "question"):
        settings[key] = _setting(args, config, key, None)
        if settings[key] is None:
            raise ConfigError(f"qa requires --{key} (flag or config file)")
    ruleset = rules_mod.RuleSet(rules_mod.load_rules(settings["rules"]), vmax=vmax)
    # Normalization patterns are anchored, whole-question rewrites; their
    # variables must be able to span the entire sentence.
    qrules = rules_mod.RuleSet(rules_mod.load_rules(settings["qrules"]), vmax=None)
    documents = text.read_corpus(settings["data"])
    question = text.tokenize(settings["question"])
    result = engine.qa_answer(question, documents, qrules, ruleset, top_n=top_n)
    if args.trace:
        lines = [
            f"{n}\t{it.side}\t{it.rule_id}\t{it.similarity}"
            for n, it in enumerate(result.iterations, start=1)
        ]
        Path(args.trace).write_text(
            "".join(line + "\n" for line in lines), encoding="utf-8"
        )
    if not result.found:
        print("no answer found", file=sys.stderr)
        return 1
    print(text.detokenize(result.answer))
    print(text.detokenize(result.support.tokens))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rephrase",
        description="Corpus-driven paraphrasing: compression, polishing, "
        "spoken-style transfer and question answering.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-index", help="count n-grams of a corpus file")
    p.add_argument("corpus", help="corpus file, one sentence per line")
    p.add_argument("-k", type=int, default=None, help="context width (default 2)")
    p.add_argument("-o", "--output", required=True, help="index file to write")
    p.add_argument("--max-n", dest="max_n", type=int, default=None,
                   help="longest counted window (default sized from --rules)")
    p.add_argument("--rules", default=None,
                   help="rule file used to size max-n")
    p.add_argument("--config", default=None, help="key=value config file")
    p.set_defaults(func=_cmd_build_index)

    p = sub.add_parser("extract-rules", help="mine rules from sentence pairs")
    p.add_argument("--pairs", required=True, help="TSV file of sentence pairs")
    p.add_argument("--min-support", dest="min_support", type=int, default=None,
                   help="minimum occurrences to keep a rule (default 2)")
    p.add_argument("--max-hunk", dest="max_hunk", type=int, default=None,
                   help="longest differing region to keep (default 7)")
    p.add_argument("-o", "--output", default=None,
                   help="rule file to write (default: stdout)")
    p.add_argument("--config", default=None, help="key=value config file")
    p.set_defaults(func=_cmd_extract_rules)

    for name, crit, blurb in (
        ("compress", "length", "shorten sentences from stdin"),
        ("polish", "frequency", "rewrite stdin toward more frequent phrasing"),
        ("spoken", "frequency", "polish against a spoken-language index"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("rules", help="rule file")
        p.add_argument("index", help="index file built with build-index")
        p.add_argument("-k", type=int, default=None,
                       help="context width; must match the index")
        p.add_argument("--criterion", choices=("length", "frequency"), default=None,
                       help=f"ranking criterion (default {crit})")
        p.add_argument("--grammar", default=None,
                       help="extra check: none|occurs|threshold:T|context-gain")
        p.add_argument("--vmax", type=int, default=None,
                       help="variable span bound, 0 = unbounded (default 5)")
        p.add_argument("--cascade", action="store_const", const=True, default=None,
                       help="try lower-ranked candidates when the top is rejected")
        p.add_argument("--jobs", type=int, default=None,
                       help="transform sentences in N threads")
        p.add_argument("--trace", default=None, help="write applied steps to FILE")
        p.add_argument("--config", default=None, help="key=value config file")
        p.set_defaults(func=_cmd_transform, default_criterion=crit)

    p = sub.add_parser("qa", help="answer a question from a data file")
    p.add_argument("--rules", default=None, help="rewrite rule file")
    p.add_argument("--qrules", default=None, help="question normalization rules")
    p.add_argument("--data", default=None, help="data file, one sentence per line")
    p.add_argument("--question", default=None, help="the question sentence")
    p.add_argument("--top-n", dest="top_n", type=int, default=None,
                   help="candidate sentences to hill-climb (default 3)")
    p.add_argument("--vmax", type=int, default=None,
                   help="variable span bound, 0 = unbounded (default 5)")
    p.add_argument("--trace", default=None, help="write hill-climb steps to FILE")
    p.add_argument("--config", default=None, help="key=value config file")
    p.set_defaults(func=_cmd_qa)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"rephrase: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except Error as exc:
        print(f"rephrase: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
