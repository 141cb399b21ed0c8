"""Entropy-constrained fusion of inconsistent key-aspect values.

The word-frequency Shannon entropy of the concatenated values is injected
into a few-shot merge prompt to discourage over-merging; groundedness of
the merged text is checked by looking each anchor term up in the source
descriptions (an automated substring proxy for the strict aspect-wise
hallucination criterion).
"""

from __future__ import annotations

import importlib.resources
import json
import math
import string
import unicodedata
from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyInput, NoExamples, SchemaViolation, TooFewValues
from .model import normalize_text
from .providers import CompletionRequest

MERGE_TAG = "merge"
MERGE_TASK_LINE = 'Task: "Based on information entropy, I can merge sentence_list."'
MAX_REPROMPTS = 2

_PUNCT = string.punctuation + "‘’“”«»–—…"


def tokenize(text: str) -> list:
    """Lower-cased word tokens, edge punctuation stripped.

    Internal hyphens, dots, and digits survive so tokens like "0f05" and
    "3.2.1" stay intact ("opcode." -> "opcode").
    """
    tokens = []
    for raw in unicodedata.normalize("NFC", text).lower().split():
        token = raw.strip(_PUNCT)
        if token:
            tokens.append(token)
    return tokens


@dataclass(frozen=True)
class EntropyInput:
    """Token stream of the concatenated sentences plus its count table."""

    tokens: tuple
    counts: dict
    total: int


def shannon_entropy(sentences) -> tuple:
    """Word-frequency entropy in bits of the concatenated sentences.

    Returns (EntropyInput, bits); the sum runs over distinct tokens with
    probabilities count/total.
    """
    tokens = []
    for sentence in sentences:
        tokens.extend(tokenize(sentence))
    if not tokens:
        raise EmptyInput("no tokens in any sentence")
    counts = Counter(tokens)
    total = len(tokens)
    bits = -sum((c / total) * math.log2(c / total) for c in counts.values())
    # -0.0 shows up for single-token streams; normalize the sign
    return EntropyInput(tokens=tuple(tokens), counts=dict(counts), total=total), bits + 0.0


@dataclass(frozen=True)
class MergeExample:
    """One supervision example for the merge prompt."""

    sentence_list: tuple
    entropy_bits: float
    merge_result: str


def load_merge_examples(path=None) -> list:
    """Load merge examples; each entry's stated entropy is recomputed on load."""
    if path is None:
        source = importlib.resources.files("digestlabels.data").joinpath("merge_examples.json")
        doc = json.loads(source.read_text(encoding="utf-8"))
    else:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    examples = []
    for entry in doc:
        sentences = tuple(entry["sentence_list"])
        _, bits = shannon_entropy(sentences)
        if abs(bits - entry["entropy_bits"]) > 1e-9:
            raise SchemaViolation(
                f"merge example entropy {entry['entropy_bits']} != recomputed {bits}"
            )
        examples.append(MergeExample(sentences, entry["entropy_bits"], entry["merge_result"]))
    return examples


def _format_bits(bits: float) -> str:
    return f"{bits:.6g}"


def _sentence_list_line(sentences) -> str:
    return "Sentence_list: [" + ", ".join(json.dumps(s, ensure_ascii=False) for s in sentences) + "]"


def build_merge_prompt(values, entropy_bits: float, examples,
                       entropy_constraint: bool = True) -> str:
    """Few-shot merge prompt: worked examples, then the task block.

    With entropy_constraint=False the "Information entropy" lines are
    omitted (the no-heuristic ablation shape).
    """
    if len(values) < 2:
        raise TooFewValues(f"need at least 2 values to merge, got {len(values)}")
    if not examples:
        raise NoExamples("at least one merge example is required")
    parts = []
    for index, example in enumerate(examples, start=1):
        block = [f"Example{index}:", MERGE_TASK_LINE, _sentence_list_line(example.sentence_list)]
        if entropy_constraint:
            block.append(f"Information entropy: {_format_bits(example.entropy_bits)}")
        block.append(f"Merge result: {example.merge_result}")
        parts.append("\n".join(block))
    task = ["Task Description:", MERGE_TASK_LINE,
            _sentence_list_line([v.text for v in values])]
    if entropy_constraint:
        task.append(f"Information entropy: {_format_bits(entropy_bits)}")
    task.append("Merge result")
    parts.append("\n".join(task))
    return "\n".join(parts)


@dataclass(frozen=True)
class MergedAspect:
    aspect_type: object
    text: str
    contributing_sources: tuple
    entropy_bits: float
    grounded: bool = True
    novel_terms: tuple = ()
    fallback: bool = False  # set when the provider returned nothing usable


def merge_aspect(values, llm, examples=None, entropy_constraint: bool = True) -> MergedAspect:
    """Merge the values of one aspect type into a single description.

    A single value passes through byte-exact with no provider call; two or
    more values go through the entropy-constrained merge prompt. An empty
    completion after two re-prompts falls back to the longest input value.
    """
    if not values:
        raise EmptyInput("merge_aspect needs at least one value")
    sources = []
    for value in values:
        if value.source not in sources:
            sources.append(value.source)
    _, bits = shannon_entropy([v.text for v in values])
    if len(values) == 1:
        return MergedAspect(
            aspect_type=values[0].aspect_type,
            text=values[0].text,
            contributing_sources=tuple(sources),
            entropy_bits=bits,
        )
    examples = examples if examples is not None else load_merge_examples()
    prompt = build_merge_prompt(values, bits, examples, entropy_constraint=entropy_constraint)
    merged_text = ""
    for _ in range(1 + MAX_REPROMPTS):
        raw = llm.complete(CompletionRequest(prompt=prompt, tag=MERGE_TAG))
        merged_text = raw.strip().split("\n\n")[0].strip()
        if merged_text:
            break
    if not merged_text:
        longest = max(values, key=lambda v: len(v.text))
        return MergedAspect(
            aspect_type=values[0].aspect_type,
            text=longest.text,
            contributing_sources=tuple(sources),
            entropy_bits=bits,
            fallback=True,
        )
    return MergedAspect(
        aspect_type=values[0].aspect_type,
        text=merged_text,
        contributing_sources=tuple(sources),
        entropy_bits=bits,
    )


def _normalize_for_match(text: str) -> str:
    return normalize_text(text).lower()


def groundedness(merged: str, sources, llm) -> dict:
    """Check that every anchor term of the merged text occurs in the sources.

    Terms are matched as normalized substrings of the concatenated source
    texts; unmatched terms are reported as novel.
    """
    from .evaluation import extract_anchor_words

    if not sources:
        raise EmptyInput("groundedness needs at least one source TVD")
    haystack = _normalize_for_match(" ".join(tvd.text for tvd in sources))
    novel = []
    for term in extract_anchor_words(merged, llm):
        if _normalize_for_match(term) not in haystack:
            novel.append(term)
    return {"grounded": not novel, "novel_terms": novel}


def hallucination_rate(flags) -> float:
    """Percent of merged aspects that are not grounded."""
    flags = list(flags)
    if not flags:
        raise EmptyInput("hallucination_rate needs at least one flag")
    return 100.0 * sum(1 for grounded in flags if not grounded) / len(flags)
