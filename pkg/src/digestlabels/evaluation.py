"""Integrity and diversity scoring for the label's Evaluation section.

Integrity is the presence count over the five aspect types. Diversity is
the anchor-word semantic dispersion of the values within one aspect type:
anchor terms per value, one embedding per value, the full pairwise cosine
matrix (self-pairs included), 1 - mean similarity, binned onto a 5-point
Likert scale in 0.2 steps.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass

from .model import ASPECT_ORDER, AspectSet, AspectType, EvaluationScores, normalize_text
from .providers import CompletionRequest, cosine

ANCHOR_TAG = "anchors"
ANCHOR_PROMPT = "Extract computer specific terms from sentence: "

_LIKERT_EDGES = (0.2, 0.4, 0.6, 0.8)


def compute_integrity(aspects: AspectSet) -> dict:
    """Presence count plus the missing aspect types in canonical order."""
    missing = [t for t in ASPECT_ORDER if not aspects.entries[t]]
    return {"present": len(ASPECT_ORDER) - len(missing), "missing": missing}


def extract_anchor_words(aspect_text: str, llm) -> list:
    """LLM-extracted domain terms, deduplicated and normalized; may be empty."""
    raw = llm.complete(CompletionRequest(prompt=ANCHOR_PROMPT + aspect_text, tag=ANCHOR_TAG))
    terms = []
    seen = set()
    for part in re.split(r"[,\n]", raw):
        term = normalize_text(part)
        if term and term.lower() not in seen:
            seen.add(term.lower())
            terms.append(term)
    return terms


@dataclass
class DiversityComputation:
    aspects: list
    pairwise_sims: list  # n x n matrix, self-pairs included
    mean_sim: float
    dispersion: float  # clamp(1 - mean_sim, 0, 1)


def _zero_vector(embedder):
    return [0.0] * embedder.dimension


def aspect_dispersion(values, llm, embedder) -> DiversityComputation:
    """Pairwise anchor-embedding similarity over all ordered pairs.

    Zero or one value means no disagreement is possible (mean 1, dispersion
    0). A value whose anchor list comes back empty embeds as the zero
    vector, which registers as cosine 0 against everything including itself.
    """
    values = list(values)
    if len(values) <= 1:
        matrix = [[1.0]] if values else []
        return DiversityComputation(aspects=values, pairwise_sims=matrix,
                                    mean_sim=1.0, dispersion=0.0)
    vectors = []
    for value in values:
        anchors = list(value.anchor_words) or extract_anchor_words(value.text, llm)
        joined = " ".join(anchors).strip()
        vectors.append(embedder.embed(joined) if joined else _zero_vector(embedder))
    matrix = [[cosine(u, v) for v in vectors] for u in vectors]
    n = len(vectors)
    mean_sim = sum(sum(row) for row in matrix) / (n * n)
    dispersion = min(1.0, max(0.0, 1.0 - mean_sim))
    return DiversityComputation(aspects=values, pairwise_sims=matrix,
                                mean_sim=mean_sim, dispersion=dispersion)


def likert_map(dispersion: float) -> int:
    """Half-open 0.2 bins: [0,0.2) -> 1 ... [0.8,1.0] -> 5. Input is clamped."""
    d = min(1.0, max(0.0, dispersion))
    return 1 + bisect.bisect_right(_LIKERT_EDGES, d)


def evaluate(union_aspects: AspectSet, llm, embedder) -> EvaluationScores:
    """Full Evaluation section for the union of all sources' aspects."""
    integrity = compute_integrity(union_aspects)
    diversity = {}
    for aspect_type in ASPECT_ORDER:
        comp = aspect_dispersion(union_aspects.entries[aspect_type], llm, embedder)
        diversity[aspect_type] = {
            "dispersion": comp.dispersion,
            "likert": likert_map(comp.dispersion),
        }
    return EvaluationScores(
        integrity_present=integrity["present"],
        missing=tuple(integrity["missing"]),
        diversity=diversity,
    )


def chart_data(scores: EvaluationScores) -> dict:
    """Chart-ready projection: integrity pie, diversity radar, textual notes."""
    missing = set(scores.missing)
    return {
        "pie": [{"aspect": t.value, "present": t not in missing} for t in ASPECT_ORDER],
        "radar": [scores.diversity[t]["likert"] for t in ASPECT_ORDER],
        "notes": [t.value for t in ASPECT_ORDER if scores.diversity[t]["likert"] > 2],
    }
