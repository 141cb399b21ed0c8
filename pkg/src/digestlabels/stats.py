"""Corpus-level measurements: missing rates, inconsistency, value counts.

All operations take ``groups``: a map cve_id -> {repo -> AspectSet}. Rates
that depend on the authors' full corpus are documented reference values
only (see REFERENCE_* below) and are never asserted in tests.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import EmptyCorpus
from .evaluation import aspect_dispersion
from .fusion import tokenize
from .model import ASPECT_ORDER, AspectType, normalize_text

#: Paper-scale reference points, reproduced here for documentation only:
#: per-repository Root Cause missing rates around 0.59-0.66, dropping to
#: 0.23 after merging; mean aspect word lengths 5.1 / 3.8 / 13.6 / 9.7 / 8.4
#: (VulnerabilityType, AttackerType, AttackVector, Impact, RootCause).
REFERENCE_MERGED_MISSING_ROOT_CAUSE = 0.23
REFERENCE_MEAN_WORD_LENGTHS = {
    AspectType.VULNERABILITY_TYPE: 5.1,
    AspectType.ATTACKER_TYPE: 3.8,
    AspectType.ATTACK_VECTOR: 13.6,
    AspectType.IMPACT: 9.7,
    AspectType.ROOT_CAUSE: 8.4,
}

DEFAULT_DISPERSION_THRESHOLD = 0.2


@dataclass
class CorpusMetrics:
    missing_rate: dict  # (repo, AspectType) -> float
    merged_missing_rate: dict  # AspectType -> float
    inconsistency_rate: dict  # AspectType -> float
    value_count_histogram: dict  # AspectType -> {count: frequency}
    mean_word_length: dict  # AspectType -> float


def _require_groups(groups):
    if not groups:
        raise EmptyCorpus("no CVE groups in corpus")


def missing_rate(groups, repo: str, aspect: AspectType) -> float:
    _require_groups(groups)
    present = sum(
        1
        for repos in groups.values()
        if repo in repos and repos[repo].entries[aspect]
    )
    return 1.0 - present / len(groups)


def merged_missing_rate(groups, aspect: AspectType) -> float:
    _require_groups(groups)
    present = sum(
        1
        for repos in groups.values()
        if any(aspects.entries[aspect] for aspects in repos.values())
    )
    return 1.0 - present / len(groups)


def _all_values(repos, aspect):
    values = []
    for aspects in repos.values():
        values.extend(aspects.entries[aspect])
    return values


def _distinct_texts(values):
    return {normalize_text(v.text).lower() for v in values}


def inconsistency_rate(groups, aspect: AspectType, threshold: float = DEFAULT_DISPERSION_THRESHOLD,
                       llm=None, embedder=None) -> float:
    """Fraction of populated CVEs whose aspect values materially disagree.

    With providers supplied, disagreement means dispersion > threshold;
    without them, the provider-free fallback counts CVEs with more than
    one distinct normalized value. The denominator is CVEs with at least
    one value for the aspect.
    """
    _require_groups(groups)
    populated = 0
    inconsistent = 0
    for repos in groups.values():
        values = _all_values(repos, aspect)
        if not values:
            continue
        populated += 1
        if len(values) < 2:
            continue
        if llm is not None and embedder is not None:
            dispersion = aspect_dispersion(values, llm, embedder).dispersion
        else:
            # provider-free fallback: distinct normalized texts count as
            # maximal dispersion, identical ones as none
            dispersion = 1.0 if len(_distinct_texts(values)) > 1 else 0.0
        if dispersion > threshold:
            inconsistent += 1
    if populated == 0:
        return 0.0
    return inconsistent / populated


def value_count_histogram(groups, aspect: AspectType) -> dict:
    """Distinct normalized values per CVE, bucketed by count."""
    _require_groups(groups)
    histogram: dict = {}
    for repos in groups.values():
        count = len(_distinct_texts(_all_values(repos, aspect)))
        if count:
            histogram[count] = histogram.get(count, 0) + 1
    return histogram


def mean_word_length(groups, aspect: AspectType) -> float:
    _require_groups(groups)
    lengths = [
        len(tokenize(value.text))
        for repos in groups.values()
        for value in _all_values(repos, aspect)
    ]
    if not lengths:
        raise EmptyCorpus(f"no values for {aspect.value} in corpus")
    return sum(lengths) / len(lengths)


def compute_metrics(groups, threshold: float = DEFAULT_DISPERSION_THRESHOLD,
                    llm=None, embedder=None) -> CorpusMetrics:
    _require_groups(groups)
    repos = sorted({repo for group in groups.values() for repo in group})
    metrics = CorpusMetrics(
        missing_rate={}, merged_missing_rate={}, inconsistency_rate={},
        value_count_histogram={}, mean_word_length={},
    )
    for aspect in ASPECT_ORDER:
        for repo in repos:
            metrics.missing_rate[(repo, aspect)] = missing_rate(groups, repo, aspect)
        metrics.merged_missing_rate[aspect] = merged_missing_rate(groups, aspect)
        metrics.inconsistency_rate[aspect] = inconsistency_rate(
            groups, aspect, threshold=threshold, llm=llm, embedder=embedder
        )
        metrics.value_count_histogram[aspect] = value_count_histogram(groups, aspect)
        try:
            metrics.mean_word_length[aspect] = mean_word_length(groups, aspect)
        except EmptyCorpus:
            metrics.mean_word_length[aspect] = 0.0
    return metrics


def metrics_to_dict(metrics: CorpusMetrics) -> dict:
    return {
        "missing_rate": {
            f"{repo}/{aspect.value}": rate
            for (repo, aspect), rate in sorted(metrics.missing_rate.items(),
                                               key=lambda kv: (kv[0][0], kv[0][1].value))
        },
        "merged_missing_rate": {t.value: metrics.merged_missing_rate[t] for t in ASPECT_ORDER},
        "inconsistency_rate": {t.value: metrics.inconsistency_rate[t] for t in ASPECT_ORDER},
        "value_count_histogram": {
            t.value: {str(k): v for k, v in sorted(metrics.value_count_histogram[t].items())}
            for t in ASPECT_ORDER
        },
        "mean_word_length": {t.value: metrics.mean_word_length[t] for t in ASPECT_ORDER},
    }


def metrics_to_csv(metrics: CorpusMetrics) -> str:
    """One row per (repo, aspect) with the merged/inconsistency columns repeated."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["repo", "aspect", "missing_rate", "merged_missing_rate",
                     "inconsistency_rate", "mean_word_length"])
    for (repo, aspect), rate in sorted(metrics.missing_rate.items(),
                                       key=lambda kv: (kv[0][0], kv[0][1].value)):
        writer.writerow([
            repo, aspect.value, f"{rate:.6f}",
            f"{metrics.merged_missing_rate[aspect]:.6f}",
            f"{metrics.inconsistency_rate[aspect]:.6f}",
            f"{metrics.mean_word_length[aspect]:.6f}",
        ])
    return buffer.getvalue()
