import random

import pytest

from digestlabels.errors import EmptyCorpus
from digestlabels.model import ASPECT_ORDER, AspectSet, AspectType, KeyAspect
from digestlabels.providers import MockEmbedder, fnv1a64
from digestlabels.stats import (
    compute_metrics,
    inconsistency_rate,
    mean_word_length,
    merged_missing_rate,
    metrics_to_csv,
    metrics_to_dict,
    missing_rate,
    value_count_histogram,
)

RC = AspectType.ROOT_CAUSE


def _cve(n):
    return f"CVE-2020-{1000 + n}"


def _group(cve, per_repo):
    """per_repo: {repo: {aspect_type: [texts]}}"""
    repos = {}
    for repo, aspects in per_repo.items():
        aspect_set = AspectSet(cve)
        for aspect_type, texts in aspects.items():
            for text in texts:
                aspect_set.add(KeyAspect(aspect_type=aspect_type, text=text, source=repo))
        repos[repo] = aspect_set
    return repos


def test_missing_rate_quarter():
    groups = {
        _cve(i): _group(_cve(i), {"CVE": {RC: ["cause"] if i < 3 else []}})
        for i in range(4)
    }
    assert missing_rate(groups, "CVE", RC) == pytest.approx(0.25)


def test_missing_rate_all_present():
    groups = {_cve(i): _group(_cve(i), {"CVE": {RC: ["cause"]}}) for i in range(4)}
    assert missing_rate(groups, "CVE", RC) == 0.0


def test_missing_rate_empty_corpus():
    with pytest.raises(EmptyCorpus):
        missing_rate({}, "CVE", RC)


def test_merged_missing_rate_set_union_oracle():
    # repoA covers CVEs {0,1}, repoB covers {1,2}, total 4 -> union misses 1 of 4
    groups = {}
    for i in range(4):
        groups[_cve(i)] = _group(_cve(i), {
            "CVE": {RC: ["a"] if i in (0, 1) else []},
            "IBM": {RC: ["b"] if i in (1, 2) else []},
        })
    assert merged_missing_rate(groups, RC) == pytest.approx(0.25)


def test_merged_missing_single_repo_equals_repo_rate():
    groups = {
        _cve(i): _group(_cve(i), {"CVE": {RC: ["x"] if i % 2 else []}})
        for i in range(6)
    }
    assert merged_missing_rate(groups, RC) == missing_rate(groups, "CVE", RC)


def _random_groups(rng, n_cves=50, repos=("CVE", "IBM", "CNNVD", "JVN")):
    groups = {}
    for i in range(n_cves):
        per_repo = {}
        for repo in repos:
            aspects = {}
            for aspect_type in ASPECT_ORDER:
                aspects[aspect_type] = (
                    [f"{aspect_type.value} text {rng.randint(0, 3)}"]
                    if rng.random() < 0.6 else []
                )
            per_repo[repo] = aspects
        groups[_cve(i)] = _group(_cve(i), per_repo)
    return groups


def test_union_bound_property():
    rng = random.Random(42)
    for _ in range(20):
        groups = _random_groups(rng)
        for aspect_type in ASPECT_ORDER:
            merged = merged_missing_rate(groups, aspect_type)
            per_repo = [missing_rate(groups, repo, aspect_type)
                        for repo in ("CVE", "IBM", "CNNVD", "JVN")]
            assert merged <= min(per_repo) + 1e-15


def test_inconsistency_all_single_valued():
    groups = {_cve(i): _group(_cve(i), {"CVE": {RC: ["only"]}}) for i in range(4)}
    assert inconsistency_rate(groups, RC) == 0.0


def test_inconsistency_identical_texts_zero():
    groups = {
        _cve(i): _group(_cve(i), {"CVE": {RC: ["same cause"]}, "IBM": {RC: ["same cause"]}})
        for i in range(4)
    }
    assert inconsistency_rate(groups, RC) == 0.0


def test_inconsistency_dispersion_mode():
    # 2 of 4 CVEs carry disjoint-anchor value pairs (dispersion 0.5 > 0.2)
    dim = 8
    words = ["opcode", "syscall", "kernel", "stack", "daemon"]
    a = words[0]
    b = next(w for w in words[1:] if fnv1a64(w.encode()) % dim != fnv1a64(a.encode()) % dim)
    groups = {}
    for i in range(4):
        if i < 2:
            per_repo = {"CVE": {RC: [a]}, "IBM": {RC: [b]}}
        else:
            per_repo = {"CVE": {RC: [a]}}
        groups[_cve(i)] = _group(_cve(i), per_repo)

    class EchoAnchors:
        def complete(self, req):
            return req.prompt.rsplit(": ", 1)[-1]

    rate = inconsistency_rate(groups, RC, threshold=0.2,
                              llm=EchoAnchors(), embedder=MockEmbedder(dimension=dim))
    assert rate == pytest.approx(0.5)


def test_inconsistency_threshold_one_is_zero():
    rng = random.Random(3)
    groups = _random_groups(rng, n_cves=10)
    for aspect_type in ASPECT_ORDER:
        assert inconsistency_rate(groups, aspect_type, threshold=1.0) == 0.0


def test_value_count_histogram():
    groups = {
        _cve(0): _group(_cve(0), {"CVE": {RC: ["x"]}}),
        _cve(1): _group(_cve(1), {"CVE": {RC: ["x"]}, "IBM": {RC: ["y"]}}),
        _cve(2): _group(_cve(2), {"CVE": {RC: ["x"]}, "IBM": {RC: ["X"]}}),  # dup collapses
    }
    assert value_count_histogram(groups, RC) == {1: 2, 2: 1}


def test_mean_word_length():
    groups = {
        _cve(0): _group(_cve(0), {"CVE": {RC: ["a b"]}, "IBM": {RC: ["c d e"]}}),
    }
    assert mean_word_length(groups, RC) == pytest.approx(2.5)


def test_mean_word_length_empty():
    groups = {_cve(0): _group(_cve(0), {"CVE": {RC: []}})}
    with pytest.raises(EmptyCorpus):
        mean_word_length(groups, RC)


def test_rates_invariant_under_reordering():
    rng = random.Random(9)
    groups = _random_groups(rng, n_cves=12)
    reordered = dict(reversed(list(groups.items())))
    for aspect_type in ASPECT_ORDER:
        assert merged_missing_rate(groups, aspect_type) == merged_missing_rate(reordered, aspect_type)
        assert inconsistency_rate(groups, aspect_type) == inconsistency_rate(reordered, aspect_type)


def test_compute_metrics_serializations():
    rng = random.Random(1)
    metrics = compute_metrics(_random_groups(rng, n_cves=8))
    doc = metrics_to_dict(metrics)
    assert set(doc) == {"missing_rate", "merged_missing_rate", "inconsistency_rate",
                        "value_count_histogram", "mean_word_length"}
    csv_text = metrics_to_csv(metrics)
    lines = csv_text.strip().splitlines()
    assert lines[0].startswith("repo,aspect,")
    assert len(lines) == 1 + 4 * 5  # 4 repos x 5 aspects
