"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.
"""

import json
import math
import random
import time

from fastapi.testclient import TestClient

from digestlabels.api import create_app
from digestlabels.evaluation import ANCHOR_PROMPT, aspect_dispersion, likert_map
from digestlabels.fusion import groundedness, hallucination_rate, merge_aspect, shannon_entropy, tokenize
from digestlabels.ingestion import group_by_cve
from digestlabels.model import (
    ASPECT_ORDER,
    AspectSet,
    AspectType,
    KeyAspect,
    Tvd,
    canonical_json,
    label_to_dict,
)
from digestlabels.providers import MockCompletionProvider, MockEmbedder, ProviderScript, fnv1a64
from digestlabels.service import LabelStore, PipelineConfig, generate_label
from digestlabels.stats import merged_missing_rate, missing_rate

from conftest import FIG1_TEXTS, fig1_providers, fig1_tvds

RC = AspectType.ROOT_CAUSE
REPOS = ("CVE", "IBM", "CNNVD", "JVN")


def _ok(name):
    print(f"[PASS] {name}")


# 1. Entropy oracle equivalence ---------------------------------------------


def _oracle_entropy(tokens):
    total = len(tokens)
    bits = 0.0
    for token in sorted(set(tokens)):
        p = tokens.count(token) / total
        bits -= p * math.log2(p)
    return bits


def test_entropy_oracle_equivalence():
    rng = random.Random(20260826)
    start = time.monotonic()
    for _ in range(1000):
        distinct = rng.randint(1, 10)
        vocab = [f"w{i}" for i in range(distinct)]
        size = rng.randint(distinct, 50)
        tokens = vocab + [rng.choice(vocab) for _ in range(size - distinct)]
        rng.shuffle(tokens)
        _, bits = shannon_entropy([" ".join(tokens)])
        assert abs(bits - _oracle_entropy(tokens)) <= 1e-9
        assert (bits == 0.0) == (len(set(tokens)) == 1)
        assert bits <= math.log2(len(set(tokens))) + 1e-9
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    _ok(f"entropy oracle equivalence (1000 multisets, {elapsed:.2f}s)")


# 2. Likert binning table ----------------------------------------------------


def test_likert_binning_table():
    inputs = [round(0.1 * i, 1) for i in range(11)]
    expected = [1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 5]
    assert [likert_map(d) for d in inputs] == expected
    _ok("likert binning table {0.0..1.0} -> {1,1,2,2,3,3,4,4,5,5,5}")


# 3. Algorithm fidelity of dispersion ----------------------------------------


def test_dispersion_fidelity():
    dim = 8
    embedder = MockEmbedder(dimension=dim)

    # permutation invariance
    rng = random.Random(5)
    values = [
        KeyAspect(aspect_type=RC, text=f"value {i}", source="CVE", anchor_words=(w,))
        for i, w in enumerate(["opcode", "syscall", "kernel", "opcode", "stack"])
    ]
    base = aspect_dispersion(values, None, embedder).dispersion
    for _ in range(10):
        shuffled = values[:]
        rng.shuffle(shuffled)
        assert aspect_dispersion(shuffled, None, embedder).dispersion == base

    # duplicated-value lists yield dispersion 0
    dup = [KeyAspect(aspect_type=RC, text="same", source=r, anchor_words=("opcode", "0f05"))
           for r in REPOS]
    assert abs(aspect_dispersion(dup, None, embedder).dispersion) <= 1e-12

    # disjoint single-token anchors: full matrix with self-pairs -> mean 0.5
    first = "opcode"
    second = next(
        w for w in ("syscall", "kernel", "stack", "daemon")
        if fnv1a64(w.encode()) % dim != fnv1a64(first.encode()) % dim
    )
    pair = [
        KeyAspect(aspect_type=RC, text="a", source="CVE", anchor_words=(first,)),
        KeyAspect(aspect_type=RC, text="b", source="IBM", anchor_words=(second,)),
    ]
    comp = aspect_dispersion(pair, None, embedder)
    assert abs(comp.mean_sim - 0.5) <= 1e-9
    _ok("dispersion fidelity (permutation invariance, duplicates, disjoint-anchor 0.5)")


# 4. Union-bound property ----------------------------------------------------


def _random_corpus(rng, n_cves=50):
    groups = {}
    for i in range(n_cves):
        cve = f"CVE-2021-{1000 + i}"
        repos = {}
        for repo in REPOS:
            aspect_set = AspectSet(cve)
            for aspect_type in ASPECT_ORDER:
                if rng.random() < 0.5:
                    aspect_set.add(KeyAspect(aspect_type=aspect_type,
                                             text=f"{aspect_type.value} {rng.randint(0, 5)}",
                                             source=repo))
            repos[repo] = aspect_set
        groups[cve] = repos
    return groups


def test_union_bound_property():
    rng = random.Random(99)
    for _ in range(100):
        groups = _random_corpus(rng)
        for aspect_type in ASPECT_ORDER:
            merged = merged_missing_rate(groups, aspect_type)
            assert merged <= min(missing_rate(groups, repo, aspect_type) for repo in REPOS)
    _ok("union bound: merged missing rate <= min per-repo rate (100 corpora)")


# 5. Identity merge ----------------------------------------------------------


def test_identity_merge_audited():
    provider = MockCompletionProvider(ProviderScript())
    text = "the improper handling of the syscall opcode 0f05 by KVM on specific CPU models"
    value = KeyAspect(aspect_type=RC, text=text, source="JVN")
    merged = merge_aspect([value], provider, examples=[])
    assert merged.text == text
    assert provider.calls == 0
    _ok("identity merge: byte-exact with zero provider calls")


# 6. Groundedness / hallucination rate ---------------------------------------


class _AnchorEcho:
    """Anchor extractor returning every token of the target sentence."""

    def complete(self, req):
        sentence = req.prompt[len(ANCHOR_PROMPT):]
        return ", ".join(tokenize(sentence))


def _synthetic_merges(n=100):
    rng = random.Random(7)
    vocab = ["opcode", "syscall", "kernel", "buffer", "overflow", "daemon",
             "privilege", "escalation", "heap", "packet"]
    cases = []
    for i in range(n):
        cve = f"CVE-2022-{1000 + i}"
        words_a = rng.sample(vocab, 4)
        words_b = rng.sample(vocab, 4)
        a = Tvd(cve_id=cve, repo="CVE", text=" ".join(words_a))
        b = Tvd(cve_id=cve, repo="IBM", text=" ".join(words_b))
        # recombination mock: the merged text only reorders/concatenates
        merged = " ".join(words_b + words_a)
        cases.append((merged, [a, b]))
    return cases


def test_groundedness_hallucination_rate():
    llm = _AnchorEcho()
    cases = _synthetic_merges(100)
    flags = [groundedness(merged, sources, llm)["grounded"] for merged, sources in cases]
    assert hallucination_rate(flags) == 0.0

    injected = [
        (merged + " bluetooth" if i < 14 else merged, sources)
        for i, (merged, sources) in enumerate(cases)
    ]
    flags = [groundedness(merged, sources, llm)["grounded"] for merged, sources in injected]
    assert hallucination_rate(flags) == 14.0
    _ok("groundedness: recombination 0.0%, 14/100 injected -> 14.0%")


# 7. CVE-2012-0045 end-to-end fixture ----------------------------------------


def test_cve_2012_0045_end_to_end(tmp_path):
    start = time.monotonic()
    label = generate_label("CVE-2012-0045", fig1_tvds(), PipelineConfig(), fig1_providers())

    tokens = tokenize(label.merged[RC].text)
    for expected in ("0f05", "cpu", "models", "modes"):
        assert expected in tokens

    for repo, text in FIG1_TEXTS.items():
        assert label.per_source[repo][RC] == [text]

    populated = {
        t for aspects in label.per_source.values() for t, texts in aspects.items() if texts
    }
    assert label.evaluation.integrity_present == len(populated)

    store = LabelStore(tmp_path / "labels")
    stored = store.store(label)
    assert store.load_raw("CVE-2012-0045") == stored
    assert canonical_json(label_to_dict(store.load("CVE-2012-0045"))) == stored

    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    _ok(f"CVE-2012-0045 end-to-end fixture ({elapsed:.3f}s)")


# 8. Service contract --------------------------------------------------------


def test_service_contract(tmp_path):
    app = create_app(
        store=LabelStore(tmp_path / "labels"),
        corpus_groups=group_by_cve(fig1_tvds()),
        cfg=PipelineConfig(),
        providers_factory=fig1_providers,
    )
    client = TestClient(app)

    created = client.post("/api/v1/labels", json={"cve_id": "CVE-2012-0045"})
    assert created.status_code == 201
    fetched = client.get("/api/v1/labels/CVE-2012-0045")
    assert fetched.content == created.content

    full = json.loads(fetched.content)
    for repo in REPOS:
        projection = client.get("/api/v1/labels/CVE-2012-0045",
                                params={"source": repo}).json()
        for aspect, texts in projection["aspects"].items():
            assert texts == full["per_source"][repo][aspect]

    assert client.post("/api/v1/labels", json={"cve_id": "CVE-12-45"}).status_code == 422
    assert client.get("/api/v1/labels/CVE-2019-9999").status_code == 404
    _ok("service contract: byte-identical round trip, projection subset, 422, 404")


# 9. Determinism -------------------------------------------------------------


def test_pipeline_determinism():
    first = label_to_dict(
        generate_label("CVE-2012-0045", fig1_tvds(), PipelineConfig(), fig1_providers())
    )
    second = label_to_dict(
        generate_label("CVE-2012-0045", fig1_tvds(), PipelineConfig(), fig1_providers())
    )
    first.pop("generated_at")
    second.pop("generated_at")
    assert first == second
    _ok("determinism: identical inputs/scripts -> identical labels modulo generated_at")
