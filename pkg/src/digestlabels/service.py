"""Pipeline orchestration and label persistence.

generate_label runs extraction -> evaluation -> fusion -> groundedness for
one CVE and assembles the DigestLabel; LabelStore keeps one canonical JSON
document per CVE-ID with atomic writes.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NoSources, NotFound, SchemaViolation
from .evaluation import evaluate
from .extraction import BASIC_LABELS, extract_record, load_templates, rank_variants
from .fusion import groundedness, load_merge_examples, merge_aspect
from .model import (
    ASPECT_ORDER,
    AspectSet,
    BasicInfo,
    DigestLabel,
    MergedView,
    canonical_json,
    label_from_dict,
    label_to_dict,
    parse_cve_id,
    repo_sort_key,
    validate_label,
)

DEFAULT_DISPERSION_THRESHOLD = 0.2


@dataclass
class PipelineConfig:
    mode: str = "constrained"
    entropy_constraint: bool = True  # False reproduces the no-heuristic ablation
    dispersion_threshold: float = DEFAULT_DISPERSION_THRESHOLD
    provider: dict = field(default_factory=dict)


def _ranked_tuple(values):
    return tuple((entry["value"], entry["frequency"]) for entry in rank_variants(values))


def generate_label(cve: str, tvds, cfg: PipelineConfig, providers,
                   templates=None, merge_examples=None, cvss=None) -> DigestLabel:
    """Run the full pipeline for one CVE-ID and assemble its label.

    ``cvss`` is optional pass-through metadata: a map repo -> score; the
    first supplier in repository priority order wins.
    """
    cve = parse_cve_id(cve)
    tvds = sorted(tvds, key=lambda t: repo_sort_key(t.repo))
    if not tvds:
        raise NoSources(f"no TVDs supplied for {cve}")
    if templates is None and cfg.mode == "constrained":
        templates = load_templates()

    union = AspectSet(cve)
    per_source = {}
    basic_values = {label: [] for label in BASIC_LABELS}
    for tvd in tvds:
        record = extract_record(tvd, cfg.mode, providers.llm, templates=templates)
        union.merge_from(record.aspects)
        per_source[tvd.repo] = {
            t: [a.text for a in record.aspects.entries[t]] for t in ASPECT_ORDER
        }
        for label in BASIC_LABELS:
            basic_values[label].extend(record.basic[label])

    scores = evaluate(union, providers.llm, providers.embedder)

    merge_examples = merge_examples if merge_examples is not None else load_merge_examples()
    merged = {}
    for aspect_type in ASPECT_ORDER:
        values = union.entries[aspect_type]
        if not values:
            continue
        result = merge_aspect(values, providers.llm, examples=merge_examples,
                              entropy_constraint=cfg.entropy_constraint)
        if len(values) == 1:
            # identity merge: single-source values are trivially grounded
            check = {"grounded": True, "novel_terms": []}
        else:
            check = groundedness(result.text, tvds, providers.llm)
        merged[aspect_type] = MergedView(
            text=result.text,
            contributing_sources=result.contributing_sources,
            grounded=check["grounded"],
        )

    cvss_entry = None
    if cvss:
        for repo in sorted(cvss, key=repo_sort_key):
            cvss_entry = {"score": float(cvss[repo]), "source": repo}
            break

    return DigestLabel(
        cve_id=cve,
        cvss=cvss_entry,
        basic_info=BasicInfo(
            product=_ranked_tuple(basic_values["Product"]),
            component=_ranked_tuple(basic_values["Component"]),
            version=_ranked_tuple(basic_values["Version"]),
        ),
        merged=merged,
        per_source=per_source,
        evaluation=scores,
        pipeline_mode=cfg.mode,
    )


class LabelStore:
    """Flat directory of label documents, one ``<cve_id>.json`` each.

    Writes go to a temp file in the same directory followed by an atomic
    rename, so readers never observe partial documents.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, cve: str) -> Path:
        return self.root / f"{parse_cve_id(cve)}.json"

    def store(self, label: DigestLabel) -> str:
        doc = label_to_dict(label)
        validate_label(doc)
        text = canonical_json(doc)
        path = self._path(label.cve_id)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return text

    def load_raw(self, cve: str) -> str:
        path = self._path(cve)
        if not path.exists():
            raise NotFound(f"no stored label for {cve}")
        text = path.read_text(encoding="utf-8")
        try:
            validate_label(json.loads(text))
        except (json.JSONDecodeError, SchemaViolation) as exc:
            raise SchemaViolation(f"{path}: {exc}") from exc
        return text

    def load(self, cve: str) -> DigestLabel:
        return label_from_dict(json.loads(self.load_raw(cve)))

    def list_ids(self):
        return sorted(p.stem for p in self.root.glob("CVE-*.json"))


class KeyedLocks:
    """Per-CVE generation locks so concurrent requests for one ID serialize."""

    def __init__(self):
        self._guard = threading.Lock()
        self._locks: dict = {}

    def get(self, key: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())
