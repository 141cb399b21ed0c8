"""Domain types shared by every stage of the pipeline.

All types are immutable value objects after construction and safe to share
between concurrent tasks.
"""

from __future__ import annotations

import datetime as _dt
import json
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum

from .errors import MalformedCveId, SchemaViolation

SCHEMA_VERSION = 1

CVE_ID_RE = re.compile(r"^CVE-(\d{4})-(\d{4,})$")

#: Built-in repository identifiers, in display/merge priority order.
BUILTIN_REPOS = ("CVE", "IBM", "CNNVD", "JVN")

_CUSTOM_REPO_RE = re.compile(r"^[\x21-\x7e]+$")  # non-empty ASCII, no whitespace

PIPELINE_MODES = ("constrained", "vanilla", "cot")


def parse_cve_id(raw: str) -> str:
    """Canonicalize a CVE identifier ("cve-2012-0045" -> "CVE-2012-0045")."""
    candidate = raw.strip().upper()
    m = CVE_ID_RE.match(candidate)
    if not m:
        raise MalformedCveId(f"not a CVE identifier: {raw!r}")
    year = int(m.group(1))
    max_year = _dt.datetime.now(_dt.timezone.utc).year + 1
    if not 1999 <= year <= max_year:
        raise MalformedCveId(f"CVE year {year} outside 1999..{max_year}")
    return candidate


def parse_repo_id(raw: str) -> str:
    """Validate a repository identifier.

    The four built-ins are canonicalized to upper case; anything else must be
    a lower-case ASCII token without whitespace.
    """
    if raw.upper() in BUILTIN_REPOS:
        return raw.upper()
    token = raw.lower()
    if not token or not _CUSTOM_REPO_RE.match(token):
        raise SchemaViolation(f"invalid repository identifier: {raw!r}")
    return token


def repo_sort_key(repo: str):
    """Sort key: built-ins in fixed order, then customs alphabetically."""
    if repo in BUILTIN_REPOS:
        return (0, BUILTIN_REPOS.index(repo), repo)
    return (1, 0, repo)


def normalize_text(text: str) -> str:
    """NFC-normalize, trim, and collapse internal whitespace runs."""
    return re.sub(r"\s+", " ", unicodedata.normalize("NFC", text)).strip()


class AspectType(Enum):
    """The five information units of a vulnerability description.

    Member order is fixed; it drives radar axes and report columns.
    """

    VULNERABILITY_TYPE = "VulnerabilityType"
    ATTACK_VECTOR = "AttackVector"
    ATTACKER_TYPE = "AttackerType"
    ROOT_CAUSE = "RootCause"
    IMPACT = "Impact"

    @classmethod
    def from_label(cls, label: str) -> "AspectType":
        key = re.sub(r"[\s_-]+", "", label).lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise SchemaViolation(f"unknown aspect type: {label!r}")


ASPECT_ORDER = tuple(AspectType)


@dataclass(frozen=True)
class Tvd:
    """One repository's raw textual description of one CVE-ID.

    Empty ``text`` represents a repository with no entry.
    """

    cve_id: str
    repo: str
    text: str
    lang: str = "en"
    retrieved_at: str = ""

    def __post_init__(self):
        object.__setattr__(self, "cve_id", parse_cve_id(self.cve_id))
        object.__setattr__(self, "repo", parse_repo_id(self.repo))
        if not self.retrieved_at:
            object.__setattr__(self, "retrieved_at", utc_now())


def utc_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class KeyAspect:
    """A single extracted aspect value, attributed to its source repository."""

    aspect_type: AspectType
    text: str
    source: str
    anchor_words: tuple = ()

    def __post_init__(self):
        trimmed = normalize_text(self.text)
        if not trimmed:
            raise SchemaViolation("key aspect text must be non-empty")
        object.__setattr__(self, "text", trimmed)
        object.__setattr__(self, "source", parse_repo_id(self.source))
        object.__setattr__(self, "anchor_words", tuple(self.anchor_words))


class AspectSet:
    """Per-CVE map from the five aspect types to sourced aspect values.

    All five keys are always present; an empty list encodes "missing".
    Within one aspect type, (source, normalized text) pairs are unique.
    """

    def __init__(self, cve_id: str, entries=None):
        self.cve_id = parse_cve_id(cve_id)
        self.entries = {t: [] for t in ASPECT_ORDER}
        if entries:
            for aspect_type, values in entries.items():
                for value in values:
                    self.add(value)

    def add(self, aspect: KeyAspect):
        bucket = self.entries[aspect.aspect_type]
        key = (aspect.source, aspect.text.lower())
        if any((a.source, a.text.lower()) == key for a in bucket):
            return
        bucket.append(aspect)

    def values(self, aspect_type: AspectType):
        return list(self.entries[aspect_type])

    def merge_from(self, other: "AspectSet"):
        for values in other.entries.values():
            for aspect in values:
                self.add(aspect)

    def __eq__(self, other):
        return (
            isinstance(other, AspectSet)
            and self.cve_id == other.cve_id
            and self.entries == other.entries
        )


@dataclass(frozen=True)
class EvaluationScores:
    """Integrity (presence) and diversity (dispersion + Likert) per aspect."""

    integrity_present: int
    missing: tuple
    diversity: dict  # AspectType -> {"dispersion": float, "likert": int}

    def __post_init__(self):
        if self.integrity_present + len(self.missing) != len(ASPECT_ORDER):
            raise SchemaViolation("integrity_present + missing must cover all aspects")


@dataclass(frozen=True)
class BasicInfo:
    """Ranked product/component/version variants; rank 0 is display-primary."""

    product: tuple = ()
    component: tuple = ()
    version: tuple = ()  # tuples of (value, frequency), frequency desc


@dataclass(frozen=True)
class MergedView:
    text: str
    contributing_sources: tuple
    grounded: bool


@dataclass(frozen=True)
class DigestLabel:
    """The assembled, persistable, renderable label for one CVE-ID."""

    cve_id: str
    basic_info: BasicInfo
    merged: dict  # AspectType -> MergedView; absent key iff aspect missing
    per_source: dict  # repo -> AspectSet projection {AspectType -> [text, ...]}
    evaluation: EvaluationScores
    pipeline_mode: str
    cvss: dict | None = None  # {"score": float, "source": repo}
    generated_at: str = field(default_factory=utc_now)


# ---------------------------------------------------------------------------
# JSON schema (versioned, field "schema_version": 1)
# ---------------------------------------------------------------------------


def tvd_to_dict(tvd: Tvd) -> dict:
    return {
        "cve_id": tvd.cve_id,
        "repo": tvd.repo,
        "text": tvd.text,
        "lang": tvd.lang,
        "retrieved_at": tvd.retrieved_at,
    }


def tvd_from_dict(d: dict) -> Tvd:
    try:
        return Tvd(
            cve_id=d["cve_id"],
            repo=d["repo"],
            text=d["text"],
            lang=d.get("lang", "en"),
            retrieved_at=d.get("retrieved_at", ""),
        )
    except KeyError as exc:
        raise SchemaViolation(f"TVD record missing field {exc}") from exc


def label_to_dict(label: DigestLabel) -> dict:
    """Serialize a label to its schema_version-1 JSON document."""
    from .evaluation import chart_data  # local import to avoid a cycle

    return {
        "schema_version": SCHEMA_VERSION,
        "cve_id": label.cve_id,
        "cvss": dict(label.cvss) if label.cvss else None,
        "basic_info": {
            "product": [{"value": v, "frequency": f} for v, f in label.basic_info.product],
            "component": [{"value": v, "frequency": f} for v, f in label.basic_info.component],
            "version": [{"value": v, "frequency": f} for v, f in label.basic_info.version],
        },
        "merged": {
            t.value: {
                "text": m.text,
                "contributing_sources": list(m.contributing_sources),
                "grounded": m.grounded,
            }
            for t, m in label.merged.items()
        },
        "per_source": {
            repo: {t.value: list(texts) for t, texts in aspects.items()}
            for repo, aspects in label.per_source.items()
        },
        "evaluation": {
            "integrity_present": label.evaluation.integrity_present,
            "missing": [t.value for t in label.evaluation.missing],
            "diversity": {
                t.value: {
                    "dispersion": label.evaluation.diversity[t]["dispersion"],
                    "likert": label.evaluation.diversity[t]["likert"],
                }
                for t in ASPECT_ORDER
            },
            "chart": chart_data(label.evaluation),
        },
        "generated_at": label.generated_at,
        "pipeline_mode": label.pipeline_mode,
    }


def label_from_dict(d: dict) -> DigestLabel:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise SchemaViolation(f"unsupported schema_version: {d.get('schema_version')!r}")
    try:
        basic = BasicInfo(
            product=tuple((e["value"], e["frequency"]) for e in d["basic_info"]["product"]),
            component=tuple((e["value"], e["frequency"]) for e in d["basic_info"]["component"]),
            version=tuple((e["value"], e["frequency"]) for e in d["basic_info"]["version"]),
        )
        merged = {
            AspectType.from_label(k): MergedView(
                text=v["text"],
                contributing_sources=tuple(v["contributing_sources"]),
                grounded=v["grounded"],
            )
            for k, v in d["merged"].items()
        }
        per_source = {
            repo: {AspectType.from_label(k): list(texts) for k, texts in aspects.items()}
            for repo, aspects in d["per_source"].items()
        }
        evaluation = EvaluationScores(
            integrity_present=d["evaluation"]["integrity_present"],
            missing=tuple(AspectType.from_label(t) for t in d["evaluation"]["missing"]),
            diversity={
                AspectType.from_label(k): {"dispersion": v["dispersion"], "likert": v["likert"]}
                for k, v in d["evaluation"]["diversity"].items()
            },
        )
        return DigestLabel(
            cve_id=d["cve_id"],
            cvss=d.get("cvss"),
            basic_info=basic,
            merged=merged,
            per_source=per_source,
            evaluation=evaluation,
            generated_at=d["generated_at"],
            pipeline_mode=d["pipeline_mode"],
        )
    except (KeyError, TypeError) as exc:
        raise SchemaViolation(f"label document malformed: {exc}") from exc


def canonical_json(obj) -> str:
    """Canonical serialization: sorted keys, UTF-8, no trailing whitespace."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def validate_label(d: dict) -> None:
    """Check the cross-reference invariants of a serialized label.

    Raises SchemaViolation when any invariant fails.
    """
    label = label_from_dict(d)  # structural validation
    if label.pipeline_mode not in PIPELINE_MODES:
        raise SchemaViolation(f"unknown pipeline_mode: {label.pipeline_mode!r}")
    missing = set(label.evaluation.missing)
    for t in ASPECT_ORDER:
        if t in label.merged and t in missing:
            raise SchemaViolation(f"{t.value} is both merged and missing")
        if t not in label.merged and t not in missing:
            raise SchemaViolation(f"{t.value} is neither merged nor missing")
    for t, view in label.merged.items():
        for repo in view.contributing_sources:
            if repo not in label.per_source or not label.per_source[repo].get(t):
                raise SchemaViolation(
                    f"contributing source {repo} has no {t.value} entry in per_source"
                )
    if label.cvss is not None:
        score = label.cvss.get("score")
        if not isinstance(score, (int, float)) or not 0.0 <= score <= 10.0:
            raise SchemaViolation(f"cvss score out of range: {score!r}")
    from .evaluation import likert_map

    for t in ASPECT_ORDER:
        entry = label.evaluation.diversity[t]
        if entry["likert"] != likert_map(entry["dispersion"]):
            raise SchemaViolation(f"likert level inconsistent with dispersion for {t.value}")
