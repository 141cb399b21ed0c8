"""Key-aspect extraction via template-constrained prompting.

The constrained mode embeds human-readable regularization templates as
rules in the prompt; vanilla and cot are the baseline prompting modes.
The LLM must answer with one labeled line per aspect ("AspectName: value"
or "AspectName: NONE"), plus Product/Component/Version lines feeding the
label's Basic Information section.
"""

from __future__ import annotations

import importlib.resources
import json
import re
from dataclasses import dataclass, field

from .errors import MissingTemplate, SchemaViolation, UnparseableResponse
from .model import ASPECT_ORDER, AspectSet, AspectType, KeyAspect, Tvd, normalize_text
from .providers import CompletionRequest

BASIC_LABELS = ("Product", "Component", "Version")

EXTRACTION_TAG = "extract"
MAX_REPROMPTS = 2


@dataclass(frozen=True)
class RegularizationTemplate:
    """One human-authored extraction rule, embedded verbatim in the prompt."""

    aspect_type: AspectType
    pattern_description: str
    cue_phrases: tuple
    example_phrasing: str

    def __post_init__(self):
        if not self.cue_phrases:
            raise SchemaViolation("cue_phrases must be non-empty")
        object.__setattr__(self, "cue_phrases", tuple(self.cue_phrases))


@dataclass
class ExtractionResponse:
    raw: str
    parsed: dict  # AspectType -> list of strings
    basic: dict = field(default_factory=dict)  # "Product"/"Component"/"Version" -> list


def load_templates(path=None) -> list:
    """Load the template registry (JSON array); defaults to the shipped set."""
    if path is None:
        source = importlib.resources.files("digestlabels.data").joinpath("templates.json")
        doc = json.loads(source.read_text(encoding="utf-8"))
    else:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    return [
        RegularizationTemplate(
            aspect_type=AspectType.from_label(entry["aspect_type"]),
            pattern_description=entry["pattern_description"],
            cue_phrases=tuple(entry["cue_phrases"]),
            example_phrasing=entry["example_phrasing"],
        )
        for entry in doc
    ]


def _templates_by_aspect(templates) -> dict:
    registry: dict = {}
    for template in templates:
        registry.setdefault(template.aspect_type, []).append(template)
    return registry


_OUTPUT_CONTRACT = (
    "Answer with exactly one line per item, in this order and format:\n"
    + "\n".join(f"{t.value}: <value or NONE>" for t in ASPECT_ORDER)
    + "\n"
    + "\n".join(f"{label}: <value or NONE>" for label in BASIC_LABELS)
)


def build_extraction_prompt(tvd: Tvd, templates) -> str:
    """Constrained-mode prompt: task, five rule blocks, the TVD, output contract."""
    registry = _templates_by_aspect(templates)
    for aspect_type in ASPECT_ORDER:
        if aspect_type not in registry:
            raise MissingTemplate(aspect_type)
    blocks = []
    for aspect_type in ASPECT_ORDER:
        for template in registry[aspect_type]:
            blocks.append(
                f"[{aspect_type.value}] {template.pattern_description}\n"
                f"Cue phrases: {', '.join(template.cue_phrases)}\n"
                f"Example: {template.example_phrasing}"
            )
    return (
        "Extract the key aspects of the following vulnerability description.\n"
        "Follow these extraction rules:\n\n"
        + "\n\n".join(blocks)
        + "\n\nAlso identify the affected Product, Component, and Version.\n\n"
        + f"Description:\n{tvd.text}\n\n"
        + _OUTPUT_CONTRACT
    )


def build_vanilla_prompt(tvd: Tvd) -> str:
    return (
        'Task: "Based on the provided examples, please return:"\n'
        f"CVE-ID: {tvd.cve_id}\n"
        f"TVDs: {{{tvd.text}}}\n"
        "Please Return: Extracted Key Aspects.\n\n" + _OUTPUT_CONTRACT
    )


def build_cot_prompt(tvd: Tvd) -> str:
    return (
        'Instruction: "Think step by step before answering."\n'
        "Step 1: Read all provided TVDs carefully.\n"
        "Step 2: Identify candidate key aspects from each TVD.\n"
        "Step 3: Compare candidate aspects and remove duplicates or conflicts.\n"
        "Step 4: Return final merged aspects.\n"
        f"CVE-ID: {tvd.cve_id}\n"
        f"TVDs: {{{tvd.text}}}\n\n" + _OUTPUT_CONTRACT
    )


_LINE_RE = re.compile(r"^\s*([A-Za-z][A-Za-z _-]*?)\s*:\s*(.*?)\s*$")

_ASPECT_KEYS = {re.sub(r"[\s_-]+", "", t.value).lower(): t for t in ASPECT_ORDER}
_BASIC_KEYS = {label.lower(): label for label in BASIC_LABELS}


def parse_extraction_response(raw: str) -> ExtractionResponse:
    """Parse labeled lines; "NONE" yields an empty list, unlabeled lines are ignored."""
    parsed = {t: [] for t in ASPECT_ORDER}
    basic = {label: [] for label in BASIC_LABELS}
    matched = 0
    for line in raw.splitlines():
        m = _LINE_RE.match(line)
        if not m:
            continue
        key = re.sub(r"[\s_-]+", "", m.group(1)).lower()
        value = m.group(2).strip()
        if key in _ASPECT_KEYS:
            matched += 1
            if value and value.upper() != "NONE":
                parsed[_ASPECT_KEYS[key]].append(value)
        elif key in _BASIC_KEYS:
            matched += 1
            if value and value.upper() != "NONE":
                basic[_BASIC_KEYS[key]].append(value)
    if matched == 0:
        raise UnparseableResponse(f"no labeled lines found in: {raw[:120]!r}")
    return ExtractionResponse(raw=raw, parsed=parsed, basic=basic)


@dataclass
class ExtractionRecord:
    aspects: AspectSet
    basic: dict
    degraded: bool = False  # set when re-prompting gave up on unparseable output


def extract_record(tvd: Tvd, mode: str, llm, templates=None) -> ExtractionRecord:
    """Run one extraction completion for one TVD and parse it.

    Empty TVD text short-circuits to an all-missing set with zero provider
    calls. Unparseable output is re-prompted twice, then degrades to
    all-missing with the degraded flag set.
    """
    empty_basic = {label: [] for label in BASIC_LABELS}
    if not tvd.text.strip():
        return ExtractionRecord(aspects=AspectSet(tvd.cve_id), basic=empty_basic)
    if mode == "constrained":
        prompt = build_extraction_prompt(tvd, templates if templates is not None else load_templates())
    elif mode == "vanilla":
        prompt = build_vanilla_prompt(tvd)
    elif mode == "cot":
        prompt = build_cot_prompt(tvd)
    else:
        raise SchemaViolation(f"unknown extraction mode: {mode!r}")

    response = None
    for _ in range(1 + MAX_REPROMPTS):
        raw = llm.complete(CompletionRequest(prompt=prompt, tag=EXTRACTION_TAG))
        try:
            response = parse_extraction_response(raw)
            break
        except UnparseableResponse:
            continue
    if response is None:
        return ExtractionRecord(aspects=AspectSet(tvd.cve_id), basic=empty_basic, degraded=True)

    aspects = AspectSet(tvd.cve_id)
    for aspect_type, values in response.parsed.items():
        for value in values:
            aspects.add(KeyAspect(aspect_type=aspect_type, text=value, source=tvd.repo))
    return ExtractionRecord(aspects=aspects, basic=response.basic)


def extract_aspects(tvd: Tvd, mode: str, llm, templates=None) -> AspectSet:
    return extract_record(tvd, mode, llm, templates=templates).aspects


def rank_variants(values) -> list:
    """Group by normalized text; order by frequency desc, then first appearance."""
    counts: dict = {}
    display: dict = {}
    order: dict = {}
    for index, value in enumerate(values):
        key = normalize_text(value).lower()
        if not key:
            continue
        if key not in counts:
            counts[key] = 0
            display[key] = normalize_text(value)
            order[key] = index
        counts[key] += 1
    ranked = sorted(counts, key=lambda k: (-counts[k], order[k]))
    return [{"value": display[k], "frequency": counts[k]} for k in ranked]
