"""HTTP delivery of labels: generate, fetch, project per source, stats.

All JSON responses are canonical (sorted keys, UTF-8, compact); GET of a
stored label returns the exact bytes the store holds, so POST-then-GET is
byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .errors import (
    DigestLabelsError,
    MalformedCveId,
    NoSources,
    NotFound,
    ProviderUnavailable,
    SchemaViolation,
    ScriptExhausted,
)
from .model import ASPECT_ORDER, AspectSet, KeyAspect, AspectType, canonical_json, parse_cve_id
from .service import KeyedLocks, LabelStore, PipelineConfig, generate_label
from .stats import compute_metrics, metrics_to_dict

PROVIDER_ERRORS = (ProviderUnavailable, ScriptExhausted)


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(content=canonical_json(payload), status_code=status_code,
                    media_type="application/json")


def _raw_response(text: str, status_code: int = 200) -> Response:
    return Response(content=text, status_code=status_code, media_type="application/json")


def groups_from_store(store: LabelStore) -> dict:
    """Rebuild per-repo aspect sets from the stored labels' per_source views."""
    groups = {}
    for cve in store.list_ids():
        doc = json.loads(store.load_raw(cve))
        repos = {}
        for repo, aspects in doc["per_source"].items():
            aspect_set = AspectSet(cve)
            for label, texts in aspects.items():
                aspect_type = AspectType.from_label(label)
                for text in texts:
                    aspect_set.add(KeyAspect(aspect_type=aspect_type, text=text, source=repo))
            repos[repo] = aspect_set
        groups[cve] = repos
    return groups


def create_app(store: LabelStore, corpus_groups: dict, cfg: PipelineConfig,
               providers_factory, templates=None, merge_examples=None,
               ui_dir=None) -> FastAPI:
    """Build the service app.

    ``providers_factory`` is called once per generation request so scripted
    mock providers start from a fresh script each time.
    """
    app = FastAPI(title="digest-labels")
    locks = KeyedLocks()

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz():
        return "ok"

    @app.post("/api/v1/labels")
    async def create_label(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return _json_response({"error": "invalid_json"}, 422)
        try:
            cve = parse_cve_id(str(body.get("cve_id", "")))
        except MalformedCveId:
            return _json_response({"error": "malformed_cve_id"}, 422)
        mode = body.get("mode") or cfg.mode
        if mode not in ("constrained", "vanilla", "cot"):
            return _json_response({"error": "unknown_mode"}, 422)
        tvds = corpus_groups.get(cve)
        if not tvds:
            return _json_response({"error": "no_sources"}, 404)
        run_cfg = PipelineConfig(mode=mode, entropy_constraint=cfg.entropy_constraint,
                                 dispersion_threshold=cfg.dispersion_threshold,
                                 provider=cfg.provider)
        with locks.get(cve):
            try:
                label = generate_label(cve, tvds, run_cfg, providers_factory(),
                                       templates=templates, merge_examples=merge_examples)
                text = store.store(label)
            except PROVIDER_ERRORS as exc:
                return _json_response({"error": "provider_failure", "detail": str(exc)}, 502)
            except NoSources:
                return _json_response({"error": "no_sources"}, 404)
        return _raw_response(text, 201)

    @app.get("/api/v1/labels/{cve_id}")
    def get_label(cve_id: str, source: str | None = None):
        try:
            cve = parse_cve_id(cve_id)
        except MalformedCveId:
            return _json_response({"error": "malformed_cve_id"}, 422)
        try:
            text = store.load_raw(cve)
        except NotFound:
            return _json_response({"error": "not_found"}, 404)
        except SchemaViolation as exc:
            return _json_response({"error": "schema_violation", "detail": str(exc)}, 500)
        if source is None:
            return _raw_response(text)
        doc = json.loads(text)
        if source not in doc["per_source"]:
            return _json_response({"error": "unknown_source"}, 404)
        projection = {
            "schema_version": doc["schema_version"],
            "cve_id": doc["cve_id"],
            "source": source,
            "aspects": doc["per_source"][source],
            "cvss": doc["cvss"],
            "basic_info": doc["basic_info"],
            "evaluation": doc["evaluation"],
            "generated_at": doc["generated_at"],
            "pipeline_mode": doc["pipeline_mode"],
        }
        return _json_response(projection)

    @app.get("/api/v1/corpus/stats")
    def corpus_stats():
        groups = groups_from_store(store)
        if not groups:
            return _json_response({"error": "empty_corpus"}, 404)
        metrics = compute_metrics(groups, threshold=cfg.dispersion_threshold)
        return _json_response(metrics_to_dict(metrics))

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
