"""Command-line interface.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 provider error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .api import create_app, groups_from_store
from .errors import (
    DigestLabelsError,
    ProviderUnavailable,
    SchemaViolation,
    ScriptExhausted,
)
from .ingestion import RepoClientConfig, fetch_tvd, group_by_cve, load_corpus, save_corpus
from .model import canonical_json, parse_cve_id, validate_label
from .providers import ProviderScript, providers_from_config
from .service import LabelStore, PipelineConfig, generate_label
from .stats import compute_metrics, metrics_to_csv, metrics_to_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3


def _load_config(path) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _pipeline_config(args, config: dict) -> PipelineConfig:
    return PipelineConfig(
        mode=getattr(args, "mode", None) or "constrained",
        entropy_constraint=not getattr(args, "no_entropy", False),
        dispersion_threshold=getattr(args, "threshold", 0.2),
        provider=config.get("provider", {}),
    )


def _providers(config: dict, script_path=None):
    script = ProviderScript.from_file(script_path) if script_path else None
    return providers_from_config(config, script=script)


def cmd_ingest(args) -> int:
    config = _load_config(args.config)
    if args.input:
        tvds = load_corpus(args.input)
    elif args.fetch:
        repo_cfgs = [RepoClientConfig(**entry) for entry in config.get("repositories", [])]
        if not repo_cfgs:
            print("ingest --fetch requires a config with a repositories section",
                  file=sys.stderr)
            return EXIT_USAGE
        tvds = []
        for raw in args.fetch.split(","):
            cve = parse_cve_id(raw)
            for repo_cfg in repo_cfgs:
                tvds.append(fetch_tvd(cve, repo_cfg))
    else:
        print("ingest requires --input or --fetch", file=sys.stderr)
        return EXIT_USAGE
    save_corpus(tvds, args.output)
    print(f"wrote {len(tvds)} records to {args.output}")
    return EXIT_OK


def cmd_label(args) -> int:
    config = _load_config(args.config)
    tvds = load_corpus(args.corpus)
    groups = group_by_cve(tvds)
    cve = parse_cve_id(args.cve)
    if cve not in groups:
        print(f"no TVDs for {cve} in {args.corpus}", file=sys.stderr)
        return EXIT_DATA
    providers = _providers(config, args.script)
    cfg = _pipeline_config(args, config)
    label = generate_label(cve, groups[cve], cfg, providers)
    store = LabelStore(args.store)
    text = store.store(label)
    print(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    config = _load_config(args.config)
    if args.store:
        groups = groups_from_store(LabelStore(args.store))
    else:
        from .extraction import extract_record
        from .model import AspectSet

        providers = _providers(config, args.script)
        tvds = load_corpus(args.corpus)
        groups = {}
        for cve, group in group_by_cve(tvds).items():
            groups[cve] = {
                tvd.repo: extract_record(tvd, "constrained", providers.llm).aspects
                for tvd in group
            }
    metrics = compute_metrics(groups, threshold=args.threshold)
    if args.format == "csv":
        print(metrics_to_csv(metrics), end="")
    else:
        print(canonical_json(metrics_to_dict(metrics)))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    config = _load_config(args.config)
    store = LabelStore(args.store)
    corpus_groups = group_by_cve(load_corpus(args.corpus)) if args.corpus else {}
    cfg = _pipeline_config(args, config)
    app = create_app(
        store=store,
        corpus_groups=corpus_groups,
        cfg=cfg,
        providers_factory=lambda: _providers(config, args.script),
        ui_dir=args.ui,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def cmd_validate(args) -> int:
    with open(args.label, encoding="utf-8") as fh:
        doc = json.load(fh)
    validate_label(doc)
    print(f"{args.label}: valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="digestlabels")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load or fetch TVDs into a JSONL corpus")
    p.add_argument("--input", help="existing JSONL corpus to validate and normalize")
    p.add_argument("--fetch", help="comma-separated CVE-IDs to fetch from repositories")
    p.add_argument("--output", default="corpus.jsonl")
    p.add_argument("--config")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("label", help="generate and store the label for one CVE")
    p.add_argument("--cve", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--mode", choices=["constrained", "vanilla", "cot"])
    p.add_argument("--no-entropy", action="store_true",
                   help="omit the entropy line from merge prompts")
    p.add_argument("--config")
    p.add_argument("--script", help="provider script JSON for mock providers")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("stats", help="corpus metrics as JSON or CSV")
    p.add_argument("--corpus")
    p.add_argument("--store", help="compute from stored labels instead of extracting")
    p.add_argument("--threshold", type=float, default=0.2)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--config")
    p.add_argument("--script")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", required=True)
    p.add_argument("--config")
    p.add_argument("--corpus")
    p.add_argument("--script")
    p.add_argument("--ui", help="directory of built UI assets to serve under /ui/")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("validate", help="validate a stored label document")
    p.add_argument("label")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ProviderUnavailable, ScriptExhausted) as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (DigestLabelsError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
