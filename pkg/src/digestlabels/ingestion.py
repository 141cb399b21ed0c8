"""Acquire TVDs per CVE-ID from repository clients or local JSONL corpora."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import httpx

from .errors import DuplicateRecord, FetchFailed, MalformedResponse, ParseError
from .model import Tvd, parse_repo_id, repo_sort_key, tvd_from_dict, tvd_to_dict, utc_now

CORPUS_FIELD_ORDER = ("cve_id", "repo", "text", "lang", "retrieved_at")


@dataclass(frozen=True)
class RepoClientConfig:
    repo: str
    base_url: str  # must contain the {cve_id} placeholder exactly once
    response_path: str  # dot-path to the description field in the JSON body
    rate_limit: float = 5.0  # requests/second
    auth_token: str = ""  # optional static header token

    def __post_init__(self):
        object.__setattr__(self, "repo", parse_repo_id(self.repo))
        if self.base_url.count("{cve_id}") != 1:
            raise MalformedResponse(
                f"base_url must contain {{cve_id}} exactly once: {self.base_url!r}"
            )


class _RateLimiter:
    def __init__(self, per_second: float):
        self.interval = 1.0 / per_second if per_second > 0 else 0.0
        self._last = 0.0

    def wait(self):
        if self.interval <= 0:
            return
        now = time.monotonic()
        delta = self._last + self.interval - now
        if delta > 0:
            time.sleep(delta)
        self._last = time.monotonic()


_limiters: dict = {}


def _resolve_path(body, path: str):
    node = body
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise MalformedResponse(f"response path {path!r} missing at {part!r}")
        node = node[part]
    if not isinstance(node, str):
        raise MalformedResponse(f"response path {path!r} does not address a string")
    return node


def fetch_tvd(cve: str, cfg: RepoClientConfig, lang: str = "en",
              client: httpx.Client | None = None, retries: int = 3) -> Tvd:
    """Fetch one repository's TVD. HTTP 404 means "no entry", not failure."""
    limiter = _limiters.setdefault(cfg.repo, _RateLimiter(cfg.rate_limit))
    url = cfg.base_url.format(cve_id=cve)
    headers = {"Authorization": cfg.auth_token} if cfg.auth_token else {}
    owned = client is None
    client = client or httpx.Client(timeout=30.0)
    try:
        last_error = None
        for _ in range(retries):
            limiter.wait()
            try:
                resp = client.get(url, headers=headers)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if resp.status_code == 404:
                return Tvd(cve_id=cve, repo=cfg.repo, text="", lang=lang, retrieved_at=utc_now())
            if resp.status_code != 200:
                last_error = FetchFailed(f"HTTP {resp.status_code} from {cfg.repo}")
                continue
            text = _resolve_path(resp.json(), cfg.response_path)
            return Tvd(cve_id=cve, repo=cfg.repo, text=text, lang=lang, retrieved_at=utc_now())
        raise FetchFailed(f"fetch from {cfg.repo} failed after {retries} attempts: {last_error}")
    finally:
        if owned:
            client.close()


def translate_hook(tvd: Tvd) -> Tvd:
    """Pluggable pre-processing hook; the default is identity passthrough."""
    return tvd


def load_corpus(path) -> list:
    """Load a JSONL corpus; one record per (cve_id, repo) pair per file."""
    tvds = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                tvd = tvd_from_dict(record)
            except Exception as exc:
                raise ParseError(f"line {lineno}: {exc}", line=lineno) from exc
            key = (tvd.cve_id, tvd.repo)
            if key in seen:
                raise DuplicateRecord(f"line {lineno}: duplicate record for {key}", line=lineno)
            seen.add(key)
            tvds.append(tvd)
    return tvds


def save_corpus(tvds, path) -> None:
    """Write JSONL with canonical key order (cve_id, repo, text, lang, retrieved_at)."""
    with open(path, "w", encoding="utf-8") as fh:
        for tvd in tvds:
            record = tvd_to_dict(tvd)
            ordered = {k: record[k] for k in CORPUS_FIELD_ORDER}
            fh.write(json.dumps(ordered, ensure_ascii=False) + "\n")


def group_by_cve(tvds) -> dict:
    """Stable grouping; within a group, Tvds follow repository priority order."""
    groups: dict = {}
    for tvd in tvds:
        groups.setdefault(tvd.cve_id, []).append(tvd)
    for cve_id in groups:
        groups[cve_id].sort(key=lambda t: repo_sort_key(t.repo))
    return groups
