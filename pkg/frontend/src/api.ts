/** REST client with an injectable fetch so tests need no browser. */

import type { LabelDoc } from "./types.js";
import { validateCveId } from "./validate.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export type LoadState =
  | { kind: "loaded"; label: LabelDoc }
  | { kind: "invalid"; reason: string }
  | { kind: "not-found"; cveId: string } // offer to generate
  | { kind: "error"; status: number; retryable: boolean };

const inflight = new Set<string>();

export async function searchAndLoad(raw: string, fetchFn: FetchLike): Promise<LoadState> {
  const check = validateCveId(raw);
  if (!check.ok) {
    return { kind: "invalid", reason: check.reason! };
  }
  const cveId = check.canonical!;
  const resp = await fetchFn(`/api/v1/labels/${cveId}`);
  if (resp.status === 200) {
    return { kind: "loaded", label: (await resp.json()) as LabelDoc };
  }
  if (resp.status === 404) {
    return { kind: "not-found", cveId };
  }
  return { kind: "error", status: resp.status, retryable: resp.status >= 500 };
}

/** POST generate, then reload. At most one in-flight request per CVE-ID. */
export async function generateLabel(cveId: string, fetchFn: FetchLike): Promise<LoadState> {
  if (inflight.has(cveId)) {
    return { kind: "error", status: 409, retryable: true };
  }
  inflight.add(cveId);
  try {
    const resp = await fetchFn("/api/v1/labels", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ cve_id: cveId }),
    });
    if (resp.status === 201) {
      return { kind: "loaded", label: (await resp.json()) as LabelDoc };
    }
    if (resp.status === 404) {
      return { kind: "not-found", cveId };
    }
    return { kind: "error", status: resp.status, retryable: resp.status >= 500 };
  } finally {
    inflight.delete(cveId);
  }
}
