/** Client-side CVE-ID validation, matching the backend's parser. */

const CVE_RE = /^CVE-(\d{4})-(\d{4,})$/;

export interface CveCheck {
  ok: boolean;
  canonical?: string;
  reason?: string;
}

export function validateCveId(raw: string): CveCheck {
  const candidate = raw.trim().toUpperCase();
  const match = CVE_RE.exec(candidate);
  if (!match) {
    return { ok: false, reason: "expected CVE-YYYY-NNNN…" };
  }
  const year = Number(match[1]);
  const maxYear = new Date().getUTCFullYear() + 1;
  if (year < 1999 || year > maxYear) {
    return { ok: false, reason: `year must be 1999..${maxYear}` };
  }
  return { ok: true, canonical: candidate };
}
