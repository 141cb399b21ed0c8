import type { LabelDoc } from "../src/types.js";

/** CVE-2012-0045 label as produced by the backend pipeline. */
export const FIG1_LABEL: LabelDoc = {
  schema_version: 1,
  cve_id: "CVE-2012-0045",
  cvss: { score: 4.9, source: "CVE" },
  basic_info: {
    product: [{ value: "KVM", frequency: 4 }],
    component: [],
    version: [],
  },
  merged: {
    RootCause: {
      text: "KVM does not properly handle the 0f05 (syscall) opcode on specific CPU models and modes.",
      contributing_sources: ["CVE", "IBM", "CNNVD", "JVN"],
      grounded: true,
    },
  },
  per_source: {
    CVE: {
      VulnerabilityType: [],
      AttackVector: [],
      AttackerType: [],
      RootCause: ["KVM does not properly handle the 0f05 opcode"],
      Impact: [],
    },
    IBM: {
      VulnerabilityType: [],
      AttackVector: [],
      AttackerType: [],
      RootCause: ["unable to handle opcode 0f05 correctly"],
      Impact: [],
    },
    CNNVD: {
      VulnerabilityType: [],
      AttackVector: [],
      AttackerType: [],
      RootCause: [
        "KVM improperly handles syscall instructions in specific CPU modes on certain CPUs",
      ],
      Impact: [],
    },
    JVN: {
      VulnerabilityType: [],
      AttackVector: [],
      AttackerType: [],
      RootCause: [
        "the improper handling of the syscall opcode 0f05 by KVM on specific CPU models",
      ],
      Impact: [],
    },
  },
  evaluation: {
    integrity_present: 1,
    missing: ["VulnerabilityType", "AttackVector", "AttackerType", "Impact"],
    diversity: {
      VulnerabilityType: { dispersion: 0.0, likert: 1 },
      AttackVector: { dispersion: 0.0, likert: 1 },
      AttackerType: { dispersion: 0.0, likert: 1 },
      RootCause: { dispersion: 0.395418013537573, likert: 2 },
      Impact: { dispersion: 0.0, likert: 1 },
    },
    chart: {
      pie: [
        { aspect: "VulnerabilityType", present: false },
        { aspect: "AttackVector", present: false },
        { aspect: "AttackerType", present: false },
        { aspect: "RootCause", present: true },
        { aspect: "Impact", present: false },
      ],
      radar: [1, 1, 1, 2, 1],
      notes: [],
    },
  },
  generated_at: "2026-08-26T00:00:00Z",
  pipeline_mode: "constrained",
};

/** Richer label with exactly one missing aspect (Impact). */
export const ONE_MISSING_LABEL: LabelDoc = {
  schema_version: 1,
  cve_id: "CVE-2014-0160",
  cvss: { score: 7.5, source: "CVE" },
  basic_info: {
    product: [
      { value: "OpenSSL", frequency: 2 },
      { value: "openssl library", frequency: 1 },
    ],
    component: [{ value: "heartbeat extension", frequency: 2 }],
    version: [{ value: "1.0.1", frequency: 2 }],
  },
  merged: {
    VulnerabilityType: {
      text: "buffer over-read",
      contributing_sources: ["CVE", "IBM"],
      grounded: true,
    },
    AttackVector: {
      text: "crafted heartbeat request packets",
      contributing_sources: ["CVE"],
      grounded: true,
    },
    AttackerType: {
      text: "remote attackers",
      contributing_sources: ["CVE", "IBM"],
      grounded: true,
    },
    RootCause: {
      text: "missing bounds check in the heartbeat extension",
      contributing_sources: ["CVE", "IBM"],
      grounded: true,
    },
  },
  per_source: {
    CVE: {
      VulnerabilityType: ["buffer over-read"],
      AttackVector: ["crafted heartbeat request packets"],
      AttackerType: ["remote attackers"],
      RootCause: ["does not properly handle heartbeat extension packets"],
      Impact: [],
    },
    IBM: {
      VulnerabilityType: ["out-of-bounds read"],
      AttackVector: [],
      AttackerType: ["remote attackers"],
      RootCause: ["missing bounds check"],
      Impact: [],
    },
  },
  evaluation: {
    integrity_present: 4,
    missing: ["Impact"],
    diversity: {
      VulnerabilityType: { dispersion: 0.45, likert: 3 },
      AttackVector: { dispersion: 0.0, likert: 1 },
      AttackerType: { dispersion: 0.0, likert: 1 },
      RootCause: { dispersion: 0.62, likert: 4 },
      Impact: { dispersion: 0.0, likert: 1 },
    },
    chart: {
      pie: [
        { aspect: "VulnerabilityType", present: true },
        { aspect: "AttackVector", present: true },
        { aspect: "AttackerType", present: true },
        { aspect: "RootCause", present: true },
        { aspect: "Impact", present: false },
      ],
      radar: [3, 1, 1, 4, 1],
      notes: ["VulnerabilityType", "RootCause"],
    },
  },
  generated_at: "2026-08-26T00:00:00Z",
  pipeline_mode: "constrained",
};

export function clone<T>(doc: T): T {
  return JSON.parse(JSON.stringify(doc)) as T;
}
