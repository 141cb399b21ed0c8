/** Shapes of the label documents served by the backend (schema_version 1). */

export const ASPECT_ORDER = [
  "VulnerabilityType",
  "AttackVector",
  "AttackerType",
  "RootCause",
  "Impact",
] as const;

export type AspectName = (typeof ASPECT_ORDER)[number];

export interface RankedValue {
  value: string;
  frequency: number;
}

export interface BasicInfo {
  product: RankedValue[];
  component: RankedValue[];
  version: RankedValue[];
}

export interface MergedView {
  text: string;
  contributing_sources: string[];
  grounded: boolean;
}

export interface PieSegment {
  aspect: AspectName;
  present: boolean;
}

export interface ChartData {
  pie: PieSegment[];
  radar: number[];
  notes: AspectName[];
}

export interface Evaluation {
  integrity_present: number;
  missing: AspectName[];
  diversity: Record<AspectName, { dispersion: number; likert: number }>;
  chart: ChartData;
}

export interface LabelDoc {
  schema_version: number;
  cve_id: string;
  cvss: { score: number; source: string } | null;
  basic_info: BasicInfo;
  merged: Partial<Record<AspectName, MergedView>>;
  per_source: Record<string, Record<AspectName, string[]>>;
  evaluation: Evaluation;
  generated_at: string;
  pipeline_mode: string;
}

export type SelectedSource = "merged" | string;
