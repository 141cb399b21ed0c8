/**
 * Pure HTML-string renderers for the three label sections. Everything here
 * is DOM-free so the same functions run in tests and in the browser.
 */

import type { AspectName, LabelDoc, RankedValue, SelectedSource } from "./types.js";
import { ASPECT_ORDER } from "./types.js";
import { LabelViewModel } from "./viewmodel.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function rankedCell(values: RankedValue[]): string {
  if (values.length === 0) {
    return '<span class="blank">—</span>';
  }
  // rank-0 value solid, lower-ranked variants as grey reference
  const [top, ...rest] = values;
  const variants = rest
    .map((v) => `<span class="variant">${esc(v.value)} (${v.frequency})</span>`)
    .join(" ");
  return `<strong class="top">${esc(top.value)}</strong>${variants ? " " + variants : ""}`;
}

export function renderBasicInfo(label: LabelDoc): string {
  const cvss = label.cvss
    ? `<span class="cvss">CVSS ${label.cvss.score} (${esc(label.cvss.source)})</span>`
    : "";
  const rows = (["product", "component", "version"] as const)
    .map(
      (field) =>
        `<tr><th>${field}</th><td>${rankedCell(label.basic_info[field])}</td></tr>`,
    )
    .join("");
  return (
    `<section class="basic-info" data-section="basic-info">` +
    `<h2>Basic Information</h2>` +
    `<p class="cve-id">${esc(label.cve_id)}${cvss ? " " + cvss : ""}</p>` +
    `<table>${rows}</table></section>`
  );
}

function aspectRow(aspect: AspectName, texts: string[]): string {
  const cell =
    texts.length === 0
      ? '<span class="blank"></span>'
      : texts.map((t) => `<span class="value">${esc(t)}</span>`).join("<br>");
  const blanked = texts.length === 0 ? ' class="missing"' : "";
  return `<tr data-aspect="${aspect}"${blanked}><th>${aspect}</th><td>${cell}</td></tr>`;
}

export function renderDescription(vm: LabelViewModel): string {
  const tabs = vm.sources
    .map((source) => {
      const active = source === vm.selectedSource ? ' class="active"' : "";
      return `<button data-tab="${esc(source)}"${active}>${esc(source)}</button>`;
    })
    .join("");
  const aspects = vm.aspects();
  const rows = ASPECT_ORDER.map((aspect) => aspectRow(aspect, aspects[aspect])).join("");
  return (
    `<section class="description" data-section="description">` +
    `<h2>Description</h2><nav class="tabs">${tabs}</nav>` +
    `<table class="aspects">${rows}</table></section>`
  );
}

export function renderEvaluation(label: LabelDoc): string {
  const { pie, radar, notes } = label.evaluation.chart;
  const segments = pie
    .map(
      (seg) =>
        `<li data-aspect="${seg.aspect}" class="${seg.present ? "present" : "blank"}">` +
        `${seg.aspect}</li>`,
    )
    .join("");
  const axes = radar
    .map(
      (likert, i) =>
        `<li data-axis="${ASPECT_ORDER[i]}" data-likert="${likert}">` +
        `${ASPECT_ORDER[i]}: ${likert}</li>`,
    )
    .join("");
  const noteItems = notes
    .map((aspect) => `<li>${aspect}: sources disagree, check before trusting</li>`)
    .join("");
  return (
    `<section class="evaluation" data-section="evaluation">` +
    `<h2>Evaluation</h2>` +
    `<p>Integrity: ${label.evaluation.integrity_present} of ${ASPECT_ORDER.length}</p>` +
    `<ul class="pie">${segments}</ul>` +
    `<ul class="radar">${axes}</ul>` +
    (noteItems ? `<ul class="notes">${noteItems}</ul>` : "") +
    `</section>`
  );
}

/** Full three-section view, or an error banner with no partial render. */
export function renderLabel(label: LabelDoc, selected: SelectedSource = "merged"): string {
  let vm: LabelViewModel;
  try {
    vm = new LabelViewModel(label);
    vm.select(selected);
  } catch (err) {
    return `<div class="error-banner">${esc(String(err))}</div>`;
  }
  return renderBasicInfo(label) + renderDescription(vm) + renderEvaluation(label);
}
