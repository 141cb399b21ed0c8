/** Browser entry point: wires the pure renderers to the page. */

import { generateLabel, searchAndLoad, type FetchLike, type LoadState } from "./api.js";
import { renderLabel } from "./render.js";
import type { LabelDoc, SelectedSource } from "./types.js";

const browserFetch: FetchLike = (url, init) => fetch(url, init);

function show(root: HTMLElement, state: LoadState, selected: SelectedSource = "merged"): void {
  if (state.kind === "loaded") {
    root.innerHTML = renderLabel(state.label, selected);
    wireTabs(root, state.label);
    return;
  }
  if (state.kind === "invalid") {
    root.innerHTML = `<div class="error-banner">Invalid CVE-ID: ${state.reason}</div>`;
    return;
  }
  if (state.kind === "not-found") {
    root.innerHTML =
      `<div class="offer">No label stored for ${state.cveId}. ` +
      `<button id="generate" data-cve="${state.cveId}">Generate?</button></div>`;
    const button = root.querySelector<HTMLButtonElement>("#generate");
    button?.addEventListener("click", async () => {
      button.disabled = true;
      show(root, await generateLabel(state.cveId, browserFetch));
    });
    return;
  }
  const hint = state.retryable ? "Try again." : "";
  root.innerHTML = `<div class="error-banner">Server error (${state.status}). ${hint}</div>`;
}

function wireTabs(root: HTMLElement, label: LabelDoc): void {
  root.querySelectorAll<HTMLButtonElement>("[data-tab]").forEach((tab) => {
    tab.addEventListener("click", () => {
      root.innerHTML = renderLabel(label, tab.dataset.tab as SelectedSource);
      wireTabs(root, label);
    });
  });
}

export function boot(): void {
  const form = document.querySelector<HTMLFormElement>("#search-form")!;
  const input = document.querySelector<HTMLInputElement>("#cve-input")!;
  const root = document.querySelector<HTMLElement>("#label-root")!;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    show(root, await searchAndLoad(input.value, browserFetch));
  });
}

if (typeof document !== "undefined" && document.querySelector("#search-form")) {
  boot();
}
