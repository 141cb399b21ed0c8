import type { AspectName, LabelDoc, SelectedSource } from "./types.js";
import { ASPECT_ORDER } from "./types.js";

/**
 * UI state over an immutable label document. Switching the selected source
 * never touches the label itself.
 */
export class LabelViewModel {
  readonly label: LabelDoc;
  private source: SelectedSource = "merged";

  constructor(label: LabelDoc) {
    if (label.schema_version !== 1) {
      throw new Error(`unsupported schema_version ${label.schema_version}`);
    }
    this.label = label;
  }

  get selectedSource(): SelectedSource {
    return this.source;
  }

  /** "merged" followed by the label's repositories in document order. */
  get sources(): SelectedSource[] {
    return ["merged", ...Object.keys(this.label.per_source)];
  }

  select(source: SelectedSource): void {
    if (!this.sources.includes(source)) {
      throw new Error(`unknown source ${source}`);
    }
    this.source = source;
  }

  /** Aspect texts for the current view; empty array means blank row. */
  aspects(): Record<AspectName, string[]> {
    const out = {} as Record<AspectName, string[]>;
    for (const aspect of ASPECT_ORDER) {
      if (this.source === "merged") {
        const view = this.label.merged[aspect];
        out[aspect] = view ? [view.text] : [];
      } else {
        out[aspect] = this.label.per_source[this.source][aspect] ?? [];
      }
    }
    return out;
  }
}
