/** Data screen: load a dataset (upload, paste, or URL), then declare
 * which columns play which role. Selectors are populated from the
 * columns the service reports back. */

import type { ApiClient } from "../api.js";
import { clear, el } from "../dom.js";
import type { AppState } from "../state.js";
import type { Column, MappingBody, UploadResult } from "../types.js";

export interface DataScreenCtx {
  api: ApiClient;
  state: AppState;
  setState(patch: Partial<AppState>): void;
  columns: Column[] | null;
  onLoaded(result: UploadResult): void;
  onMapped(): void;
  notify(message: string, isError?: boolean): void;
}

function columnSelect(
  id: string,
  columns: Column[],
  allowNone: boolean,
  selected?: string | null,
): HTMLSelectElement {
  const select = el("select", { id, name: id });
  if (allowNone) select.append(el("option", { value: "" }, "(none)"));
  for (const c of columns) {
    const option = el("option", { value: c.name }, `${c.name} (${c.kind})`);
    if (c.name === selected) option.setAttribute("selected", "");
    select.append(option);
  }
  if (!allowNone && selected === undefined) select.selectedIndex = 0;
  return select;
}

export function mappingFromForm(form: HTMLElement): MappingBody {
  const value = (id: string) =>
    (form.querySelector(`[name="${id}"]`) as HTMLSelectElement | HTMLInputElement | null)
      ?.value ?? "";
  const opt = (id: string) => value(id) || null;
  const mapping: MappingBody = { estimate: value("map-estimate") };
  mapping.se = opt("map-se");
  const truthMode = value("map-truth-mode");
  if (truthMode === "value" && value("map-truth-value") !== "") {
    mapping.truth = { value: Number(value("map-truth-value")) };
  } else if (truthMode === "column" && opt("map-truth-col")) {
    mapping.truth = { column: opt("map-truth-col") };
  }
  mapping.method = opt("map-method");
  mapping.reference = opt("map-reference");
  const dgm = value("map-dgm");
  mapping.dgm = dgm ? dgm.split(",").filter(Boolean) : [];
  const lo = opt("map-ci-lower");
  const hi = opt("map-ci-upper");
  if (lo && hi) mapping.ci = [lo, hi];
  mapping.df = opt("map-df");
  mapping.rep = opt("map-rep");
  const alpha = value("map-alpha");
  if (alpha) mapping.alpha = Number(alpha);
  return mapping;
}

export function renderDataScreen(root: HTMLElement, ctx: DataScreenCtx): void {
  clear(root);
  root.append(el("h2", {}, "Data"));

  const status = el("p", { class: "status", id: "load-status" });

  // --- three ways in ---
  const fileInput = el("input", { type: "file", id: "file-input" });
  const uploadBtn = el("button", {
    id: "upload-btn",
    onclick: async () => {
      const file = (fileInput as HTMLInputElement).files?.[0];
      if (!file) return ctx.notify("choose a file first", true);
      try {
        ctx.onLoaded(await ctx.api.uploadFile(file, file.name));
      } catch (err) {
        ctx.notify(String(err), true);
      }
    },
  }, "Upload");

  const pasteArea = el("textarea", {
    id: "paste-input",
    rows: 6,
    placeholder: "Paste tab-separated data (e.g. from a spreadsheet)",
  });
  const pasteBtn = el("button", {
    id: "paste-btn",
    onclick: async () => {
      const text = (pasteArea as HTMLTextAreaElement).value;
      if (!text.trim()) return ctx.notify("paste some data first", true);
      try {
        ctx.onLoaded(await ctx.api.uploadPasted(text));
      } catch (err) {
        ctx.notify(String(err), true);
      }
    },
  }, "Use pasted data");

  const urlInput = el("input", {
    type: "url",
    id: "url-input",
    placeholder: "https://example.org/estimates.csv",
    size: 48,
  });
  const urlBtn = el("button", {
    id: "url-btn",
    onclick: async () => {
      const url = (urlInput as HTMLInputElement).value.trim();
      if (!url) return ctx.notify("enter a URL first", true);
      try {
        ctx.onLoaded(await ctx.api.uploadUrl(url));
      } catch (err) {
        ctx.notify(String(err), true);
      }
    },
  }, "Fetch URL");

  root.append(
    el("section", { class: "card" },
      el("h3", {}, "1. Load results"),
      el("p", {}, "Tidy format: one row per repetition, variables in columns. ",
        "Accepted: csv, tsv, json records; gzip/zip compressed up to 100 MB."),
      el("div", { class: "load-row" }, fileInput, uploadBtn),
      el("div", { class: "load-row" }, pasteArea, pasteBtn),
      el("div", { class: "load-row" }, urlInput, urlBtn),
      status,
    ),
  );

  // --- mapping form, only once columns exist ---
  if (!ctx.columns) {
    root.append(el("p", { class: "hint" },
      "Load a dataset to populate the variable selectors."));
    return;
  }
  const cols = ctx.columns;
  const estimateSelect = columnSelect("map-estimate", cols, true);
  const analyzeBtn = el("button", { id: "analyze-btn", disabled: true }, "Analyze");
  estimateSelect.addEventListener("change", () => {
    if (estimateSelect.value) analyzeBtn.removeAttribute("disabled");
    else analyzeBtn.setAttribute("disabled", "");
  });

  const truthMode = el("select", { name: "map-truth-mode", id: "map-truth-mode" },
    el("option", { value: "none" }, "(no true value)"),
    el("option", { value: "value" }, "fixed value"),
    el("option", { value: "column" }, "column"),
  );

  const formRows: [string, Node][] = [
    ["Point estimate (required)", estimateSelect],
    ["Standard error", columnSelect("map-se", cols, true)],
    ["True value", el("span", {},
      truthMode, " ",
      el("input", { type: "text", name: "map-truth-value", id: "map-truth-value",
                    placeholder: "-0.5", size: 8 }),
      " ", columnSelect("map-truth-col", cols, true))],
    ["Method", columnSelect("map-method", cols, true)],
    ["Reference method (for relative precision)",
      el("input", { type: "text", name: "map-reference", id: "map-reference", size: 12 })],
    ["DGM columns (comma-separated)",
      el("input", { type: "text", name: "map-dgm", id: "map-dgm", size: 24 })],
    ["CI lower / upper", el("span", {},
      columnSelect("map-ci-lower", cols, true), " / ",
      columnSelect("map-ci-upper", cols, true))],
    ["Degrees of freedom (t intervals)", columnSelect("map-df", cols, true)],
    ["Repetition id", columnSelect("map-rep", cols, true)],
    ["Alpha", el("input", { type: "text", name: "map-alpha", id: "map-alpha",
                            value: "0.05", size: 6 })],
  ];

  const form = el("section", { class: "card", id: "mapping-form" },
    el("h3", {}, "2. Define variables"),
    ...formRows.map(([label, control]) =>
      el("div", { class: "form-row" }, el("label", {}, label), control)),
    analyzeBtn,
  );

  analyzeBtn.addEventListener("click", async () => {
    if (!ctx.state.session) return;
    try {
      await ctx.api.putMapping(ctx.state.session, mappingFromForm(form));
      ctx.onMapped();
    } catch (err) {
      ctx.notify(String(err), true);
    }
  });

  root.append(form);
}
