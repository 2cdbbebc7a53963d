/** Performance-measures screen: the formatted table for one DGM with a
 * DGM switcher, MCSE toggle, significant-digits control, a LaTeX copy
 * box, and download buttons. Every cell string is served verbatim by the
 * export endpoint ("as displayed"), so the UI renders without computing
 * or re-rounding anything. */

import { LatestOnly, type ApiClient } from "../api.js";
import { clear, el } from "../dom.js";
import type { AppState } from "../state.js";
import type { SessionInfo } from "../types.js";

export interface PerformanceCtx {
  api: ApiClient;
  state: AppState;
  setState(patch: Partial<AppState>): void;
  session: SessionInfo;
  notify(message: string, isError?: boolean): void;
}

const latestTable = new LatestOnly();

export function dgmChoices(session: SessionInfo): string[] {
  const seen: string[] = [];
  for (const stratum of session.strata ?? []) {
    const key = stratum.dgm.join(",");
    if (!seen.includes(key)) seen.push(key);
  }
  return seen;
}

export async function renderPerformance(
  root: HTMLElement,
  ctx: PerformanceCtx,
): Promise<void> {
  clear(root);
  root.append(el("h2", {}, "Performance measures"));
  if (!ctx.session.mapping) {
    root.append(el("p", { class: "hint" }, "Define the variable mapping first."));
    return;
  }
  const dgms = dgmChoices(ctx.session);
  const currentDgm = ctx.state.dgm ?? dgms[0] ?? "";

  const dgmSelect = el("select", { id: "dgm-select" });
  for (const key of dgms) {
    const option = el("option", { value: key }, key || "(single scenario)");
    if (key === currentDgm) option.setAttribute("selected", "");
    dgmSelect.append(option);
  }

  const mcseToggle = el("input", { type: "checkbox", id: "mcse-toggle" }) as HTMLInputElement;
  mcseToggle.checked = ctx.state.mcse;
  const sigDigits = el("input", {
    type: "number",
    id: "sig-digits",
    min: 1,
    max: 10,
    value: ctx.state.sigDigits,
  }) as HTMLInputElement;

  const tableHost = el("div", { id: "performance-table-host" });
  const latexBox = el("textarea", {
    id: "latex-box",
    rows: 10,
    readonly: true,
    spellcheck: "false",
  }) as HTMLTextAreaElement;
  const copyBtn = el("button", {
    id: "copy-latex",
    onclick: () => {
      void navigator.clipboard?.writeText(latexBox.value);
    },
  }, "Copy LaTeX");

  const downloads = el("div", { class: "toolbar", id: "download-row" });
  const sid = ctx.state.session!;
  for (const [what, format, label] of [
    ["estimates", "csv", "estimates.csv"],
    ["estimates", "tsv", "estimates.tsv"],
    ["estimates", "json", "estimates.json"],
    ["table", "csv", "table.csv (as displayed)"],
    ["dataset", "csv", "dataset.csv"],
  ] as const) {
    downloads.append(
      el("a", {
        class: "download",
        href: ctx.api.exportHref(sid, what, format, what !== "dataset" ? currentDgm : undefined),
        download: "",
      }, label),
    );
  }

  root.append(
    el("div", { class: "toolbar" },
      el("label", { for: "dgm-select" }, "Data-generating mechanism:"), dgmSelect,
      el("label", { for: "mcse-toggle" }, "Monte Carlo SEs"), mcseToggle,
      el("label", { for: "sig-digits" }, "Significant digits"), sigDigits,
    ),
    tableHost,
    el("h3", {}, "Export"),
    el("p", { class: "hint" },
      "LaTeX table (booktabs), ready to paste; downloads carry full precision."),
    latexBox,
    copyBtn,
    downloads,
  );

  async function refresh(): Promise<void> {
    const dgm = dgmSelect.value;
    const opts = {
      measures: ctx.state.measures ?? undefined,
      sigDigits: Number(sigDigits.value),
      mcse: mcseToggle.checked,
    };
    try {
      const result = await latestTable.run(async () => ({
        rows: await ctx.api.wideTable(sid, dgm, opts),
        latex: await ctx.api.latexTable(sid, dgm, opts),
      }));
      if (result === null) return; // superseded by a newer selection
      clear(tableHost);
      if (!result.rows.length) {
        tableHost.append(el("p", { class: "hint" }, "No computable measures."));
        return;
      }
      // JS reorders integer-like object keys (method labels often are),
      // so pin the label column first explicitly
      const keys = Object.keys(result.rows[0]);
      const label = "Performance Measure";
      const columns = keys.includes(label)
        ? [label, ...keys.filter((k) => k !== label)]
        : keys;
      const table = el("table", { class: "data-table", id: "performance-table" },
        el("thead", {}, el("tr", {}, ...columns.map((c) => el("th", {}, c)))),
        el("tbody", {},
          ...result.rows.map((row) =>
            el("tr", {}, ...columns.map((c) => el("td", {}, row[c] ?? ""))))),
      );
      tableHost.append(table);
      latexBox.value = result.latex;
    } catch (err) {
      ctx.notify(String(err), true);
    }
  }

  dgmSelect.addEventListener("change", () => {
    ctx.setState({ dgm: dgmSelect.value });
    void refresh();
  });
  mcseToggle.addEventListener("change", () => {
    ctx.setState({ mcse: mcseToggle.checked });
    void refresh();
  });
  sigDigits.addEventListener("change", () => {
    ctx.setState({ sigDigits: Number(sigDigits.value) });
    void refresh();
  });

  await refresh();
}
