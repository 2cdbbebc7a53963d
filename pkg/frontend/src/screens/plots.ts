/** Plots screen: kind picker, measure/DGM/method filters, axis-label and
 * theme/size controls, live SVG preview, and Save-plot (the downloaded
 * bytes come from the service render endpoint, not the preview). */

import { LatestOnly, type ApiClient } from "../api.js";
import { clear, download, el } from "../dom.js";
import { renderPlot } from "../plots/render.js";
import { PLOT_KINDS, serviceKind, type AppState, ALL_MEASURES } from "../state.js";
import type { SessionInfo } from "../types.js";

export interface PlotsCtx {
  api: ApiClient;
  state: AppState;
  setState(patch: Partial<AppState>): void;
  session: SessionInfo;
  notify(message: string, isError?: boolean): void;
}

const latestPlot = new LatestOnly();

function methodChoices(session: SessionInfo): string[] {
  const seen: string[] = [];
  for (const stratum of session.strata ?? []) {
    if (!seen.includes(stratum.method)) seen.push(stratum.method);
  }
  return seen;
}

function dgmChoices(session: SessionInfo): string[] {
  const seen: string[] = [];
  for (const stratum of session.strata ?? []) {
    const key = stratum.dgm.join(",");
    if (!seen.includes(key)) seen.push(key);
  }
  return seen;
}

const MEASURE_KINDS = new Set(["forest", "lolly", "heat", "nested-loop"]);
const PAIR_KINDS = new Set(["scatter", "hexbin", "contour", "bland-altman"]);

export function plotParams(state: AppState, session: SessionInfo): Record<string, string> {
  const params: Record<string, string> = {};
  const kind = state.kind;
  if (MEASURE_KINDS.has(kind)) params.measure = state.measure;
  if (PAIR_KINDS.has(kind)) {
    const methods = methodChoices(session);
    params.method_a = state.methodA ?? methods[0] ?? "";
    params.method_b = state.methodB ?? methods[1] ?? methods[0] ?? "";
    params.quantity = state.quantity;
  }
  if (kind === "ridgeline") params.quantity = state.quantity;
  if (state.dgm && kind !== "nested-loop") params.dgm = state.dgm;
  return params;
}

export async function renderPlots(root: HTMLElement, ctx: PlotsCtx): Promise<void> {
  clear(root);
  root.append(el("h2", {}, "Plots"));
  if (!ctx.session.mapping) {
    root.append(el("p", { class: "hint" }, "Define the variable mapping first."));
    return;
  }

  const kindSelect = el("select", { id: "plot-kind" });
  for (const kind of PLOT_KINDS) {
    const option = el("option", { value: kind }, kind);
    if (kind === ctx.state.kind) option.setAttribute("selected", "");
    kindSelect.append(option);
  }
  const measureSelect = el("select", { id: "plot-measure" });
  for (const measure of ALL_MEASURES) {
    const option = el("option", { value: measure }, measure);
    if (measure === ctx.state.measure) option.setAttribute("selected", "");
    measureSelect.append(option);
  }
  const dgmSelect = el("select", { id: "plot-dgm" },
    el("option", { value: "" }, "(all DGMs)"));
  for (const key of dgmChoices(ctx.session)) {
    const option = el("option", { value: key }, key);
    if (key === ctx.state.dgm) option.setAttribute("selected", "");
    dgmSelect.append(option);
  }
  const methods = methodChoices(ctx.session);
  const methodA = el("select", { id: "plot-method-a" });
  const methodB = el("select", { id: "plot-method-b" });
  methods.forEach((m, i) => {
    const oa = el("option", { value: m }, m);
    if (m === (ctx.state.methodA ?? methods[0])) oa.setAttribute("selected", "");
    methodA.append(oa);
    const ob = el("option", { value: m }, m);
    if (m === (ctx.state.methodB ?? methods[Math.min(1, methods.length - 1)]) && i >= 0)
      ob.setAttribute("selected", "");
    methodB.append(ob);
  });
  const quantitySelect = el("select", { id: "plot-quantity" },
    el("option", { value: "estimate" }, "point estimates"),
    el("option", { value: "se" }, "standard errors"));
  (quantitySelect as HTMLSelectElement).value = ctx.state.quantity;

  const host = el("div", { id: "plot-host", class: "plot-host" });
  const saveBtn = el("button", { id: "save-plot" }, "Save plot");
  const formatSelect = el("select", { id: "save-format" },
    el("option", { value: "svg" }, "svg"),
    el("option", { value: "png" }, "png (needs server converter)"),
    el("option", { value: "pdf" }, "pdf (needs server converter)"));

  root.append(
    el("div", { class: "toolbar" },
      el("label", {}, "Plot:"), kindSelect,
      el("label", {}, "Measure:"), measureSelect,
      el("label", {}, "DGM:"), dgmSelect,
      el("label", {}, "A:"), methodA,
      el("label", {}, "B:"), methodB,
      el("label", {}, "Quantity:"), quantitySelect,
    ),
    host,
    el("div", { class: "toolbar" }, saveBtn, formatSelect,
      el("span", { class: "hint" },
        "axis labels, theme, and size live in the Options tab")),
  );

  async function refresh(): Promise<void> {
    const kind = (kindSelect as HTMLSelectElement).value;
    const params = plotParams({ ...ctx.state, kind }, ctx.session);
    try {
      const payload = await latestPlot.run(() =>
        ctx.api.plotData<unknown>(ctx.state.session!, serviceKind(kind), params));
      if (payload === null) return; // a newer selection superseded this one
      clear(host);
      host.append(renderPlot(kind, payload, {
        width: ctx.state.width,
        height: ctx.state.height,
        theme: ctx.state.theme,
        xlab: ctx.state.xlab || undefined,
        ylab: ctx.state.ylab || undefined,
      }));
    } catch (err) {
      clear(host);
      host.append(el("p", { class: "error" }, String(err)));
    }
  }

  kindSelect.addEventListener("change", () => {
    ctx.setState({ kind: (kindSelect as HTMLSelectElement).value });
    void refresh();
  });
  measureSelect.addEventListener("change", () => {
    ctx.setState({ measure: (measureSelect as HTMLSelectElement).value });
    void refresh();
  });
  dgmSelect.addEventListener("change", () => {
    ctx.setState({ dgm: (dgmSelect as HTMLSelectElement).value || null });
    void refresh();
  });
  methodA.addEventListener("change", () => {
    ctx.setState({ methodA: (methodA as HTMLSelectElement).value });
    void refresh();
  });
  methodB.addEventListener("change", () => {
    ctx.setState({ methodB: (methodB as HTMLSelectElement).value });
    void refresh();
  });
  quantitySelect.addEventListener("change", () => {
    ctx.setState({ quantity: (quantitySelect as HTMLSelectElement).value as "estimate" | "se" });
    void refresh();
  });

  saveBtn.addEventListener("click", async () => {
    const kind = (kindSelect as HTMLSelectElement).value;
    const format = (formatSelect as HTMLSelectElement).value;
    const body: Record<string, unknown> = {
      ...plotParams({ ...ctx.state, kind }, ctx.session),
      xlab: ctx.state.xlab || null,
      ylab: ctx.state.ylab || null,
      theme: ctx.state.theme,
      width: ctx.state.width,
      height: ctx.state.height,
      dpi: ctx.state.dpi,
      format,
    };
    try {
      // the server renders hexbin/contour as the raw-pairs view
      const blob = await ctx.api.renderPlot(ctx.state.session!, serviceKind(kind), body);
      download(blob, `${kind}.${format}`);
    } catch (err) {
      ctx.notify(String(err), true);
    }
  });

  await refresh();
}
