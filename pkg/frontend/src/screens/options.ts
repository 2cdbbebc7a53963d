/** Options screen: measure selection, table display, and plot export
 * controls. Everything here is state that the other screens consume. */

import type { ApiClient } from "../api.js";
import { clear, el } from "../dom.js";
import { ALL_MEASURES, type AppState } from "../state.js";
import { THEMES } from "../plots/themes.js";

export interface OptionsCtx {
  api: ApiClient;
  state: AppState;
  setState(patch: Partial<AppState>): void;
  notify(message: string, isError?: boolean): void;
}

export function renderOptions(root: HTMLElement, ctx: OptionsCtx): void {
  clear(root);
  root.append(el("h2", {}, "Options"));

  // --- performance measures ---
  const measureBoxes: HTMLInputElement[] = [];
  const measureList = el("div", { class: "check-grid", id: "measure-list" });
  for (const measure of ALL_MEASURES) {
    const box = el("input", {
      type: "checkbox",
      id: `measure-${measure}`,
      value: measure,
    }) as HTMLInputElement;
    box.checked = ctx.state.measures === null || ctx.state.measures.includes(measure);
    measureBoxes.push(box);
    measureList.append(el("label", { class: "check" }, box, ` ${measure}`));
  }
  const applyMeasures = el("button", {
    id: "apply-measures",
    onclick: async () => {
      const chosen = measureBoxes.filter((b) => b.checked).map((b) => b.value);
      const selection = chosen.length === ALL_MEASURES.length ? null : chosen;
      ctx.setState({ measures: selection });
      if (ctx.state.session) {
        try {
          await ctx.api.putOptions(ctx.state.session, {
            measures: selection ?? ([...ALL_MEASURES] as string[]),
          });
        } catch (err) {
          ctx.notify(String(err), true);
        }
      }
    },
  }, "Apply selection");

  // --- plot appearance / export ---
  const themeSelect = el("select", { id: "opt-theme" });
  for (const name of Object.keys(THEMES)) {
    const option = el("option", { value: name }, name);
    if (name === ctx.state.theme) option.setAttribute("selected", "");
    themeSelect.append(option);
  }
  const xlab = el("input", { type: "text", id: "opt-xlab", value: ctx.state.xlab,
                             placeholder: "(default)" }) as HTMLInputElement;
  const ylab = el("input", { type: "text", id: "opt-ylab", value: ctx.state.ylab,
                             placeholder: "(default)" }) as HTMLInputElement;
  const width = el("input", { type: "number", id: "opt-width", value: ctx.state.width,
                              min: 200, max: 4000 }) as HTMLInputElement;
  const height = el("input", { type: "number", id: "opt-height", value: ctx.state.height,
                               min: 150, max: 4000 }) as HTMLInputElement;
  const dpi = el("input", { type: "number", id: "opt-dpi", value: ctx.state.dpi,
                            min: 36, max: 600 }) as HTMLInputElement;

  themeSelect.addEventListener("change", () =>
    ctx.setState({ theme: (themeSelect as HTMLSelectElement).value }));
  xlab.addEventListener("change", () => ctx.setState({ xlab: xlab.value }));
  ylab.addEventListener("change", () => ctx.setState({ ylab: ylab.value }));
  width.addEventListener("change", () => ctx.setState({ width: Number(width.value) }));
  height.addEventListener("change", () => ctx.setState({ height: Number(height.value) }));
  dpi.addEventListener("change", () => ctx.setState({ dpi: Number(dpi.value) }));

  root.append(
    el("section", { class: "card" },
      el("h3", {}, "Performance measures"),
      el("p", { class: "hint" }, "All measures are included by default."),
      measureList,
      applyMeasures,
    ),
    el("section", { class: "card" },
      el("h3", {}, "Plot appearance and export"),
      el("div", { class: "form-row" }, el("label", {}, "Theme"), themeSelect),
      el("div", { class: "form-row" }, el("label", {}, "x-axis label"), xlab),
      el("div", { class: "form-row" }, el("label", {}, "y-axis label"), ylab),
      el("div", { class: "form-row" }, el("label", {}, "Width (px)"), width),
      el("div", { class: "form-row" }, el("label", {}, "Height (px)"), height),
      el("div", { class: "form-row" }, el("label", {}, "DPI (raster export)"), dpi),
    ),
  );
}
