/** Missing-data screen: tabular summary plus bar / heat / shadow views. */

import type { ApiClient } from "../api.js";
import { clear, el, svgEl } from "../dom.js";
import { extent, linearScale } from "../plots/scale.js";
import { paletteColor, theme } from "../plots/themes.js";
import type { AppState } from "../state.js";
import type { SessionInfo } from "../types.js";

export interface MissingCtx {
  api: ApiClient;
  state: AppState;
  setState(patch: Partial<AppState>): void;
  session: SessionInfo;
  notify(message: string, isError?: boolean): void;
}

export async function renderMissing(root: HTMLElement, ctx: MissingCtx): Promise<void> {
  clear(root);
  root.append(el("h2", {}, "Missing data"));
  if (!ctx.session.mapping) {
    root.append(el("p", { class: "hint" }, "Define the variable mapping first."));
    return;
  }
  const sid = ctx.state.session!;
  const views = ["table", "bar", "heat", "shadow"] as const;
  const tabs = el("div", { class: "toolbar", id: "missing-tabs" });
  for (const view of views) {
    tabs.append(
      el("button", {
        class: ctx.state.missingView === view ? "tab active" : "tab",
        "data-view": view,
        onclick: () => ctx.setState({ missingView: view }),
      }, view),
    );
  }
  const host = el("div", { id: "missing-host" });
  root.append(tabs, host);

  const summary = await ctx.api.missingTable(sid);
  const total = summary.summaries.reduce((acc, s) => acc + s.n_missing, 0);
  if (total === 0) {
    root.insertBefore(
      el("p", { class: "banner", id: "no-missing-banner" },
        "No missing data in this dataset."),
      tabs,
    );
  }

  const t = theme(ctx.state.theme);
  const view = ctx.state.missingView;
  if (view === "table") {
    const table = el("table", { class: "data-table", id: "missing-table" },
      el("thead", {}, el("tr", {},
        ...["variable", "dgm", "method", "missing", "proportion", "cumulative"]
          .map((h) => el("th", {}, h)))),
      el("tbody", {},
        ...summary.summaries.map((s) =>
          el("tr", {},
            el("td", {}, s.variable),
            el("td", {}, s.dgm.join(",")),
            el("td", {}, s.method),
            el("td", {}, String(s.n_missing)),
            el("td", {}, s.prop_missing.toFixed(4)),
            el("td", {}, String(s.n_cumulative))))),
    );
    host.append(table);
  } else if (view === "bar") {
    const { bars } = await ctx.api.missingBar(sid, "method");
    const width = 640;
    const height = 320;
    const svg = svgEl("svg", { viewBox: `0 0 ${width} ${height}`, width, height });
    svg.append(svgEl("rect", { x: 0, y: 0, width, height, fill: t.background }));
    const max = Math.max(1, ...bars.map((b) => b.n_missing));
    const bw = (width - 80) / Math.max(1, bars.length);
    bars.forEach((bar, i) => {
      const h = (bar.n_missing / max) * (height - 80);
      svg.append(
        svgEl("rect", {
          x: 60 + i * bw + 4,
          y: height - 40 - h,
          width: Math.max(2, bw - 8),
          height: h,
          fill: paletteColor(t, i),
        }),
        svgEl("text", {
          x: 60 + i * bw + bw / 2,
          y: height - 24,
          "font-size": 10,
          fill: t.ink,
          "text-anchor": "middle",
        }, `${bar.variable}/${bar.group}`),
        svgEl("text", {
          x: 60 + i * bw + bw / 2,
          y: height - 44 - h,
          "font-size": 10,
          fill: t.ink,
          "text-anchor": "middle",
        }, String(bar.n_missing)),
      );
    });
    host.append(svg);
  } else if (view === "heat") {
    const { tiles } = await ctx.api.missingHeat(sid);
    const methods: string[] = [];
    const dgms: string[] = [];
    for (const tile of tiles) {
      if (!methods.includes(tile.method)) methods.push(tile.method);
      const key = tile.dgm.join(",");
      if (!dgms.includes(key)) dgms.push(key);
    }
    const width = 560;
    const height = 120 + dgms.length * 60;
    const svg = svgEl("svg", { viewBox: `0 0 ${width} ${height}`, width, height });
    svg.append(svgEl("rect", { x: 0, y: 0, width, height, fill: t.background }));
    const cw = (width - 120) / methods.length;
    const ch = (height - 100) / dgms.length;
    for (const tile of tiles) {
      const ci = methods.indexOf(tile.method);
      const ri = dgms.indexOf(tile.dgm.join(","));
      const frac = tile.percent / 100;
      svg.append(
        svgEl("rect", {
          x: 80 + ci * cw,
          y: 40 + ri * ch,
          width: cw - 2,
          height: ch - 2,
          fill: paletteColor(t, 1),
          "fill-opacity": (0.08 + 0.92 * frac).toFixed(3),
        }, svgEl("title", {}, `${tile.percent.toFixed(1)}% missing`)),
        svgEl("text", {
          x: 80 + ci * cw + cw / 2,
          y: 40 + ri * ch + ch / 2 + 4,
          "font-size": 11,
          fill: t.ink,
          "text-anchor": "middle",
        }, `${tile.percent.toFixed(1)}%`),
      );
    }
    methods.forEach((m, i) =>
      svg.append(svgEl("text", {
        x: 80 + i * cw + cw / 2, y: height - 30, fill: t.ink,
        "font-size": 11, "text-anchor": "middle",
      }, m)));
    dgms.forEach((d, i) =>
      svg.append(svgEl("text", {
        x: 70, y: 40 + i * ch + ch / 2 + 4, fill: t.ink,
        "font-size": 11, "text-anchor": "end",
      }, d)));
    host.append(svg);
  } else {
    const numeric = ctx.session.columns.filter((c) => c.kind === "numeric");
    const x = ctx.state.shadowX ?? numeric[0]?.name;
    const y = ctx.state.shadowY ?? numeric[1]?.name ?? numeric[0]?.name;
    if (!x || !y) {
      host.append(el("p", { class: "hint" }, "No numeric columns to plot."));
      return;
    }
    const xSel = el("select", { id: "shadow-x" });
    const ySel = el("select", { id: "shadow-y" });
    for (const c of numeric) {
      const ox = el("option", { value: c.name }, c.name);
      if (c.name === x) ox.setAttribute("selected", "");
      xSel.append(ox);
      const oy = el("option", { value: c.name }, c.name);
      if (c.name === y) oy.setAttribute("selected", "");
      ySel.append(oy);
    }
    xSel.addEventListener("change", () => ctx.setState({ shadowX: xSel.value }));
    ySel.addEventListener("change", () => ctx.setState({ shadowY: ySel.value }));
    host.append(el("div", { class: "toolbar" },
      el("label", {}, "x:"), xSel, el("label", {}, "y:"), ySel));

    const { points } = await ctx.api.missingShadow(sid, x, y);
    const width = 560;
    const height = 420;
    const svg = svgEl("svg", { viewBox: `0 0 ${width} ${height}`, width, height });
    svg.append(svgEl("rect", { x: 0, y: 0, width, height, fill: t.background }));
    const sx = linearScale(extent(points.map((p) => p.x)), [50, width - 16]);
    const sy = linearScale(extent(points.map((p) => p.y)), [height - 40, 16]);
    for (const p of points) {
      // missing coordinates arrive pre-imputed below the observed range;
      // color distinguishes the missingness status
      svg.append(svgEl("circle", {
        cx: sx(p.x).toFixed(1),
        cy: sy(p.y).toFixed(1),
        r: 2,
        fill: p.x_missing || p.y_missing ? t.accent : paletteColor(t, 0),
        "fill-opacity": 0.6,
        class: p.x_missing || p.y_missing ? "pt-missing" : "pt-observed",
      }));
    }
    host.append(svg);
  }
}
