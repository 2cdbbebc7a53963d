/** Declarative SVG components, one per plot family. Each consumes the
 * service's PlotData payload verbatim; hexbin/contour additionally bin
 * the raw pairs on this side (the engine deliberately serves raw points
 * for those). */

import { svgEl } from "../dom.js";
import type {
  BlandAltmanPayload,
  ForestPayload,
  HeatPayload,
  NestedLoopPayload,
  PairedPointsPayload,
  RidgelinePayload,
  ZipPayload,
} from "../types.js";
import {
  contourLevels,
  contourSegments,
  densityGrid,
  hexagonPath,
  hexbin,
} from "./binning.js";
import { extent, formatTick, linearScale, ticks, type Scale } from "./scale.js";
import { paletteColor, theme, type Theme } from "./themes.js";

export interface PlotOptions {
  width: number;
  height: number;
  theme: string;
  xlab?: string;
  ylab?: string;
}

const MARGIN = { left: 64, right: 16, top: 20, bottom: 48 };

interface Frame {
  svg: SVGElement;
  x: Scale;
  y: Scale;
  t: Theme;
}

function frame(
  opts: PlotOptions,
  xDomain: [number, number],
  yDomain: [number, number],
  axes: {
    xTicks?: number[];
    yTicks?: number[];
    xLabels?: string[];
    yLabels?: string[];
    pad?: number;
  } = {},
): Frame {
  const t = theme(opts.theme);
  const svg = svgEl("svg", {
    xmlns: "http://www.w3.org/2000/svg",
    viewBox: `0 0 ${opts.width} ${opts.height}`,
    width: opts.width,
    height: opts.height,
    role: "img",
  });
  svg.append(
    svgEl("rect", {
      x: 0,
      y: 0,
      width: opts.width,
      height: opts.height,
      fill: t.background,
    }),
  );
  const pad = axes.pad ?? 0.05;
  const x = linearScale(xDomain, [MARGIN.left, opts.width - MARGIN.right], pad);
  const y = linearScale(yDomain, [opts.height - MARGIN.bottom, MARGIN.top], pad);

  const xTicks = axes.xTicks ?? ticks(x.domain[0], x.domain[1]);
  const yTicks = axes.yTicks ?? ticks(y.domain[0], y.domain[1]);
  const xLabels = axes.xLabels ?? xTicks.map(formatTick);
  const yLabels = axes.yLabels ?? yTicks.map(formatTick);

  const baseline = opts.height - MARGIN.bottom;
  svg.append(
    svgEl("line", {
      x1: MARGIN.left,
      y1: baseline,
      x2: opts.width - MARGIN.right,
      y2: baseline,
      stroke: t.ink,
    }),
    svgEl("line", {
      x1: MARGIN.left,
      y1: baseline,
      x2: MARGIN.left,
      y2: MARGIN.top,
      stroke: t.ink,
    }),
  );
  xTicks.forEach((tick, i) => {
    const px = x(tick);
    svg.append(
      svgEl("line", { x1: px, y1: baseline, x2: px, y2: baseline + 4, stroke: t.ink }),
      svgEl(
        "text",
        { x: px, y: baseline + 16, fill: t.ink, "font-size": 11, "text-anchor": "middle" },
        xLabels[i] ?? "",
      ),
    );
  });
  yTicks.forEach((tick, i) => {
    const py = y(tick);
    svg.append(
      svgEl("line", { x1: MARGIN.left - 4, y1: py, x2: MARGIN.left, y2: py, stroke: t.ink }),
      svgEl(
        "text",
        {
          x: MARGIN.left - 7,
          y: py + 3.5,
          fill: t.ink,
          "font-size": 11,
          "text-anchor": "end",
        },
        yLabels[i] ?? "",
      ),
    );
  });
  if (opts.xlab) {
    svg.append(
      svgEl(
        "text",
        {
          x: (MARGIN.left + opts.width - MARGIN.right) / 2,
          y: opts.height - 10,
          fill: t.ink,
          "font-size": 13,
          "text-anchor": "middle",
        },
        opts.xlab,
      ),
    );
  }
  if (opts.ylab) {
    const cx = 16;
    const cy = (baseline + MARGIN.top) / 2;
    svg.append(
      svgEl(
        "text",
        {
          x: cx,
          y: cy,
          fill: t.ink,
          "font-size": 13,
          "text-anchor": "middle",
          transform: `rotate(-90 ${cx} ${cy})`,
        },
        opts.ylab,
      ),
    );
  }
  return { svg, x, y, t };
}

function dgmLabel(dgm: string[]): string {
  return dgm.length ? dgm.join(",") : "all";
}

export function renderScatter(data: PairedPointsPayload, opts: PlotOptions): SVGElement {
  const { svg, x, y, t } = frame(
    opts,
    extent(data.points.map((p) => p.a)),
    extent(data.points.map((p) => p.b)),
  );
  const lo = Math.max(x.domain[0], y.domain[0]);
  const hi = Math.min(x.domain[1], y.domain[1]);
  if (lo < hi) {
    svg.append(
      svgEl("line", {
        x1: x(lo),
        y1: y(lo),
        x2: x(hi),
        y2: y(hi),
        stroke: t.muted,
        "stroke-dasharray": "4 3",
      }),
    );
  }
  const dgms: string[] = [];
  for (const p of data.points) {
    const label = dgmLabel(p.dgm);
    if (!dgms.includes(label)) dgms.push(label);
  }
  for (const p of data.points) {
    svg.append(
      svgEl("circle", {
        cx: x(p.a).toFixed(1),
        cy: y(p.b).toFixed(1),
        r: 2,
        fill: paletteColor(t, dgms.indexOf(dgmLabel(p.dgm))),
        "fill-opacity": 0.55,
      }),
    );
  }
  return svg;
}

export function renderBlandAltman(data: BlandAltmanPayload, opts: PlotOptions): SVGElement {
  const ys = data.points.map((p) => p.diff);
  if (data.lower_limit !== null) ys.push(data.lower_limit);
  if (data.upper_limit !== null) ys.push(data.upper_limit);
  const { svg, x, y, t } = frame(opts, extent(data.points.map((p) => p.mean)), extent(ys));
  const lines: [number | null, string][] = [
    [data.mean_diff, t.accent],
    [data.lower_limit, t.muted],
    [data.upper_limit, t.muted],
  ];
  for (const [level, color] of lines) {
    if (level === null) continue;
    svg.append(
      svgEl("line", {
        x1: x.range[0],
        y1: y(level),
        x2: x.range[1],
        y2: y(level),
        stroke: color,
        "stroke-dasharray": "5 3",
      }),
    );
  }
  for (const p of data.points) {
    svg.append(
      svgEl("circle", {
        cx: x(p.mean).toFixed(1),
        cy: y(p.diff).toFixed(1),
        r: 2,
        fill: paletteColor(t, 0),
        "fill-opacity": 0.55,
      }),
    );
  }
  return svg;
}

export function renderRidgeline(data: RidgelinePayload, opts: PlotOptions): SVGElement {
  const groups = data.groups;
  const xs: number[] = [];
  for (const g of groups) {
    xs.push(...(g.grid ?? g.sample));
  }
  const labels = groups.map((g) => `${dgmLabel(g.dgm)} | ${g.method}`);
  const { svg, x, y, t } = frame(opts, extent(xs), [0, groups.length], {
    yTicks: groups.map((_, i) => i + 0.5),
    yLabels: labels,
    pad: 0.02,
  });
  const rowHeight = y(0) - y(1);
  groups.forEach((g, i) => {
    const base = y(i);
    const color = paletteColor(t, i);
    if (g.grid && g.density) {
      const peak = Math.max(...g.density) || 1;
      const pts = [`${x(g.grid[0]).toFixed(1)},${base.toFixed(1)}`];
      g.grid.forEach((gx, j) => {
        const py = base - (g.density![j] / peak) * rowHeight * 0.9;
        pts.push(`${x(gx).toFixed(1)},${py.toFixed(1)}`);
      });
      pts.push(`${x(g.grid[g.grid.length - 1]).toFixed(1)},${base.toFixed(1)}`);
      svg.append(
        svgEl("polygon", {
          points: pts.join(" "),
          fill: color,
          "fill-opacity": 0.55,
          stroke: color,
        }),
      );
    } else {
      for (const v of g.sample) {
        svg.append(
          svgEl("line", {
            x1: x(v),
            y1: base,
            x2: x(v),
            y2: base - rowHeight * 0.5,
            stroke: color,
          }),
        );
      }
    }
  });
  return svg;
}

export function renderHexbin(data: PairedPointsPayload, opts: PlotOptions): SVGElement {
  const { svg, x, y, t } = frame(
    opts,
    extent(data.points.map((p) => p.a)),
    extent(data.points.map((p) => p.b)),
  );
  // bin in pixel space so hexagons are regular on screen
  const pixels = data.points.map((p) => ({ x: x(p.a), y: y(p.b) }));
  const radius = 9;
  const cells = hexbin(pixels, radius);
  const peak = Math.max(...cells.map((c) => c.count));
  for (const cell of cells) {
    const frac = cell.count / peak;
    svg.append(
      svgEl("path", {
        d: hexagonPath(cell.cx, cell.cy, radius),
        fill: paletteColor(t, 0),
        "fill-opacity": (0.15 + 0.85 * frac).toFixed(3),
        stroke: t.background,
        "stroke-width": 0.5,
      }),
    );
  }
  return svg;
}

export function renderContour(data: PairedPointsPayload, opts: PlotOptions): SVGElement {
  const { svg, x, y, t } = frame(
    opts,
    extent(data.points.map((p) => p.a)),
    extent(data.points.map((p) => p.b)),
  );
  const grid = densityGrid(data.points.map((p) => ({ x: p.a, y: p.b })));
  const levels = contourLevels(grid);
  levels.forEach((level, i) => {
    const segments = contourSegments(grid, level);
    const d = segments
      .map(
        (s) =>
          `M${x(s[0]).toFixed(1)},${y(s[1]).toFixed(1)}L${x(s[2]).toFixed(1)},${y(s[3]).toFixed(1)}`,
      )
      .join("");
    if (d) {
      svg.append(
        svgEl("path", {
          d,
          fill: "none",
          stroke: paletteColor(t, 0),
          "stroke-opacity": (0.35 + (0.65 * (i + 1)) / levels.length).toFixed(3),
          "stroke-width": 1.2,
        }),
      );
    }
  });
  return svg;
}

export function renderForest(
  data: ForestPayload,
  opts: PlotOptions,
  lolly = false,
): SVGElement {
  const rows = data.points.map((p) => ({
    label: p.dgm.length ? `${dgmLabel(p.dgm)} | ${p.method}` : p.method,
    point: p,
  }));
  const xs = rows.flatMap(({ point }) => [point.lower, point.upper]);
  if (lolly) xs.push(0);
  const { svg, x, y, t } = frame(opts, extent(xs), [0, rows.length], {
    yTicks: rows.map((_, i) => i + 0.5),
    yLabels: rows.map((r) => r.label),
  });
  const methods: string[] = [];
  for (const { point } of rows) {
    if (!methods.includes(point.method)) methods.push(point.method);
  }
  if (lolly && x.domain[0] <= 0 && 0 <= x.domain[1]) {
    svg.append(
      svgEl("line", { x1: x(0), y1: y.range[0], x2: x(0), y2: y.range[1], stroke: t.muted }),
    );
  }
  rows.forEach(({ point }, i) => {
    const cy = y(i + 0.5);
    const color = paletteColor(t, methods.indexOf(point.method));
    if (lolly) {
      svg.append(
        svgEl("line", {
          x1: x(0),
          y1: cy,
          x2: x(point.value),
          y2: cy,
          stroke: color,
          "stroke-width": 1.5,
        }),
      );
    }
    svg.append(
      svgEl("line", {
        x1: x(point.lower),
        y1: cy,
        x2: x(point.upper),
        y2: cy,
        stroke: color,
        "stroke-width": 2,
      }),
      svgEl("circle", { cx: x(point.value), cy, r: 4, fill: color }),
    );
  });
  return svg;
}

export function renderHeat(data: HeatPayload, opts: PlotOptions): SVGElement {
  const methods: string[] = [];
  const dgms: string[] = [];
  for (const tile of data.tiles) {
    if (!methods.includes(tile.method)) methods.push(tile.method);
    const label = dgmLabel(tile.dgm);
    if (!dgms.includes(label)) dgms.push(label);
  }
  const { svg, x, y, t } = frame(opts, [0, methods.length], [0, dgms.length], {
    xTicks: methods.map((_, i) => i + 0.5),
    xLabels: methods,
    yTicks: dgms.map((_, i) => i + 0.5),
    yLabels: dgms,
    pad: 0,
  });
  const values = data.tiles.map((tile) => tile.value);
  const [lo, hi] = extent(values);
  const span = hi - lo || 1;
  const mix = (frac: number) => {
    const from = t.muted;
    const to = t.accent;
    const channel = (at: number) => {
      const a = parseInt(from.slice(at, at + 2), 16);
      const b = parseInt(to.slice(at, at + 2), 16);
      return Math.round(a + (b - a) * frac)
        .toString(16)
        .padStart(2, "0");
    };
    return `#${channel(1)}${channel(3)}${channel(5)}`;
  };
  for (const tile of data.tiles) {
    const ci = methods.indexOf(tile.method);
    const ri = dgms.indexOf(dgmLabel(tile.dgm));
    svg.append(
      svgEl("rect", {
        x: x(ci),
        y: y(ri + 1),
        width: x(ci + 1) - x(ci),
        height: y(ri) - y(ri + 1),
        fill: mix((tile.value - lo) / span),
        stroke: t.background,
      }),
      svgEl(
        "text",
        {
          x: x(ci + 0.5),
          y: y(ri + 0.5) + 4,
          fill: t.ink,
          "font-size": 11,
          "text-anchor": "middle",
        },
        Number(tile.value.toPrecision(4)).toString(),
      ),
    );
    const rect = svg.lastElementChild!.previousElementSibling!;
    rect.append(svgEl("title", {}, `${tile.method} / ${dgmLabel(tile.dgm)}: ${tile.value}`));
  }
  return svg;
}

export function renderZip(data: ZipPayload, opts: PlotOptions): SVGElement {
  const t = theme(opts.theme);
  const panels = new Map<string, ZipPayload["stripes"]>();
  for (const s of data.stripes) {
    const key = `${dgmLabel(s.dgm)} | ${s.method}`;
    const group = panels.get(key) ?? [];
    group.push(s);
    panels.set(key, group);
  }
  const keys = [...panels.keys()];
  const columns = Math.min(3, keys.length);
  const rows = Math.ceil(keys.length / columns);
  const svg = svgEl("svg", {
    xmlns: "http://www.w3.org/2000/svg",
    viewBox: `0 0 ${opts.width} ${opts.height}`,
    width: opts.width,
    height: opts.height,
  });
  svg.append(
    svgEl("rect", { x: 0, y: 0, width: opts.width, height: opts.height, fill: t.background }),
  );
  const allLo = Math.min(...data.stripes.map((s) => s.lower));
  const allHi = Math.max(...data.stripes.map((s) => s.upper));
  const span = allHi - allLo || 1;
  const innerW = (opts.width - 24) / columns;
  const innerH = (opts.height - 16) / rows;
  keys.forEach((key, index) => {
    const col = index % columns;
    const row = Math.floor(index / columns);
    const px0 = 12 + col * innerW + 4;
    const px1 = 12 + (col + 1) * innerW - 4;
    const py1 = 8 + row * innerH + 16;
    const py0 = 8 + (row + 1) * innerH - 6;
    svg.append(
      svgEl(
        "text",
        {
          x: (px0 + px1) / 2,
          y: py1 - 4,
          fill: t.ink,
          "font-size": 11,
          "text-anchor": "middle",
        },
        key,
      ),
    );
    const sx = (v: number) => px0 + ((v - allLo) / span) * (px1 - px0);
    for (const s of panels.get(key)!) {
      const py = py0 - (s.rank_percentile / 100) * (py0 - py1);
      svg.append(
        svgEl("line", {
          x1: sx(s.lower).toFixed(1),
          y1: py.toFixed(1),
          x2: sx(s.upper).toFixed(1),
          y2: py.toFixed(1),
          stroke: s.covers ? paletteColor(t, 0) : t.accent,
          "stroke-opacity": 0.7,
        }),
      );
    }
    svg.append(
      svgEl("rect", {
        x: px0,
        y: py1,
        width: px1 - px0,
        height: py0 - py1,
        fill: "none",
        stroke: t.grid,
      }),
    );
  });
  return svg;
}

export function renderNestedLoop(data: NestedLoopPayload, opts: PlotOptions): SVGElement {
  const ys: number[] = [];
  for (const s of data.series) {
    for (const v of s.values) if (v !== null) ys.push(v);
  }
  for (const ribbon of data.ribbons) ys.push(...ribbon.y);
  const { svg, x, y, t } = frame(opts, [0, data.positions.length], extent(ys), {
    xTicks: [],
    xLabels: [],
  });

  const stepPath = (values: (number | null)[]): string => {
    let d = "";
    let prev: number | null = null;
    values.forEach((v, i) => {
      if (v === null) {
        prev = null;
        return;
      }
      const x0 = x(i);
      const x1 = x(i + 1);
      const py = y(v);
      if (prev === null) {
        d += `M${x0.toFixed(1)},${py.toFixed(1)}`;
      } else {
        d += `L${x0.toFixed(1)},${prev.toFixed(1)}L${x0.toFixed(1)},${py.toFixed(1)}`;
      }
      d += `L${x1.toFixed(1)},${py.toFixed(1)}`;
      prev = py;
    });
    return d;
  };

  data.series.forEach((series, i) => {
    svg.append(
      svgEl("path", {
        d: stepPath(series.values),
        fill: "none",
        stroke: paletteColor(t, i),
        "stroke-width": 1.5,
      }),
    );
    const first = series.values.findIndex((v) => v !== null);
    if (first >= 0) {
      svg.append(
        svgEl(
          "text",
          {
            x: x(first + 0.1),
            y: y(series.values[first]!) - 4,
            fill: paletteColor(t, i),
            "font-size": 11,
          },
          series.method,
        ),
      );
    }
  });
  data.ribbons.forEach((ribbon) => {
    svg.append(
      svgEl("path", {
        d: stepPath(ribbon.y),
        fill: "none",
        stroke: t.muted,
      }),
      svgEl(
        "text",
        {
          x: x(0) + 2,
          y: y(Math.max(...ribbon.y)) - 3,
          fill: t.ink,
          "font-size": 10,
        },
        `${ribbon.factor}: ${ribbon.levels.join(", ")}`,
      ),
    );
  });
  return svg;
}

/** Dispatch a service payload to its component. */
export function renderPlot(kind: string, payload: unknown, opts: PlotOptions): SVGElement {
  switch (kind) {
    case "scatter":
    case "density-pairs":
      return renderScatter(payload as PairedPointsPayload, opts);
    case "hexbin":
      return renderHexbin(payload as PairedPointsPayload, opts);
    case "contour":
      return renderContour(payload as PairedPointsPayload, opts);
    case "bland-altman":
      return renderBlandAltman(payload as BlandAltmanPayload, opts);
    case "ridgeline":
      return renderRidgeline(payload as RidgelinePayload, opts);
    case "forest":
      return renderForest(payload as ForestPayload, opts, false);
    case "lolly":
      return renderForest(payload as ForestPayload, opts, true);
    case "heat":
      return renderHeat(payload as HeatPayload, opts);
    case "zip":
      return renderZip(payload as ZipPayload, opts);
    case "nested-loop":
      return renderNestedLoop(payload as NestedLoopPayload, opts);
    default:
      throw new Error(`unknown plot kind ${kind}`);
  }
}
