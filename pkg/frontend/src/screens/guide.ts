/** User guide: a static walkthrough of the screens and controls. */

import { clear, el } from "../dom.js";

const SECTIONS: [string, string][] = [
  ["Data",
   "Load a tidy results file (csv, tsv, or json records; gzip/zip accepted, " +
   "pasted data is read as tab-separated), then map columns to roles. Only " +
   "the point-estimate column is required; add standard errors, a true " +
   "value (fixed or per-repetition), method and DGM columns, supplied " +
   "confidence bounds or a degrees-of-freedom column, and a repetition id " +
   "for cross-method pairing."],
  ["View uploaded data",
   "Inspect the raw rows before analysing: sort by any column, filter by " +
   "substring, and page through the dataset."],
  ["Missing data",
   "Tabulates missing values per variable, method, and DGM, with bar, " +
   "heat, and shadow-scatter views. In the shadow view, missing " +
   "coordinates are displayed just below the observed minimum in a " +
   "distinct color so patterns of missingness stay visible."],
  ["Performance measures",
   "The formatted table for one data-generating mechanism; switch DGM " +
   "from the select list. Toggle Monte Carlo standard errors and the " +
   "number of significant digits, copy the LaTeX rendering, or download " +
   "the estimates (full precision, tidy) and the displayed table."],
  ["Plots",
   "Method-wise comparisons (scatter, Bland-Altman, ridgeline, hexbin, " +
   "contour) and performance displays (forest, lolly, heat, zip, nested " +
   "loop). Hexbin and contour are binned in the browser from the raw " +
   "paired points. Save plot downloads the server-rendered SVG; png/pdf " +
   "are offered when the server has a converter configured."],
  ["Options",
   "Choose which measures are estimated, and set the plot theme, axis " +
   "labels, size, and export resolution."],
];

export function renderGuide(root: HTMLElement): void {
  clear(root);
  root.append(el("h2", {}, "User guide"));
  for (const [title, body] of SECTIONS) {
    root.append(el("section", { class: "card" },
      el("h3", {}, title), el("p", {}, body)));
  }
  root.append(el("p", { class: "hint" },
    "Every view is bookmarkable: the session and all selections are " +
    "encoded in the URL."));
}
