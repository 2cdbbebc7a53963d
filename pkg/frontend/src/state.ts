/** Application state, fully round-trippable through the URL hash so any
 * exploration view is shareable and bookmarkable. */

export const SCREENS = [
  "data",
  "view-data",
  "missing",
  "performance",
  "plots",
  "options",
  "guide",
] as const;

export type Screen = (typeof SCREENS)[number];

export interface AppState {
  screen: Screen;
  session: string | null;
  dgm: string | null;
  // plots screen
  kind: string;
  measure: string;
  methodA: string | null;
  methodB: string | null;
  quantity: "estimate" | "se";
  // missing screen
  missingView: "table" | "bar" | "heat" | "shadow";
  shadowX: string | null;
  shadowY: string | null;
  // options
  sigDigits: number;
  mcse: boolean;
  measures: string[] | null; // null = all
  theme: string;
  xlab: string;
  ylab: string;
  width: number;
  height: number;
  dpi: number;
}

export const DEFAULT_STATE: AppState = {
  screen: "data",
  session: null,
  dgm: null,
  kind: "forest",
  measure: "bias",
  methodA: null,
  methodB: null,
  quantity: "estimate",
  missingView: "table",
  shadowX: null,
  shadowY: null,
  sigDigits: 4,
  mcse: true,
  measures: null,
  theme: "default",
  xlab: "",
  ylab: "",
  width: 640,
  height: 480,
  dpi: 96,
};

export function encodeState(state: AppState): string {
  const params = new URLSearchParams();
  const d = DEFAULT_STATE;
  const set = (key: string, value: string | null, fallback: string | null) => {
    if (value !== null && value !== fallback) params.set(key, value);
  };
  set("session", state.session, d.session);
  set("dgm", state.dgm, d.dgm);
  set("kind", state.kind, d.kind);
  set("measure", state.measure, d.measure);
  set("ma", state.methodA, d.methodA);
  set("mb", state.methodB, d.methodB);
  set("q", state.quantity, d.quantity);
  set("mv", state.missingView, d.missingView);
  set("sx", state.shadowX, d.shadowX);
  set("sy", state.shadowY, d.shadowY);
  set("sig", String(state.sigDigits), String(d.sigDigits));
  set("mcse", state.mcse ? "1" : "0", d.mcse ? "1" : "0");
  set("measures", state.measures ? state.measures.join(",") : null, null);
  set("theme", state.theme, d.theme);
  set("xlab", state.xlab || null, null);
  set("ylab", state.ylab || null, null);
  set("w", String(state.width), String(d.width));
  set("h", String(state.height), String(d.height));
  set("dpi", String(state.dpi), String(d.dpi));
  const query = params.toString();
  return `#/${state.screen}${query ? "?" + query : ""}`;
}

export function decodeState(hash: string): AppState {
  const state = { ...DEFAULT_STATE };
  const trimmed = hash.replace(/^#\/?/, "");
  const [screenPart, queryPart] = trimmed.split("?", 2);
  if ((SCREENS as readonly string[]).includes(screenPart)) {
    state.screen = screenPart as Screen;
  }
  const params = new URLSearchParams(queryPart ?? "");
  const get = (key: string) => params.get(key);
  state.session = get("session");
  state.dgm = get("dgm");
  state.kind = get("kind") ?? state.kind;
  state.measure = get("measure") ?? state.measure;
  state.methodA = get("ma");
  state.methodB = get("mb");
  state.quantity = (get("q") as AppState["quantity"]) ?? state.quantity;
  state.missingView = (get("mv") as AppState["missingView"]) ?? state.missingView;
  state.shadowX = get("sx");
  state.shadowY = get("sy");
  if (get("sig")) state.sigDigits = Number(get("sig"));
  if (get("mcse") !== null) state.mcse = get("mcse") !== "0";
  const measures = get("measures");
  state.measures = measures ? measures.split(",").filter(Boolean) : null;
  state.theme = get("theme") ?? state.theme;
  state.xlab = get("xlab") ?? "";
  state.ylab = get("ylab") ?? "";
  if (get("w")) state.width = Number(get("w"));
  if (get("h")) state.height = Number(get("h"));
  if (get("dpi")) state.dpi = Number(get("dpi"));
  return state;
}

export const ALL_MEASURES = [
  "bias",
  "emp_se",
  "mod_se",
  "mse",
  "coverage",
  "becover",
  "power",
  "relprec",
  "mean_est",
  "median_est",
  "mean_sq_err",
  "median_sq_err",
] as const;

export const PLOT_KINDS = [
  "scatter",
  "bland-altman",
  "ridgeline",
  "hexbin",
  "contour",
  "forest",
  "lolly",
  "heat",
  "zip",
  "nested-loop",
] as const;

/** Kinds that the service computes directly; hexbin and contour are the
 * client-side binned views of the raw density pairs. */
export function serviceKind(kind: string): string {
  return kind === "hexbin" || kind === "contour" ? "density-pairs" : kind;
}
