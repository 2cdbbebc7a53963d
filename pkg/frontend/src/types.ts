/** Wire types of the analysis service JSON API. */

export interface Column {
  name: string;
  kind: "numeric" | "string";
}

export interface UploadResult {
  session_id: string;
  columns: Column[];
  n_rows: number;
}

export interface MappingBody {
  estimate: string;
  se?: string | null;
  truth?: { value?: number | null; column?: string | null } | null;
  method?: string | null;
  reference?: string | null;
  dgm?: string[];
  ci?: string[] | null;
  df?: string | null;
  rep?: string | null;
  alpha?: number;
}

export interface Stratum {
  dgm: string[];
  method: string;
  n: number;
}

export interface MappingResult {
  mapping: MappingBody;
  strata: Stratum[];
  columns: Column[];
}

export interface SessionInfo {
  session_id: string;
  source_name: string | null;
  columns: Column[];
  n_rows: number;
  mapping: MappingBody | null;
  strata: Stratum[] | null;
  options: {
    sig_digits: number;
    include_mcse: boolean;
    caption: string;
    measures: string[] | null;
  };
}

export interface PreviewPage {
  columns: string[];
  rows: string[][];
  offset: number;
  total: number;
}

export interface PerformanceEstimate {
  measure: string;
  dgm: string[];
  method: string;
  value: number;
  mcse: number | null;
  n_used: number;
}

export interface MissingSummaryRow {
  variable: string;
  dgm: string[];
  method: string;
  n_missing: number;
  prop_missing: number;
  n_cumulative: number;
}

export interface MissingBar {
  variable: string;
  group: string;
  n_missing: number;
  prop_missing: number;
}

export interface MissingTile {
  method: string;
  dgm: string[];
  percent: number;
}

export interface ShadowPoint {
  x: number;
  y: number;
  x_missing: boolean;
  y_missing: boolean;
}

export interface PairedPointsPayload {
  kind: string;
  method_a: string;
  method_b: string;
  quantity: string;
  n_dropped: number;
  points: { dgm: string[]; rep_id: string | null; a: number; b: number }[];
}

export interface BlandAltmanPayload {
  kind: string;
  method_a: string;
  method_b: string;
  quantity: string;
  mean_diff: number;
  lower_limit: number | null;
  upper_limit: number | null;
  points: { dgm: string[]; mean: number; diff: number }[];
}

export interface RidgelinePayload {
  kind: string;
  groups: {
    dgm: string[];
    method: string;
    sample: number[];
    grid: number[] | null;
    density: number[] | null;
    bandwidth: number | null;
  }[];
}

export interface ForestPayload {
  kind: string;
  points: {
    dgm: string[];
    method: string;
    value: number;
    mcse: number;
    lower: number;
    upper: number;
  }[];
}

export interface HeatPayload {
  kind: string;
  tiles: { dgm: string[]; method: string; value: number }[];
}

export interface ZipPayload {
  kind: string;
  stripes: {
    dgm: string[];
    method: string;
    rank_percentile: number;
    lower: number;
    upper: number;
    covers: boolean;
  }[];
}

export interface NestedLoopPayload {
  kind: string;
  positions: string[][];
  factor_names: string[];
  series: { method: string; values: (number | null)[] }[];
  ribbons: { factor: string; levels: string[]; y: number[] }[];
  value_range: [number, number];
}

/** Wide "as displayed" table rows: label column plus one formatted cell per method. */
export type WideTableRow = Record<string, string>;
