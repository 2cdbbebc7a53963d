/** Style tokens per theme; themes never change data. Mirrors the trio
 * offered by the service renderer. */

export interface Theme {
  background: string;
  ink: string;
  grid: string;
  palette: string[];
  accent: string;
  muted: string;
}

export const THEMES: Record<string, Theme> = {
  default: {
    background: "#ffffff",
    ink: "#222222",
    grid: "#dddddd",
    palette: ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"],
    accent: "#d62728",
    muted: "#8faabf",
  },
  minimal: {
    background: "#ffffff",
    ink: "#444444",
    grid: "#f0f0f0",
    palette: ["#555555", "#999999", "#bbbbbb", "#777777", "#333333", "#aaaaaa"],
    accent: "#000000",
    muted: "#cccccc",
  },
  dark: {
    background: "#1e1e24",
    ink: "#e8e8e8",
    grid: "#3a3a44",
    palette: ["#56b4e9", "#e69f00", "#009e73", "#cc79a7", "#f0e442", "#d55e00"],
    accent: "#f0e442",
    muted: "#5a5a66",
  },
};

export function theme(name: string): Theme {
  return THEMES[name] ?? THEMES.default;
}

export function paletteColor(t: Theme, index: number): string {
  return t.palette[index % t.palette.length];
}
