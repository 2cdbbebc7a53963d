/** Linear scales and tick generation for the SVG plot components. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  pad = 0.05,
): Scale {
  let [lo, hi] = domain;
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  lo -= pad * span;
  hi += pad * span;
  const scale = ((value: number) =>
    range[0] + ((value - lo) / (hi - lo)) * (range[1] - range[0])) as Scale;
  scale.domain = [lo, hi];
  scale.range = range;
  return scale;
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  if (!Number.isFinite(lo) || !Number.isFinite(hi) || lo === hi) return [];
  const raw = (hi - lo) / Math.max(count, 1);
  const magnitude = 10 ** Math.floor(Math.log10(raw));
  let step = magnitude;
  for (const mult of [1, 2, 2.5, 5, 10]) {
    step = mult * magnitude;
    if (raw <= step) break;
  }
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    out.push(Math.abs(t) < 1e-12 * step ? 0 : Number(t.toPrecision(12)));
  }
  return out;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e5 || abs < 1e-4) return value.toExponential(1);
  return String(Number(value.toPrecision(6)));
}
