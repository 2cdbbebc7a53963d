/** Client-side binning of raw paired points for the overplotting-safe
 * views: hexagonal bins and density contours. This is the one place the
 * UI aggregates anything, and it is display-only: the inputs are the raw
 * per-repetition pairs served by the engine. */

export interface Point {
  x: number;
  y: number;
}

export interface HexCell {
  cx: number;
  cy: number;
  count: number;
}

/** Snap points onto a pointy-top hexagonal lattice with circumradius
 * ``radius`` (in the same units as the coordinates) and count per cell.
 * Nearest-center assignment: the candidate centers are the nearest column
 * in each of the two nearest rows. */
export function hexbin(points: Point[], radius: number): HexCell[] {
  const dx = radius * Math.sqrt(3);
  const dy = radius * 1.5;
  const cells = new Map<string, HexCell>();
  for (const p of points) {
    let best: { row: number; col: number; d2: number } | null = null;
    const row0 = Math.floor(p.y / dy);
    for (const row of [row0, row0 + 1]) {
      const offset = (((row % 2) + 2) % 2) / 2; // odd rows shift half a column
      const col = Math.round(p.x / dx - offset);
      const cx = (col + offset) * dx;
      const cy = row * dy;
      const d2 = (p.x - cx) ** 2 + (p.y - cy) ** 2;
      if (best === null || d2 < best.d2) best = { row, col, d2 };
    }
    const key = `${best!.row},${best!.col}`;
    const existing = cells.get(key);
    if (existing) {
      existing.count += 1;
    } else {
      const offset = (((best!.row % 2) + 2) % 2) / 2;
      cells.set(key, {
        cx: (best!.col + offset) * dx,
        cy: best!.row * dy,
        count: 1,
      });
    }
  }
  return [...cells.values()];
}

/** Vertex offsets of a pointy-top hexagon with circumradius r. */
export function hexagonPath(cx: number, cy: number, r: number): string {
  const parts: string[] = [];
  for (let i = 0; i < 6; i++) {
    const angle = (Math.PI / 180) * (60 * i - 30);
    const x = cx + r * Math.cos(angle);
    const y = cy + r * Math.sin(angle);
    parts.push(`${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`);
  }
  return parts.join("") + "Z";
}

export interface DensityGrid {
  x0: number;
  y0: number;
  dx: number;
  dy: number;
  nx: number;
  ny: number;
  values: Float64Array; // row-major [iy * nx + ix]
}

/** 2D histogram over the padded extent of the points, box-smoothed so the
 * contour lines come out reasonably round. */
export function densityGrid(points: Point[], nx = 48, ny = 48, smooth = 2): DensityGrid {
  let xLo = Infinity;
  let xHi = -Infinity;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const p of points) {
    if (p.x < xLo) xLo = p.x;
    if (p.x > xHi) xHi = p.x;
    if (p.y < yLo) yLo = p.y;
    if (p.y > yHi) yHi = p.y;
  }
  if (xLo === xHi) {
    xLo -= 1;
    xHi += 1;
  }
  if (yLo === yHi) {
    yLo -= 1;
    yHi += 1;
  }
  const padX = 0.05 * (xHi - xLo);
  const padY = 0.05 * (yHi - yLo);
  xLo -= padX;
  xHi += padX;
  yLo -= padY;
  yHi += padY;
  const dx = (xHi - xLo) / nx;
  const dy = (yHi - yLo) / ny;
  const values = new Float64Array(nx * ny);
  for (const p of points) {
    const ix = Math.min(nx - 1, Math.floor((p.x - xLo) / dx));
    const iy = Math.min(ny - 1, Math.floor((p.y - yLo) / dy));
    values[iy * nx + ix] += 1;
  }
  let grid = values;
  for (let pass = 0; pass < smooth; pass++) {
    const next = new Float64Array(nx * ny);
    for (let iy = 0; iy < ny; iy++) {
      for (let ix = 0; ix < nx; ix++) {
        let sum = 0;
        let n = 0;
        for (let oy = -1; oy <= 1; oy++) {
          for (let ox = -1; ox <= 1; ox++) {
            const jx = ix + ox;
            const jy = iy + oy;
            if (jx >= 0 && jx < nx && jy >= 0 && jy < ny) {
              sum += grid[jy * nx + jx];
              n += 1;
            }
          }
        }
        next[iy * nx + ix] = sum / n;
      }
    }
    grid = next;
  }
  return { x0: xLo, y0: yLo, dx, dy, nx, ny, values: grid };
}

export type Segment = [number, number, number, number]; // x1,y1,x2,y2 in data units

/** Marching squares: iso-lines of the density grid at one level, with
 * linear interpolation along cell edges. Cell corners are grid-cell
 * centers. */
export function contourSegments(grid: DensityGrid, level: number): Segment[] {
  const { nx, ny, values } = grid;
  const cx = (ix: number) => grid.x0 + (ix + 0.5) * grid.dx;
  const cy = (iy: number) => grid.y0 + (iy + 0.5) * grid.dy;
  const segments: Segment[] = [];
  const at = (ix: number, iy: number) => values[iy * nx + ix];

  for (let iy = 0; iy < ny - 1; iy++) {
    for (let ix = 0; ix < nx - 1; ix++) {
      const v00 = at(ix, iy); // bottom-left
      const v10 = at(ix + 1, iy);
      const v11 = at(ix + 1, iy + 1);
      const v01 = at(ix, iy + 1);
      let index = 0;
      if (v00 >= level) index |= 1;
      if (v10 >= level) index |= 2;
      if (v11 >= level) index |= 4;
      if (v01 >= level) index |= 8;
      if (index === 0 || index === 15) continue;

      const lerp = (a: number, b: number) => (level - a) / (b - a);
      // edge midpoints with interpolation, in data units
      const bottom = (): [number, number] => [cx(ix) + lerp(v00, v10) * grid.dx, cy(iy)];
      const top = (): [number, number] => [cx(ix) + lerp(v01, v11) * grid.dx, cy(iy + 1)];
      const left = (): [number, number] => [cx(ix), cy(iy) + lerp(v00, v01) * grid.dy];
      const right = (): [number, number] => [cx(ix + 1), cy(iy) + lerp(v10, v11) * grid.dy];

      const join = (a: [number, number], b: [number, number]) =>
        segments.push([a[0], a[1], b[0], b[1]]);

      switch (index) {
        case 1:
        case 14:
          join(left(), bottom());
          break;
        case 2:
        case 13:
          join(bottom(), right());
          break;
        case 3:
        case 12:
          join(left(), right());
          break;
        case 4:
        case 11:
          join(top(), right());
          break;
        case 5:
          join(left(), top());
          join(bottom(), right());
          break;
        case 6:
        case 9:
          join(bottom(), top());
          break;
        case 7:
        case 8:
          join(left(), top());
          break;
        case 10:
          join(left(), bottom());
          join(top(), right());
          break;
      }
    }
  }
  return segments;
}

/** Evenly spaced contour levels strictly inside the grid's value range. */
export function contourLevels(grid: DensityGrid, count = 6): number[] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of grid.values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(hi > lo)) return [];
  const levels: number[] = [];
  for (let i = 1; i <= count; i++) {
    levels.push(lo + ((hi - lo) * i) / (count + 1));
  }
  return levels;
}
