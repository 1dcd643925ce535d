/**
 * Render-backend-independent figure description.  Figure builders emit a
 * Scene (rects, lines, polylines, text in pixel coordinates); the SVG and
 * PNG backends serialize it without further computation, which keeps both
 * outputs deterministic byte for byte.
 */

export type Color = [number, number, number];

export interface RectItem {
  kind: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  fill: Color;
}

export interface LineItem {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  color: Color;
  width: number;
  dash?: [number, number];
}

export interface PolylineItem {
  kind: "polyline";
  points: [number, number][];
  color: Color;
  width: number;
  dash?: [number, number];
}

export interface TextItem {
  kind: "text";
  x: number;
  y: number;
  text: string;
  size: number;
  color: Color;
  anchor: "start" | "middle" | "end";
  /** rotate 90 degrees counter-clockwise around (x, y), for y-axis labels */
  vertical?: boolean;
}

export type SceneItem = RectItem | LineItem | PolylineItem | TextItem;

export interface Scene {
  width: number;
  height: number;
  background: Color;
  items: SceneItem[];
}

export const BLACK: Color = [0, 0, 0];
export const WHITE: Color = [255, 255, 255];
export const GRAY: Color = [110, 110, 110];
export const BLUE: Color = [31, 119, 180];
export const RED: Color = [214, 39, 40];

/** tab10-style cycle for per-N series */
export const SERIES_COLORS: Color[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
];

export interface Scale {
  toPx(value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const slope = d1 === d0 ? 0 : (r1 - r0) / (d1 - d0);
  return { toPx: (v) => r0 + (v - d0) * slope, domain, range };
}

/** base-10 log scale; callers floor their data before using it */
export function log10Scale(domain: [number, number], range: [number, number]): Scale {
  const inner = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  return { toPx: (v) => inner.toPx(Math.log10(v)), domain, range };
}

/** Evenly chosen subset of at most maxCount values (always keeps endpoints). */
export function pickTicks<T>(values: T[], maxCount: number): T[] {
  if (values.length <= maxCount) return values;
  const step = Math.ceil(values.length / maxCount);
  const out: T[] = [];
  for (let i = 0; i < values.length; i += step) out.push(values[i]);
  if (out[out.length - 1] !== values[values.length - 1]) out.push(values[values.length - 1]);
  return out;
}

/** Compact deterministic number label: 0.25, 12, 1e-06 ... */
export function fmtNumber(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 0.01 && abs < 10000) {
    return String(Number(value.toPrecision(4)));
  }
  return value.toExponential(0).replace("e", "e");
}

/** Decade ticks between (floored) powers of ten covering [lo, hi]. */
export function decadeTicks(lo: number, hi: number, maxCount = 6): number[] {
  const first = Math.ceil(Math.log10(lo));
  const last = Math.floor(Math.log10(hi));
  const decades: number[] = [];
  for (let e = first; e <= last; e++) decades.push(e);
  return pickTicks(decades, maxCount).map((e) => Math.pow(10, e));
}
