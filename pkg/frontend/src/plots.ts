/**
 * Figure builders: harness CSV tables -> Scene.
 *
 * The plot layer is a pure view: it never recomputes physics, and overlay
 * lines sit exactly at the values read from thresholds.csv.  Log axes floor
 * non-positive data at 1e-16 (exact NFT minima can be 0) and report a
 * warning instead of failing.
 */

import { existsSync } from "fs";
import { join } from "path";

import { viridis } from "./colormap";
import { num, readTable, requireColumns, Table } from "./csv";
import {
  BLACK,
  BLUE,
  Color,
  decadeTicks,
  fmtNumber,
  GRAY,
  linearScale,
  log10Scale,
  pickTicks,
  RED,
  Scale,
  Scene,
  SceneItem,
  SERIES_COLORS,
  WHITE,
} from "./scene";

export const LOG_FLOOR = 1e-16;

export type PlotKind = "heatmap" | "convergence" | "rank" | "variance" | "frame" | "slice";

export interface PlotOptions {
  n?: number;
  semilog?: boolean;
}

export interface BuildResult {
  scene: Scene;
  warnings: string[];
  /** pixel positions of named features, used by the overlay-exactness tests */
  meta: Record<string, number>;
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 74, right: 30, top: 40, bottom: 56 };

interface Area {
  x0: number;
  y0: number;
  w: number;
  h: number;
}

function plotArea(rightExtra = 0): Area {
  return {
    x0: MARGIN.left,
    y0: MARGIN.top,
    w: WIDTH - MARGIN.left - MARGIN.right - rightExtra,
    h: HEIGHT - MARGIN.top - MARGIN.bottom,
  };
}

function frameItems(area: Area, title: string, xLabel: string, yLabel: string): SceneItem[] {
  const { x0, y0, w, h } = area;
  return [
    { kind: "line", x1: x0, y1: y0, x2: x0 + w, y2: y0, color: BLACK, width: 1 },
    { kind: "line", x1: x0, y1: y0 + h, x2: x0 + w, y2: y0 + h, color: BLACK, width: 1 },
    { kind: "line", x1: x0, y1: y0, x2: x0, y2: y0 + h, color: BLACK, width: 1 },
    { kind: "line", x1: x0 + w, y1: y0, x2: x0 + w, y2: y0 + h, color: BLACK, width: 1 },
    { kind: "text", x: x0 + w / 2, y: y0 - 14, text: title, size: 13, color: BLACK, anchor: "middle" },
    {
      kind: "text",
      x: x0 + w / 2,
      y: y0 + h + 38,
      text: xLabel,
      size: 12,
      color: BLACK,
      anchor: "middle",
    },
    {
      kind: "text",
      x: x0 - 52,
      y: y0 + h / 2,
      text: yLabel,
      size: 12,
      color: BLACK,
      anchor: "middle",
      vertical: true,
    },
  ];
}

function xTickItems(area: Area, px: number, label: string): SceneItem[] {
  return [
    { kind: "line", x1: px, y1: area.y0 + area.h, x2: px, y2: area.y0 + area.h + 5, color: BLACK, width: 1 },
    { kind: "text", x: px, y: area.y0 + area.h + 18, text: label, size: 10, color: BLACK, anchor: "middle" },
  ];
}

function yTickItems(area: Area, py: number, label: string): SceneItem[] {
  return [
    { kind: "line", x1: area.x0 - 5, y1: py, x2: area.x0, y2: py, color: BLACK, width: 1 },
    { kind: "text", x: area.x0 - 8, y: py + 4, text: label, size: 10, color: BLACK, anchor: "end" },
  ];
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function pickN(table: Table, requested: number | undefined, warnings: string[]): number {
  const available = uniqueSorted(table.rows.map((r) => num(r, "N")));
  if (available.length === 0) {
    throw new Error(`${table.name} has no data rows`);
  }
  if (requested === undefined) {
    if (available.length > 1) {
      warnings.push(
        `multiple N in ${table.name} (${available.join(", ")}); using N=${available[0]} (pass --n to choose)`,
      );
    }
    return available[0];
  }
  if (!available.includes(requested)) {
    throw new Error(`N=${requested} not present in ${table.name} (have: ${available.join(", ")})`);
  }
  return requested;
}

function flooredForLog(value: number, warnings: string[], context: string): number {
  if (value < LOG_FLOOR) {
    if (!warnings.some((w) => w.startsWith(context))) {
      warnings.push(`${context}: values below ${LOG_FLOOR} floored for the log axis`);
    }
    return LOG_FLOOR;
  }
  return value;
}

/** Cell edges for a (possibly non-uniform) sorted grid: midpoints between
 * neighbors, end cells extended by half the adjacent spacing. */
function gridEdges(values: number[]): number[] {
  if (values.length === 1) {
    return [values[0] - 0.5, values[0] + 0.5];
  }
  const edges = [values[0] - (values[1] - values[0]) / 2];
  for (let i = 1; i < values.length; i++) {
    edges.push((values[i - 1] + values[i]) / 2);
  }
  edges.push(values[values.length - 1] + (values[values.length - 1] - values[values.length - 2]) / 2);
  return edges;
}

// ---------------------------------------------------------------------------
// heatmap

export function buildHeatmap(
  heatmap: Table,
  thresholds: Table | null,
  options: PlotOptions,
): BuildResult {
  requireColumns(heatmap, ["N", "L", "t", "mean_E", "mu", "n_runs"]);
  const warnings: string[] = [];
  const meta: Record<string, number> = {};
  const n = pickN(heatmap, options.n, warnings);
  const rows = heatmap.rows.filter((r) => num(r, "N") === n);
  const lValues = uniqueSorted(rows.map((r) => num(r, "L")));
  const tValues = uniqueSorted(rows.map((r) => num(r, "t")));
  const byCell = new Map<string, number>();
  for (const row of rows) {
    byCell.set(`${num(row, "L")}|${num(row, "t")}`, num(row, "mean_E"));
  }

  const area = plotArea(64); // leave room for the colorbar
  const lEdges = gridEdges(lValues);
  const tEdges = gridEdges(tValues);
  const xScale = linearScale([tEdges[0], tEdges[tEdges.length - 1]], [area.x0, area.x0 + area.w]);
  const yScale = linearScale([lEdges[0], lEdges[lEdges.length - 1]], [area.y0 + area.h, area.y0]);
  meta.y_per_l_unit = yScale.toPx(1) - yScale.toPx(0);

  const items: SceneItem[] = [];
  for (let li = 0; li < lValues.length; li++) {
    for (let ti = 0; ti < tValues.length; ti++) {
      const value = byCell.get(`${lValues[li]}|${tValues[ti]}`);
      if (value === undefined) continue;
      const floored = flooredForLog(value, warnings, "heatmap mean_E");
      const unit = (Math.log10(floored) + 16) / 16; // fixed color domain [1e-16, 1]
      const xLeft = xScale.toPx(tEdges[ti]);
      const xRight = xScale.toPx(tEdges[ti + 1]);
      const yBottom = yScale.toPx(lEdges[li]);
      const yTop = yScale.toPx(lEdges[li + 1]);
      items.push({
        kind: "rect",
        x: xLeft,
        y: yTop,
        w: xRight - xLeft,
        h: yBottom - yTop,
        fill: viridis(unit),
      });
    }
  }

  // threshold overlays: horizontal lines at exactly the thresholds.csv values
  if (thresholds !== null) {
    requireColumns(thresholds, ["N", "L_bp", "L_op"]);
    const row = thresholds.rows.find((r) => num(r, "N") === n);
    if (row !== undefined) {
      const overlays: [string, string, Color, [number, number]][] = [
        ["L_bp", "bp", BLACK, [8, 5]],
        ["L_op", "op", WHITE, [2, 4]],
      ];
      for (const [column, tag, color, dash] of overlays) {
        if (row[column] === "") continue;
        const lValue = num(row, column);
        const py = yScale.toPx(lValue);
        meta[`overlay_${tag}_l`] = lValue;
        meta[`overlay_${tag}_y`] = py;
        items.push({
          kind: "line",
          x1: area.x0,
          y1: py,
          x2: area.x0 + area.w,
          y2: py,
          color,
          width: 2,
          dash,
        });
      }
    } else {
      warnings.push(`no thresholds row for N=${n}; overlays skipped`);
    }
  }

  for (const t of pickTicks(tValues, 8)) items.push(...xTickItems(area, xScale.toPx(t), fmtNumber(t)));
  for (const l of pickTicks(lValues, 10)) items.push(...yTickItems(area, yScale.toPx(l), fmtNumber(l)));
  items.push(...frameItems(area, `mean relative residual energy, N=${n}`, "t (epochs)", "L (layers)"));

  // colorbar for the fixed log10 color domain [-16, 0]
  const barX = area.x0 + area.w + 18;
  const barW = 14;
  const steps = 64;
  for (let i = 0; i < steps; i++) {
    const y1 = area.y0 + (area.h * (steps - 1 - i)) / steps;
    items.push({
      kind: "rect",
      x: barX,
      y: y1,
      w: barW,
      h: area.h / steps + 0.5,
      fill: viridis((i + 0.5) / steps),
    });
  }
  for (const exponent of [0, -4, -8, -12, -16]) {
    const py = area.y0 + area.h * (-exponent / 16);
    items.push({
      kind: "text",
      x: barX + barW + 4,
      y: py + 4,
      text: `1e${exponent}`,
      size: 9,
      color: BLACK,
      anchor: "start",
    });
  }

  return { scene: { width: WIDTH, height: HEIGHT, background: WHITE, items }, warnings, meta };
}

// ---------------------------------------------------------------------------
// convergence (E vs t, colored by mu; --semilog for log E)

export function buildConvergence(heatmap: Table, options: PlotOptions): BuildResult {
  requireColumns(heatmap, ["N", "L", "t", "mean_E", "mu"]);
  const warnings: string[] = [];
  const meta: Record<string, number> = {};
  const n = pickN(heatmap, options.n, warnings);
  const rows = heatmap.rows.filter((r) => num(r, "N") === n);
  const lValues = uniqueSorted(rows.map((r) => num(r, "L")));

  const series = lValues.map((l) => {
    const mine = rows
      .filter((r) => num(r, "L") === l)
      .sort((a, b) => num(a, "t") - num(b, "t"));
    return { l, mu: num(mine[0], "mu"), points: mine.map((r) => [num(r, "t"), num(r, "mean_E")]) };
  });

  const tMax = Math.max(...series.flatMap((s) => s.points.map((p) => p[0])));
  const eMaxRaw = Math.max(...series.flatMap((s) => s.points.map((p) => p[1])));
  const area = plotArea();
  const xScale = linearScale([0, tMax], [area.x0, area.x0 + area.w]);

  let yScale: Scale;
  let yTicks: number[];
  if (options.semilog) {
    const eMax = Math.pow(10, Math.ceil(Math.log10(Math.max(eMaxRaw, LOG_FLOOR))));
    yScale = log10Scale([LOG_FLOOR, eMax], [area.y0 + area.h, area.y0]);
    yTicks = decadeTicks(LOG_FLOOR, eMax, 9);
  } else {
    const top = eMaxRaw * 1.05;
    yScale = linearScale([0, top], [area.y0 + area.h, area.y0]);
    yTicks = [0, top / 4, top / 2, (3 * top) / 4, top];
  }

  const items: SceneItem[] = [];
  const closest = series.reduce((best, s) =>
    Math.abs(s.mu - 1) < Math.abs(best.mu - 1) ? s : best,
  );
  const styled = series.map((s) => {
    const isClosest = s === closest;
    const color: Color = isClosest ? GRAY : s.mu < 1 ? BLUE : RED;
    const dash: [number, number] | undefined = !isClosest && s.mu > 1 ? [6, 4] : undefined;
    const width = isClosest ? 3 : 1.5;
    return { s, color, dash, width, isClosest };
  });
  // draw the emphasized mu ~ 1 curve last so it stays visible
  styled.sort((a, b) => Number(a.isClosest) - Number(b.isClosest));
  for (const { s, color, dash, width } of styled) {
    const points: [number, number][] = s.points.map(([t, e]) => [
      xScale.toPx(t),
      yScale.toPx(options.semilog ? flooredForLog(e, warnings, "convergence mean_E") : e),
    ]);
    items.push({ kind: "polyline", points, color, width, dash });
    if (s === closest) meta.closest_mu_l = s.l;
  }

  for (const t of pickTicks([...Array(11).keys()].map((i) => Math.round((tMax * i) / 10)), 8)) {
    items.push(...xTickItems(area, xScale.toPx(t), fmtNumber(t)));
  }
  for (const tick of yTicks) {
    items.push(...yTickItems(area, yScale.toPx(tick), fmtNumber(tick)));
  }
  const yName = options.semilog ? "mean E (log)" : "mean E";
  items.push(...frameItems(area, `convergence, N=${n}`, "t (epochs)", yName));

  const legendX = area.x0 + area.w - 8;
  const legend: [string, Color][] = [
    ["mu<1 solid blue", BLUE],
    ["mu>1 dashed red", RED],
    [`mu~1 gray (L=${closest.l})`, GRAY],
  ];
  legend.forEach(([label, color], i) => {
    items.push({
      kind: "text",
      x: legendX,
      y: area.y0 + 16 + 14 * i,
      text: label,
      size: 10,
      color,
      anchor: "end",
    });
  });

  return { scene: { width: WIDTH, height: HEIGHT, background: WHITE, items }, warnings, meta };
}

// ---------------------------------------------------------------------------
// per-N line figures: rank, variance, frame

interface LineFigureSpec {
  table: Table;
  yColumn: string;
  title: string;
  yLabel: string;
  logY: boolean;
  markers: boolean;
}

function buildPerNLines(spec: LineFigureSpec, options: PlotOptions): BuildResult {
  requireColumns(spec.table, ["N", "L", spec.yColumn]);
  const warnings: string[] = [];
  const meta: Record<string, number> = {};
  let nValues = uniqueSorted(spec.table.rows.map((r) => num(r, "N")));
  if (options.n !== undefined) {
    if (!nValues.includes(options.n)) {
      throw new Error(`N=${options.n} not present in ${spec.table.name} (have: ${nValues.join(", ")})`);
    }
    nValues = [options.n];
  }
  if (nValues.length === 0) throw new Error(`${spec.table.name} has no data rows`);

  const area = plotArea();
  const lAll = uniqueSorted(spec.table.rows.map((r) => num(r, "L")));
  const xScale = linearScale([lAll[0], lAll[lAll.length - 1]], [area.x0, area.x0 + area.w]);

  const rawValues = spec.table.rows
    .filter((r) => options.n === undefined || num(r, "N") === options.n)
    .map((r) => num(r, spec.yColumn));
  let yScale: Scale;
  let yTicks: number[];
  if (spec.logY) {
    const positive = rawValues.filter((v) => v >= LOG_FLOOR);
    const lo = positive.length ? Math.pow(10, Math.floor(Math.log10(Math.min(...positive)))) : LOG_FLOOR;
    const hi = Math.pow(10, Math.ceil(Math.log10(Math.max(...positive, LOG_FLOOR * 10))));
    yScale = log10Scale([lo, hi], [area.y0 + area.h, area.y0]);
    yTicks = decadeTicks(lo, hi, 8);
  } else {
    const hi = Math.max(...rawValues) * 1.08;
    const lo = Math.min(0, Math.min(...rawValues) * 1.08);
    yScale = linearScale([lo, hi], [area.y0 + area.h, area.y0]);
    yTicks = [lo, lo + (hi - lo) / 4, lo + (hi - lo) / 2, lo + (3 * (hi - lo)) / 4, hi];
  }

  const items: SceneItem[] = [];
  nValues.forEach((n, index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const mine = spec.table.rows
      .filter((r) => num(r, "N") === n)
      .sort((a, b) => num(a, "L") - num(b, "L"));
    const points: [number, number][] = mine.map((r) => {
      let value = num(r, spec.yColumn);
      if (spec.logY) value = flooredForLog(value, warnings, `${spec.table.name} ${spec.yColumn}`);
      return [xScale.toPx(num(r, "L")), yScale.toPx(value)];
    });
    items.push({ kind: "polyline", points, color, width: 1.5 });
    if (spec.markers) {
      for (const [px, py] of points) {
        items.push({ kind: "rect", x: px - 2, y: py - 2, w: 4, h: 4, fill: color });
      }
    }
    items.push({
      kind: "text",
      x: area.x0 + area.w - 8,
      y: area.y0 + 16 + 14 * index,
      text: `N=${n}`,
      size: 10,
      color,
      anchor: "end",
    });
  });

  for (const l of pickTicks(lAll, 10)) items.push(...xTickItems(area, xScale.toPx(l), fmtNumber(l)));
  for (const tick of yTicks) items.push(...yTickItems(area, yScale.toPx(tick), fmtNumber(tick)));
  items.push(...frameItems(area, spec.title, "L (layers)", spec.yLabel));
  return { scene: { width: WIDTH, height: HEIGHT, background: WHITE, items }, warnings, meta };
}

export function buildRank(table: Table, options: PlotOptions): BuildResult {
  return buildPerNLines(
    { table, yColumn: "rank", title: "max QFIM rank vs L", yLabel: "rank", logY: false, markers: true },
    options,
  );
}

export function buildVariance(table: Table, options: PlotOptions): BuildResult {
  return buildPerNLines(
    {
      table,
      yColumn: "variance",
      title: "gradient variance vs L",
      yLabel: "Var(dE/d0) (log)",
      logY: true,
      markers: true,
    },
    options,
  );
}

export function buildFrame(table: Table, options: PlotOptions): BuildResult {
  return buildPerNLines(
    {
      table,
      yColumn: "f2_normalized",
      title: "frame potential vs L",
      yLabel: options.semilog ? "(F2-Haar)/Haar (log)" : "(F2-Haar)/Haar",
      logY: Boolean(options.semilog),
      markers: true,
    },
    options,
  );
}

// ---------------------------------------------------------------------------
// slice: mean final E vs L per N, with threshold markers

export function buildSlice(
  heatmap: Table,
  thresholds: Table | null,
  options: PlotOptions,
): BuildResult {
  requireColumns(heatmap, ["N", "L", "t", "mean_E"]);
  const warnings: string[] = [];
  const meta: Record<string, number> = {};
  let nValues = uniqueSorted(heatmap.rows.map((r) => num(r, "N")));
  if (options.n !== undefined) nValues = nValues.filter((n) => n === options.n);
  if (nValues.length === 0) throw new Error(`no matching N in ${heatmap.name}`);

  // final-epoch value per (N, L)
  const finals = new Map<number, [number, number][]>();
  for (const n of nValues) {
    const mine = heatmap.rows.filter((r) => num(r, "N") === n);
    const lValues = uniqueSorted(mine.map((r) => num(r, "L")));
    const points: [number, number][] = lValues.map((l) => {
      const cell = mine.filter((r) => num(r, "L") === l);
      const last = cell.reduce((a, b) => (num(a, "t") >= num(b, "t") ? a : b));
      return [l, num(last, "mean_E")];
    });
    finals.set(n, points);
  }

  const area = plotArea();
  const lAll = uniqueSorted([...finals.values()].flatMap((pts) => pts.map((p) => p[0])));
  const xScale = linearScale([lAll[0], lAll[lAll.length - 1]], [area.x0, area.x0 + area.w]);
  const values = [...finals.values()].flatMap((pts) => pts.map((p) => p[1]));
  const positive = values.filter((v) => v >= LOG_FLOOR);
  const lo = positive.length ? Math.pow(10, Math.floor(Math.log10(Math.min(...positive)))) : LOG_FLOOR;
  const hi = Math.pow(10, Math.ceil(Math.log10(Math.max(...positive, LOG_FLOOR * 10))));
  const yScale = log10Scale([lo, hi], [area.y0 + area.h, area.y0]);

  const items: SceneItem[] = [];
  if (thresholds !== null) requireColumns(thresholds, ["N", "L_bp", "L_op"]);
  nValues.forEach((n, index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const points = finals.get(n)!;
    const pixels: [number, number][] = points.map(([l, e]) => [
      xScale.toPx(l),
      yScale.toPx(flooredForLog(e, warnings, "slice mean_E")),
    ]);
    items.push({ kind: "polyline", points: pixels, color, width: 1.5 });
    for (const [px, py] of pixels) items.push({ kind: "rect", x: px - 2, y: py - 2, w: 4, h: 4, fill: color });
    items.push({
      kind: "text",
      x: area.x0 + area.w - 8,
      y: area.y0 + 16 + 14 * index,
      text: `N=${n}`,
      size: 10,
      color,
      anchor: "end",
    });

    const row = thresholds?.rows.find((r) => num(r, "N") === n);
    if (!row) return;
    const markers: [string, string][] = [
      ["L_bp", "cross"],
      ["L_op", "square"],
    ];
    for (const [column, shape] of markers) {
      if (row[column] === "") continue;
      const lValue = num(row, column);
      const px = xScale.toPx(lValue);
      // anchor the marker on the curve at the nearest scanned L
      const nearest = points.reduce((a, b) =>
        Math.abs(a[0] - lValue) <= Math.abs(b[0] - lValue) ? a : b,
      );
      const py = yScale.toPx(flooredForLog(nearest[1], warnings, "slice mean_E"));
      meta[`marker_${column}_n${n}_x`] = px;
      if (shape === "cross") {
        items.push({ kind: "line", x1: px - 5, y1: py - 5, x2: px + 5, y2: py + 5, color: BLACK, width: 2 });
        items.push({ kind: "line", x1: px - 5, y1: py + 5, x2: px + 5, y2: py - 5, color: BLACK, width: 2 });
      } else {
        items.push({ kind: "line", x1: px - 5, y1: py - 5, x2: px + 5, y2: py - 5, color, width: 2 });
        items.push({ kind: "line", x1: px + 5, y1: py - 5, x2: px + 5, y2: py + 5, color, width: 2 });
        items.push({ kind: "line", x1: px + 5, y1: py + 5, x2: px - 5, y2: py + 5, color, width: 2 });
        items.push({ kind: "line", x1: px - 5, y1: py + 5, x2: px - 5, y2: py - 5, color, width: 2 });
      }
    }
  });

  for (const l of pickTicks(lAll, 10)) items.push(...xTickItems(area, xScale.toPx(l), fmtNumber(l)));
  for (const tick of decadeTicks(lo, hi, 8)) items.push(...yTickItems(area, yScale.toPx(tick), fmtNumber(tick)));
  items.push(
    ...frameItems(area, "mean final E vs L (x: BP, square: OP)", "L (layers)", "mean final E (log)"),
  );
  return { scene: { width: WIDTH, height: HEIGHT, background: WHITE, items }, warnings, meta };
}

// ---------------------------------------------------------------------------
// entry point

function tableOrNull(dir: string, file: string): Table | null {
  const path = join(dir, file);
  return existsSync(path) ? readTable(path) : null;
}

function requiredTable(dir: string, file: string): Table {
  const table = tableOrNull(dir, file);
  if (table === null) {
    throw new Error(`${file} not found in ${dir}`);
  }
  return table;
}

export function buildFigure(kind: PlotKind, inDir: string, options: PlotOptions): BuildResult {
  switch (kind) {
    case "heatmap":
      return buildHeatmap(
        requiredTable(inDir, "heatmap.csv"),
        tableOrNull(inDir, "thresholds.csv"),
        options,
      );
    case "convergence":
      return buildConvergence(requiredTable(inDir, "heatmap.csv"), options);
    case "rank":
      return buildRank(requiredTable(inDir, "qfim_rank.csv"), options);
    case "variance":
      return buildVariance(requiredTable(inDir, "grad_variance.csv"), options);
    case "frame":
      return buildFrame(requiredTable(inDir, "frame_potential.csv"), options);
    case "slice":
      return buildSlice(
        requiredTable(inDir, "heatmap.csv"),
        tableOrNull(inDir, "thresholds.csv"),
        options,
      );
  }
}
