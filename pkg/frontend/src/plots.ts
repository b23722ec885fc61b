import { num, readTable, requireColumns, SchemaError, Table } from "./csv";
import { linearScale, logScale, Scale, tickLabel } from "./scale";
import { Svg } from "./svg";

export type FigureKind =
  | "convergence"
  | "condition-scaling"
  | "condition-variation"
  | "special-case";

export interface FigureSpec {
  kind: FigureKind;
  /** Input CSV paths; rows from all inputs are pooled before grouping. */
  inputs: string[];
  /** Reference slopes; defaults [2, 3] for convergence, [-3] for
   * condition-scaling (quadratic splines), none otherwise. */
  slopes?: number[];
  /** Error columns to plot for convergence figures. */
  metrics?: string[];
  title?: string;
}

export interface Series {
  label: string;
  /** Finite positive values, sorted by x. */
  points: { x: number; y: number }[];
  /** x positions whose value was inf; drawn as open markers pinned to the
   * top of the plot area. */
  clipped: number[];
  dashed: boolean;
}

const ERROR_METRICS = ["l2", "h1_semi", "energy"];
const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

function distinct(values: number[]): number[] {
  return [...new Set(values.filter((v) => !Number.isNaN(v)))];
}

// One point per x: the worst (largest) value over all rows at that x, so a
// sweep over boundary shifts collapses to its upper envelope. An inf at any
// shift pins the whole x to the clipped marker row.
function envelope(
  rows: Record<string, number | string>[],
  xcol: string,
  ycol: string,
): { points: { x: number; y: number }[]; clipped: number[] } {
  const xs = distinct(rows.map((r) => num(r, xcol)))
    .filter((v) => Number.isFinite(v))
    .sort((a, b) => a - b);
  const points: { x: number; y: number }[] = [];
  const clipped: number[] = [];
  for (const x of xs) {
    const vals = rows
      .filter((r) => num(r, xcol) === x)
      .map((r) => num(r, ycol))
      .filter((v) => !Number.isNaN(v));
    if (vals.length === 0) continue;
    const worst = Math.max(...vals);
    if (worst === Infinity) clipped.push(x);
    else if (worst > 0) points.push({ x, y: worst });
  }
  return { points, clipped };
}

export function convergenceSeries(
  tables: Table[],
  metrics: string[] = ERROR_METRICS,
): Series[] {
  for (const t of tables) requireColumns(t, ["h", "tau", ...metrics]);
  const rows = tables.flatMap((t) => t.rows);
  const taus = distinct(rows.map((r) => num(r, "tau"))).sort((a, b) => a - b);
  const out: Series[] = [];
  for (const tau of taus) {
    const sub = rows.filter((r) => num(r, "tau") === tau);
    for (const metric of metrics) {
      const { points, clipped } = envelope(sub, "h", metric);
      if (points.length + clipped.length < 2) {
        throw new SchemaError(
          `${tables.map((t) => t.path).join(", ")}: column "${metric}" has ` +
            `${points.length + clipped.length} usable h value(s), need at least 2`,
        );
      }
      const label = taus.length > 1 ? `${metric}, tau=${tau}` : metric;
      out.push({ label, points, clipped, dashed: false });
    }
  }
  return out;
}

export function conditionSeries(tables: Table[], kind: FigureKind): Series[] {
  const xcol =
    kind === "condition-scaling" ? "h" : kind === "condition-variation" ? "shift" : "delta";
  for (const t of tables) {
    requireColumns(t, [xcol, "tau", "c_alpha", "kappa", "kappa_jacobi"]);
  }
  const rows = tables.flatMap((t) => t.rows);
  // one curve pair per parameter combination that actually varies
  const taus = distinct(rows.map((r) => num(r, "tau"))).sort((a, b) => a - b);
  const alphas = distinct(rows.map((r) => num(r, "c_alpha"))).sort((a, b) => a - b);
  const byTau = taus.length > 1;
  const byAlpha = alphas.length > 1;
  const combos = (byTau ? taus : [NaN]).flatMap((tau) =>
    (byAlpha ? alphas : [NaN]).map((ca) => ({ tau, ca })),
  );
  const groups: { label: string; rows: typeof rows }[] = [];
  for (const { tau, ca } of combos) {
    const sub = rows.filter(
      (r) =>
        (!byTau || num(r, "tau") === tau) && (!byAlpha || num(r, "c_alpha") === ca),
    );
    if (sub.length === 0) continue;
    const parts: string[] = [];
    if (byTau) parts.push(`tau=${tau}`);
    if (byAlpha) parts.push(`c_alpha=${ca}`);
    groups.push({ label: parts.join(", ") || "kappa", rows: sub });
  }
  const out: Series[] = [];
  for (const g of groups) {
    const plain = envelope(g.rows, xcol, "kappa");
    const jacobi = envelope(g.rows, xcol, "kappa_jacobi");
    if (plain.points.length + plain.clipped.length === 0) {
      throw new SchemaError(
        `${tables.map((t) => t.path).join(", ")}: no usable kappa values`,
      );
    }
    out.push({ label: g.label, ...plain, dashed: false });
    if (jacobi.points.length + jacobi.clipped.length > 0) {
      const label = g.label === "kappa" ? "kappa (jacobi)" : `${g.label} (jacobi)`;
      out.push({ label, ...jacobi, dashed: true });
    }
  }
  return out;
}

interface RefTriangle {
  x0: number;
  x1: number;
  y0: number;
  slope: number;
}

interface RefLine {
  slope: number;
  /** y = scale * x^slope */
  scale: number;
}

const WIDTH = 640;
const HEIGHT = 460;
const MARGIN = { l: 64, r: 172, t: 30, b: 50 };

function dataExtent(series: Series[]): {
  xs: number[];
  yMin: number;
  yMax: number;
} {
  const xs = series.flatMap((s) => s.points.map((p) => p.x).concat(s.clipped));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  if (xs.length === 0) throw new SchemaError("nothing to plot");
  const yMin = ys.length ? Math.min(...ys) : 1;
  const yMax = ys.length ? Math.max(...ys) : 10;
  return { xs, yMin, yMax };
}

function padLog(lo: number, hi: number, f = 0.15): [number, number] {
  const pad = Math.pow(hi / lo, f) * 1.0 || 1.2;
  const g = Math.max(pad, 1.15);
  return [lo / g, hi * g];
}

function padLin(lo: number, hi: number, f = 0.06): [number, number] {
  const pad = (hi - lo || 1) * f;
  return [lo - pad, hi + pad];
}

export interface ChartOptions {
  series: Series[];
  xLog: boolean;
  xLabel: string;
  yLabel: string;
  title: string;
  triangles?: RefTriangle[];
  refLines?: RefLine[];
}

export function renderChart(opts: ChartOptions): string {
  const { xs, yMin, yMax } = dataExtent(opts.series);
  let yLo = yMin;
  let yHi = yMax;
  for (const t of opts.triangles ?? []) {
    const apex = t.y0 * Math.pow(t.x1 / t.x0, t.slope);
    yLo = Math.min(yLo, t.y0, apex);
    yHi = Math.max(yHi, t.y0, apex);
  }
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const xRange: [number, number] = [MARGIN.l, WIDTH - MARGIN.r];
  const yRange: [number, number] = [HEIGHT - MARGIN.b, MARGIN.t];
  const x = opts.xLog
    ? logScale(padLog(xLo, xHi, 0.08), xRange)
    : linearScale(padLin(xLo, xHi), xRange);
  const y = logScale(padLog(yLo, yHi), yRange);

  const svg = new Svg(WIDTH, HEIGHT);
  drawAxes(svg, x, y, opts.xLabel, opts.yLabel, opts.title);

  for (const line of opts.refLines ?? []) {
    drawRefLine(svg, x, y, line);
  }
  for (const t of opts.triangles ?? []) {
    drawTriangle(svg, x, y, t);
  }

  const hasClipped = opts.series.some((s) => s.clipped.length > 0);
  opts.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pix = s.points.map((p) => ({ x: x.map(p.x), y: y.map(p.y) }));
    if (pix.length > 1) {
      svg.polyline(pix, {
        stroke: color,
        "stroke-width": 1.5,
        ...(s.dashed ? { "stroke-dasharray": "6 4" } : {}),
      });
    }
    for (const p of pix) svg.circle(p.x, p.y, 3, { fill: color });
    for (const cx of s.clipped) clippedMarker(svg, x.map(cx), MARGIN.t, color);
  });

  drawLegend(svg, opts.series, hasClipped);
  return svg.render();
}

function drawAxes(
  svg: Svg,
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): void {
  const x0 = MARGIN.l;
  const x1 = WIDTH - MARGIN.r;
  const y0 = HEIGHT - MARGIN.b;
  const y1 = MARGIN.t;
  for (const t of x.ticks()) {
    const px = x.map(t);
    svg.line(px, y0, px, y1, { stroke: "#eee" });
    svg.line(px, y0, px, y0 + 4, { stroke: "#333" });
    svg.text(px, y0 + 17, tickLabel(t), { "text-anchor": "middle", fill: "#333" });
  }
  for (const t of y.ticks()) {
    const py = y.map(t);
    svg.line(x0, py, x1, py, { stroke: "#eee" });
    svg.line(x0 - 4, py, x0, py, { stroke: "#333" });
    svg.text(x0 - 7, py + 4, tickLabel(t), { "text-anchor": "end", fill: "#333" });
  }
  svg.line(x0, y0, x1, y0, { stroke: "#333" });
  svg.line(x0, y0, x0, y1, { stroke: "#333" });
  svg.line(x1, y0, x1, y1, { stroke: "#333" });
  svg.line(x0, y1, x1, y1, { stroke: "#333" });
  svg.text((x0 + x1) / 2, HEIGHT - 12, xLabel, { "text-anchor": "middle" });
  svg.text(14, (y0 + y1) / 2, yLabel, {
    "text-anchor": "middle",
    transform: `rotate(-90 14 ${(y0 + y1) / 2})`,
  });
  svg.text((x0 + x1) / 2, 18, title, { "text-anchor": "middle", "font-size": 14 });
}

function drawTriangle(svg: Svg, x: Scale, y: Scale, t: RefTriangle): void {
  const apexY = t.y0 * Math.pow(t.x1 / t.x0, t.slope);
  const pts = [
    { x: x.map(t.x0), y: y.map(t.y0) },
    { x: x.map(t.x1), y: y.map(t.y0) },
    { x: x.map(t.x1), y: y.map(apexY) },
  ];
  svg.polygon(pts, { fill: "none", stroke: "#888" });
  svg.text(x.map(t.x1) + 5, (y.map(t.y0) + y.map(apexY)) / 2 + 4, String(t.slope), {
    fill: "#555",
  });
  svg.text((x.map(t.x0) + x.map(t.x1)) / 2, y.map(t.y0) + 13, "1", {
    "text-anchor": "middle",
    fill: "#555",
  });
}

function drawRefLine(svg: Svg, x: Scale, y: Scale, line: RefLine): void {
  const [d0, d1] = x.domain;
  const pts = [
    { x: x.map(d0), y: y.map(line.scale * Math.pow(d0, line.slope)) },
    { x: x.map(d1), y: y.map(line.scale * Math.pow(d1, line.slope)) },
  ];
  svg.polyline(pts, { stroke: "#888", "stroke-dasharray": "2 3" });
  const mx = Math.sqrt(d0 * d1);
  svg.text(x.map(mx), y.map(line.scale * Math.pow(mx, line.slope)) - 8, `slope ${line.slope}`, {
    "text-anchor": "middle",
    fill: "#555",
  });
}

function clippedMarker(svg: Svg, px: number, py: number, color: string): void {
  svg.polygon(
    [
      { x: px, y: py - 5 },
      { x: px + 5, y: py + 4 },
      { x: px - 5, y: py + 4 },
    ],
    { fill: "white", stroke: color, class: "clipped" },
  );
}

function drawLegend(svg: Svg, series: Series[], hasClipped: boolean): void {
  const lx = WIDTH - MARGIN.r + 14;
  let ly = MARGIN.t + 8;
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    svg.line(lx, ly - 4, lx + 22, ly - 4, {
      stroke: color,
      "stroke-width": 1.5,
      ...(s.dashed ? { "stroke-dasharray": "6 4" } : {}),
    });
    svg.text(lx + 28, ly, s.label, { fill: "#333" });
    ly += 18;
  });
  if (hasClipped) {
    clippedMarker(svg, lx + 11, ly - 4, "#333");
    svg.text(lx + 28, ly, "inf (clipped)", { fill: "#333" });
  }
}

export function plotConvergence(tables: Table[], spec: FigureSpec): string {
  const series = convergenceSeries(tables, spec.metrics ?? ERROR_METRICS);
  const slopes = spec.slopes ?? [2, 3];
  const { xs, yMin } = dataExtent(series);
  const hs = distinct(xs).sort((a, b) => a - b);
  const x0 = hs[0];
  const x1 = hs.length > 1 ? hs[1] : hs[0] * 2;
  // stack the slope triangles under the data, steepest lowest
  const triangles: RefTriangle[] = slopes.map((slope, i) => {
    const apex = yMin / (2.5 * Math.pow(5, i));
    return { x0, x1, y0: apex / Math.pow(x1 / x0, slope), slope };
  });
  return renderChart({
    series,
    xLog: true,
    xLabel: "h",
    yLabel: "error",
    title: spec.title ?? "convergence",
    triangles,
  });
}

export function plotCondition(tables: Table[], spec: FigureSpec): string {
  const series = conditionSeries(tables, spec.kind);
  const xLog = spec.kind !== "condition-variation";
  const xLabel =
    spec.kind === "condition-scaling"
      ? "h"
      : spec.kind === "condition-variation"
        ? "shift s"
        : "delta";
  let refLines: RefLine[] | undefined;
  if (spec.kind === "condition-scaling") {
    const slopes = spec.slopes ?? [-3];
    const { xs, yMin, yMax } = dataExtent(series);
    const xg = Math.sqrt(Math.min(...xs) * Math.max(...xs));
    const yg = Math.sqrt(yMin * yMax);
    refLines = slopes.map((slope) => ({ slope, scale: yg / Math.pow(xg, slope) }));
  }
  return renderChart({
    series,
    xLog,
    xLabel,
    yLabel: "condition number",
    title: spec.title ?? spec.kind,
    refLines,
  });
}

export function renderFigure(spec: FigureSpec): string {
  if (spec.inputs.length === 0) throw new SchemaError("no input CSVs given");
  const tables = spec.inputs.map(readTable);
  if (spec.kind === "convergence") return plotConvergence(tables, spec);
  return plotCondition(tables, spec);
}
