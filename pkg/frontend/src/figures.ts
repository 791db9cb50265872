import { column, DataError, requireColumns, type Table } from "./csv.js";
import {
  extent,
  formatTick,
  linearScale,
  logScale,
  padded,
  type Scale,
} from "./scale.js";
import { circle, document, group, line, polyline, rect, text } from "./svg.js";

export const KINDS = ["fig2", "fig3", "converge"] as const;
export type FigureKind = (typeof KINDS)[number];

export interface FigureOptions {
  xLabel?: string;
  yLabel?: string;
  /** fig2 only: column whose distinct values split the rows into series. */
  seriesColumn?: string;
}

/** Columns each layout reads. Extra columns in the input are ignored. */
export const REQUIRED: Record<FigureKind, readonly string[]> = {
  fig2: ["Delta", "s", "F_analytic", "F_numeric"],
  fig3: ["ratio", "F_max", "p_bar_max_sigma", "beta"],
  converge: ["tau", "max_abs_deviation"],
};

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 28, right: 76, bottom: 58, left: 76 };
const FRAME = {
  x0: MARGIN.left,
  x1: WIDTH - MARGIN.right,
  y0: MARGIN.top,
  y1: HEIGHT - MARGIN.bottom,
};

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
const AXIS_COLOR = "#333333";
const GRID_COLOR = "#dddddd";
const TICK_FONT = { "font-size": "11", fill: AXIS_COLOR };
const LABEL_FONT = { "font-size": "13", fill: AXIS_COLOR };

function seriesColor(i: number): string {
  return PALETTE[i % PALETTE.length] as string;
}

function gridLines(yScale: Scale): string[] {
  return yScale.ticks.map((t) => {
    const y = yScale.map(t);
    return line(FRAME.x0, y, FRAME.x1, y, { stroke: GRID_COLOR, "stroke-width": "1" });
  });
}

function xAxis(scale: Scale, label: string): string[] {
  const parts = [
    line(FRAME.x0, FRAME.y1, FRAME.x1, FRAME.y1, { stroke: AXIS_COLOR, "stroke-width": "1" }),
  ];
  for (const t of scale.ticks) {
    const x = scale.map(t);
    parts.push(line(x, FRAME.y1, x, FRAME.y1 + 5, { stroke: AXIS_COLOR, "stroke-width": "1" }));
    parts.push(text(x, FRAME.y1 + 19, formatTick(t), { "text-anchor": "middle", ...TICK_FONT }));
  }
  parts.push(
    text((FRAME.x0 + FRAME.x1) / 2, FRAME.y1 + 42, label, {
      "text-anchor": "middle",
      ...LABEL_FONT,
    }),
  );
  return parts;
}

function yAxis(scale: Scale, label: string, side: "left" | "right", color = AXIS_COLOR): string[] {
  const x = side === "left" ? FRAME.x0 : FRAME.x1;
  const dir = side === "left" ? -1 : 1;
  const parts = [line(x, FRAME.y0, x, FRAME.y1, { stroke: color, "stroke-width": "1" })];
  for (const t of scale.ticks) {
    const y = scale.map(t);
    parts.push(line(x, y, x + dir * 5, y, { stroke: color, "stroke-width": "1" }));
    parts.push(
      text(x + dir * 9, y + 4, formatTick(t), {
        "text-anchor": side === "left" ? "end" : "start",
        "font-size": "11",
        fill: color,
      }),
    );
  }
  const lx = side === "left" ? 20 : WIDTH - 16;
  const ly = (FRAME.y0 + FRAME.y1) / 2;
  parts.push(
    text(lx, ly, label, {
      "text-anchor": "middle",
      "font-size": "13",
      fill: color,
      transform: `rotate(${side === "left" ? -90 : 90} ${lx} ${ly})`,
    }),
  );
  return parts;
}

interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
}

function legend(entries: readonly LegendEntry[], corner: "top-left" | "bottom-left"): string[] {
  const rowH = 18;
  const x = FRAME.x0 + 14;
  const yTop = corner === "top-left" ? FRAME.y0 + 14 : FRAME.y1 - 14 - (entries.length - 1) * rowH;
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const y = yTop + i * rowH;
    const attrs: Record<string, string | number> = { stroke: e.color, "stroke-width": "1.8" };
    if (e.dash) attrs["stroke-dasharray"] = e.dash;
    parts.push(line(x, y, x + 24, y, attrs));
    parts.push(text(x + 30, y + 4, e.label, { "font-size": "12", fill: AXIS_COLOR }));
  });
  return parts;
}

function assemble(children: readonly string[]): string {
  const body = group({ "font-family": "DejaVu Sans, sans-serif" }, children);
  return document(WIDTH, HEIGHT, [
    rect(0, 0, WIDTH, HEIGHT, { fill: "#ffffff" }),
    body,
  ]);
}

function sortedBy<T>(items: readonly T[], key: (item: T) => number): T[] {
  return [...items].sort((a, b) => key(a) - key(b));
}

/** Pick log axes only when every value is strictly positive. */
function axisScale(values: number[], range: [number, number], preferLog: boolean): Scale {
  const [lo, hi] = extent(values);
  if (preferLog && lo > 0) return logScale([lo, hi], range);
  return linearScale(padded([lo, hi]), range);
}

/** One series per system width: the closed-form curve as a line and the grid
 *  computation as markers in the same color. */
export function fig2Svg(table: Table, opts: FigureOptions = {}): string {
  requireColumns(table, REQUIRED.fig2, "fig2");
  const seriesCol = opts.seriesColumn ?? "Delta";
  if (!table.columns.includes(seriesCol)) {
    throw new DataError(
      `series column "${seriesCol}" not in input (found: ${table.columns.join(", ")})`,
    );
  }

  const groups = new Map<number, Record<string, number>[]>();
  for (const row of table.rows) {
    const key = row[seriesCol] as number;
    const bucket = groups.get(key);
    if (bucket) bucket.push(row);
    else groups.set(key, [row]);
  }
  const keys = sortedBy([...groups.keys()], (k) => k);

  const xs = axisScale(column(table, "s"), [FRAME.x0, FRAME.x1], false);
  const fValues = [...column(table, "F_analytic"), ...column(table, "F_numeric")];
  const ys = axisScale(fValues, [FRAME.y1, FRAME.y0], false);

  const parts = [
    ...gridLines(ys),
    ...xAxis(xs, opts.xLabel ?? "combined spread s"),
    ...yAxis(ys, opts.yLabel ?? "channel fidelity F", "left"),
  ];
  const entries: LegendEntry[] = [];
  keys.forEach((key, i) => {
    const color = seriesColor(i);
    const rows = sortedBy(groups.get(key) as Record<string, number>[], (r) => r.s as number);
    const curve = rows.map(
      (r) => [xs.map(r.s as number), ys.map(r.F_analytic as number)] as const,
    );
    parts.push(polyline(curve, { stroke: color, "stroke-width": "1.8" }));
    for (const r of rows) {
      parts.push(
        circle(xs.map(r.s as number), ys.map(r.F_numeric as number), 3, { fill: color }),
      );
    }
    entries.push({ label: `${seriesCol === "Delta" ? "Δ" : seriesCol} = ${formatTick(key)}`, color });
  });
  parts.push(...legend(entries, "bottom-left"));
  return assemble(parts);
}

/** Best achievable fidelity and the matching token parameters against the
 *  width ratio, with the Gaussian baseline dashed and the momentum offset on
 *  a second axis. */
export function fig3Svg(table: Table, opts: FigureOptions = {}): string {
  requireColumns(table, REQUIRED.fig3, "fig3");
  const rows = sortedBy(table.rows, (r) => r.ratio as number);
  const ratios = rows.map((r) => r.ratio as number);

  const xs = axisScale(ratios, [FRAME.x0, FRAME.x1], true);
  const ysLeft = axisScale(
    [...rows.map((r) => r.F_max as number), ...rows.map((r) => r.beta as number)],
    [FRAME.y1, FRAME.y0],
    false,
  );
  const ysRight = axisScale(
    rows.map((r) => r.p_bar_max_sigma as number),
    [FRAME.y1, FRAME.y0],
    false,
  );

  const fColor = seriesColor(0);
  const pColor = seriesColor(1);
  const betaColor = "#555555";

  const fPts = rows.map((r) => [xs.map(r.ratio as number), ysLeft.map(r.F_max as number)] as const);
  const betaPts = rows.map((r) => [xs.map(r.ratio as number), ysLeft.map(r.beta as number)] as const);
  const pPts = rows.map(
    (r) => [xs.map(r.ratio as number), ysRight.map(r.p_bar_max_sigma as number)] as const,
  );

  const parts = [
    ...gridLines(ysLeft),
    ...xAxis(xs, opts.xLabel ?? "width ratio Δ/σ"),
    ...yAxis(ysLeft, opts.yLabel ?? "fidelity", "left"),
    ...yAxis(ysRight, "optimal momentum offset p̄σ", "right", pColor),
    polyline(betaPts, { stroke: betaColor, "stroke-width": "1.8", "stroke-dasharray": "6 4" }),
    polyline(fPts, { stroke: fColor, "stroke-width": "1.8" }),
    ...fPts.map(([x, y]) => circle(x, y, 2.5, { fill: fColor })),
    polyline(pPts, { stroke: pColor, "stroke-width": "1.8" }),
    ...pPts.map(([x, y]) => circle(x, y, 2.5, { fill: pColor })),
    ...legend(
      [
        { label: "F_max (superposition token)", color: fColor },
        { label: "β (Gaussian token)", color: betaColor, dash: "6 4" },
        { label: "p̄σ at the optimum (right axis)", color: pColor },
      ],
      "top-left",
    ),
  ];
  return assemble(parts);
}

/** Finite-window kernel deviation against the window half-width. */
export function convergeSvg(table: Table, opts: FigureOptions = {}): string {
  requireColumns(table, REQUIRED.converge, "converge");
  const rows = sortedBy(table.rows, (r) => r.tau as number);

  const xs = axisScale(rows.map((r) => r.tau as number), [FRAME.x0, FRAME.x1], true);
  const ys = axisScale(
    rows.map((r) => r.max_abs_deviation as number),
    [FRAME.y1, FRAME.y0],
    true,
  );

  const color = seriesColor(0);
  const pts = rows.map(
    (r) => [xs.map(r.tau as number), ys.map(r.max_abs_deviation as number)] as const,
  );
  const parts = [
    ...gridLines(ys),
    ...xAxis(xs, opts.xLabel ?? "window half-width τ"),
    ...yAxis(ys, opts.yLabel ?? "max kernel deviation", "left"),
    polyline(pts, { stroke: color, "stroke-width": "1.8" }),
    ...pts.map(([x, y]) => circle(x, y, 3, { fill: color })),
  ];
  return assemble(parts);
}

export function figureSvg(kind: FigureKind, table: Table, opts: FigureOptions = {}): string {
  switch (kind) {
    case "fig2":
      return fig2Svg(table, opts);
    case "fig3":
      return fig3Svg(table, opts);
    case "converge":
      return convergeSvg(table, opts);
  }
}
