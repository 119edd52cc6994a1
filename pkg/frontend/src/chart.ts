/**
 * Chart assembly: linear scales, ticks, axes, legends, line and grouped-bar
 * layouts. Everything is deterministic in its inputs.
 */

import { PolylineItem, Scene, SceneItem, TextItem, seriesColor } from "./scene.js";

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

const DEFAULT_MARGINS: Margins = { top: 34, right: 16, bottom: 52, left: 64 };
const WIDTH = 720;
const HEIGHT = 440;
const FONT = 12;

export interface Series {
  label: string;
  points: [number, number][]; // data coordinates, x ascending
}

export interface BarGroup {
  label: string;
  values: (number | null)[]; // one entry per series
}

export function niceTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) {
    // Degenerate span: fabricate a small symmetric window around the value.
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.1 : 1;
    lo -= pad;
    hi += pad;
  }
  const rawStep = (hi - lo) / target;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = power;
  for (const mult of [1, 2, 2.5, 5, 10]) {
    if (power * mult >= rawStep) {
      step = power * mult;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : Number(v.toPrecision(12)));
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  if (Math.abs(v) >= 10000 || Math.abs(v) < 0.001) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  footer: string;
}

class Frame {
  items: SceneItem[] = [];
  constructor(
    readonly margins: Margins,
    readonly xLo: number,
    readonly xHi: number,
    readonly yLo: number,
    readonly yHi: number,
  ) {}

  sx(x: number): number {
    return this.margins.left + ((x - this.xLo) / (this.xHi - this.xLo)) * (WIDTH - this.margins.left - this.margins.right);
  }

  sy(y: number): number {
    return HEIGHT - this.margins.bottom - ((y - this.yLo) / (this.yHi - this.yLo)) * (HEIGHT - this.margins.top - this.margins.bottom);
  }
}

function pad(lo: number, hi: number): [number, number] {
  if (hi === lo) {
    const eps = lo === 0 ? 1 : Math.abs(lo) * 0.05;
    return [lo - eps, hi + eps];
  }
  const space = (hi - lo) * 0.05;
  return [lo - space, hi + space];
}

function text(x: number, y: number, s: string, anchor: TextItem["anchor"], size = FONT, fill = "#222222"): TextItem {
  return { kind: "text", x, y, text: s, size, fill, anchor };
}

function chrome(frame: Frame, spec: ChartSpec, xTicks: number[], yTicks: number[], xTickLabels?: string[]): void {
  const m = frame.margins;
  const axisColor = "#444444";
  // Axis lines.
  frame.items.push({
    kind: "polyline",
    points: [
      [m.left, m.top],
      [m.left, HEIGHT - m.bottom],
      [WIDTH - m.right, HEIGHT - m.bottom],
    ],
    stroke: axisColor,
    strokeWidth: 1,
  });
  xTicks.forEach((v, i) => {
    const x = frame.sx(v);
    frame.items.push({
      kind: "polyline",
      points: [
        [x, HEIGHT - m.bottom],
        [x, HEIGHT - m.bottom + 4],
      ],
      stroke: axisColor,
      strokeWidth: 1,
    });
    frame.items.push(text(x, HEIGHT - m.bottom + 17, xTickLabels ? xTickLabels[i] : formatTick(v), "middle"));
  });
  for (const v of yTicks) {
    const y = frame.sy(v);
    frame.items.push({
      kind: "polyline",
      points: [
        [m.left - 4, y],
        [m.left, y],
      ],
      stroke: axisColor,
      strokeWidth: 1,
    });
    frame.items.push(text(m.left - 7, y + 4, formatTick(v), "end"));
    frame.items.push({
      kind: "polyline",
      points: [
        [m.left, y],
        [WIDTH - m.right, y],
      ],
      stroke: "#dddddd",
      strokeWidth: 0.5,
    });
  }
  frame.items.push(text(WIDTH / 2, 20, spec.title, "middle", 14));
  frame.items.push(text(WIDTH / 2, HEIGHT - m.bottom + 36, spec.xLabel, "middle"));
  frame.items.push(text(14, m.top - 10, spec.yLabel, "start"));
  frame.items.push(text(WIDTH - m.right, HEIGHT - 6, spec.footer, "end", 10, "#666666"));
}

function legend(frame: Frame, labels: string[]): void {
  const m = frame.margins;
  let y = m.top + 14;
  labels.forEach((label, i) => {
    frame.items.push({
      kind: "polyline",
      points: [
        [WIDTH - m.right - 150, y - 4],
        [WIDTH - m.right - 126, y - 4],
      ],
      stroke: seriesColor(i),
      strokeWidth: 3,
    });
    frame.items.push(text(WIDTH - m.right - 120, y, label, "start", 11));
    y += 16;
  });
}

export function lineChart(seriesList: Series[], spec: ChartSpec): Scene {
  const xs = seriesList.flatMap((s) => s.points.map((p) => p[0]));
  const ys = seriesList.flatMap((s) => s.points.map((p) => p[1]));
  const [xLo, xHi] = pad(Math.min(...xs), Math.max(...xs));
  const [yLo, yHi] = pad(Math.min(...ys, 0), Math.max(...ys));
  const frame = new Frame(DEFAULT_MARGINS, xLo, xHi, yLo, yHi);
  chrome(frame, spec, niceTicks(xLo, xHi), niceTicks(yLo, yHi));
  seriesList.forEach((series, i) => {
    const line: PolylineItem = {
      kind: "polyline",
      points: series.points.map(([x, y]) => [frame.sx(x), frame.sy(y)]),
      stroke: seriesColor(i),
      strokeWidth: 1.8,
    };
    frame.items.push(line);
  });
  legend(frame, seriesList.map((s) => s.label));
  return { width: WIDTH, height: HEIGHT, background: "#ffffff", items: frame.items };
}

export function groupedBarChart(groups: BarGroup[], seriesLabels: string[], spec: ChartSpec): Scene {
  const values = groups.flatMap((g) => g.values.filter((v): v is number => v !== null));
  const [yLo, yHi] = pad(Math.min(...values, 0), Math.max(...values, 0));
  const frame = new Frame(DEFAULT_MARGINS, 0, groups.length, yLo, yHi);
  const centers = groups.map((_, i) => i + 0.5);
  chrome(frame, spec, centers, niceTicks(yLo, yHi), groups.map((g) => g.label));
  const slot = 1 / (seriesLabels.length + 1);
  const barWidth = slot * 0.85;
  groups.forEach((group, gi) => {
    group.values.forEach((value, si) => {
      if (value === null) return;
      const xCenter = gi + slot * (si + 1);
      const x0 = frame.sx(xCenter - barWidth / 2);
      const x1 = frame.sx(xCenter + barWidth / 2);
      const y0 = frame.sy(Math.max(0, value));
      const y1 = frame.sy(Math.min(0, value));
      frame.items.push({
        kind: "rect",
        x: x0,
        y: y0,
        width: x1 - x0,
        height: Math.max(y1 - y0, 0.5),
        fill: seriesColor(si),
      });
    });
  });
  legend(frame, seriesLabels);
  return { width: WIDTH, height: HEIGHT, background: "#ffffff", items: frame.items };
}
