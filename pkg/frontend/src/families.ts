/**
 * The five figure families. Each one selects and groups rows from the
 * experiment CSVs and compiles a chart scene; the caller picks the backend.
 */

import {
  CsvFormatError,
  CsvTable,
  RowFilter,
  SUMMARY_COLUMNS,
  TRACE_COLUMNS,
  applyFilter,
  combinedHash,
  num,
  readTables,
} from "./csv.js";
import { BarGroup, Series, groupedBarChart, lineChart } from "./chart.js";
import { Scene } from "./scene.js";

export const FAMILIES = [
  "reward-vs-lambda",
  "reward-vs-alpha-bias",
  "regret-vs-t",
  "rli-bars",
  "esi-bars",
] as const;

export type Family = (typeof FAMILIES)[number];

function describeFilter(filter: RowFilter): string {
  const parts = Object.entries(filter).map(([k, v]) => `${k}=${v}`);
  return parts.length ? parts.join(",") : "(no filter)";
}

function selectRows(tables: CsvTable[], filter: RowFilter): { row: Record<string, string>; path: string }[] {
  const out: { row: Record<string, string>; path: string }[] = [];
  for (const table of tables) {
    for (const row of applyFilter(table.rows, filter)) {
      out.push({ row, path: table.path });
    }
  }
  if (out.length === 0) {
    throw new CsvFormatError(`no rows left after filter ${describeFilter(filter)}`);
  }
  return out;
}

function policyLabel(row: Record<string, string>): string {
  return row.controller === "qr-mab" ? row.policy : `${row.controller}(${row.policy})`;
}

function groupSeries(
  selected: { row: Record<string, string>; path: string }[],
  keyOf: (row: Record<string, string>) => string,
  xColumn: string,
  yColumn: string,
): Series[] {
  const buckets = new Map<string, [number, number][]>();
  for (const { row, path } of selected) {
    const key = keyOf(row);
    if (!buckets.has(key)) buckets.set(key, []);
    buckets.get(key)!.push([num(row, xColumn, path), num(row, yColumn, path)]);
  }
  return [...buckets.entries()].map(([label, points]) => ({
    label,
    points: points.sort((a, b) => a[0] - b[0]),
  }));
}

function rewardVsLambda(tables: CsvTable[], filter: RowFilter, footer: string): Scene {
  const selected = selectRows(tables, filter);
  const series = groupSeries(
    selected,
    (row) => `${policyLabel(row)} mu=${row.mu}`,
    "lambda",
    "reward_mean",
  );
  return lineChart(series, {
    title: "Total reward vs admission rate",
    xLabel: "lambda",
    yLabel: "total reward",
    footer,
  });
}

function rewardVsAlphaBias(tables: CsvTable[], filter: RowFilter, footer: string): Scene {
  const selected = selectRows(tables, filter).filter(({ row }) => row.alpha !== "");
  if (selected.length === 0) {
    throw new CsvFormatError(
      `no delta-uniform rows (alpha column empty) after filter ${describeFilter(filter)}`,
    );
  }
  const series = groupSeries(selected, (row) => `bias=${row.bias_fraction}`, "alpha", "reward_mean");
  return lineChart(series, {
    title: "Total reward vs mixture weight",
    xLabel: "alpha",
    yLabel: "total reward",
    footer,
  });
}

function regretVsT(tables: CsvTable[], filter: RowFilter, footer: string): Scene {
  const selected = selectRows(tables, filter);
  // Average the per-replication trajectories within each policy group.
  const sums = new Map<string, Map<number, { total: number; n: number }>>();
  for (const { row, path } of selected) {
    const key = policyLabel(row);
    const slot = num(row, "slot", path);
    const regret = num(row, "regret", path);
    if (!sums.has(key)) sums.set(key, new Map());
    const bySlot = sums.get(key)!;
    const cell = bySlot.get(slot) ?? { total: 0, n: 0 };
    cell.total += regret;
    cell.n += 1;
    bySlot.set(slot, cell);
  }
  const series: Series[] = [...sums.entries()].map(([label, bySlot]) => ({
    label,
    points: [...bySlot.entries()]
      .map(([slot, { total, n }]): [number, number] => [slot, total / n])
      .sort((a, b) => a[0] - b[0]),
  }));
  return lineChart(series, {
    title: "Cumulative pseudo-regret",
    xLabel: "slot",
    yLabel: "mean pseudo-regret",
    footer,
  });
}

function indicatorBars(tables: CsvTable[], filter: RowFilter, footer: string, column: "rli" | "esi"): Scene {
  const selected = selectRows(tables, filter);
  const groupKeys: string[] = [];
  const seriesKeys: string[] = [];
  const cells = new Map<string, number>();
  for (const { row, path } of selected) {
    const g = `(${row.lambda || "-"},${row.mu || "-"})`;
    const s = policyLabel(row);
    if (!groupKeys.includes(g)) groupKeys.push(g);
    if (!seriesKeys.includes(s)) seriesKeys.push(s);
    cells.set(`${g}|${s}`, num(row, column, path));
  }
  const groups: BarGroup[] = groupKeys.map((g) => ({
    label: g,
    values: seriesKeys.map((s) => cells.get(`${g}|${s}`) ?? null),
  }));
  const what = column === "rli" ? "Reward loss indicator" : "Energy saving indicator";
  return groupedBarChart(groups, seriesKeys, {
    title: `${what} by (lambda, mu)`,
    xLabel: "(lambda, mu)",
    yLabel: column,
    footer,
  });
}

export function renderFamily(family: Family, paths: string[], filter: RowFilter): Scene {
  const required = family === "regret-vs-t" ? TRACE_COLUMNS : SUMMARY_COLUMNS;
  const tables = readTables(paths, required);
  const footer = `config_hash: ${combinedHash(tables)}`;
  switch (family) {
    case "reward-vs-lambda":
      return rewardVsLambda(tables, filter, footer);
    case "reward-vs-alpha-bias":
      return rewardVsAlphaBias(tables, filter, footer);
    case "regret-vs-t":
      return regretVsT(tables, filter, footer);
    case "rli-bars":
      return indicatorBars(tables, filter, footer, "rli");
    case "esi-bars":
      return indicatorBars(tables, filter, footer, "esi");
  }
}
