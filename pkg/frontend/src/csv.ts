/**
 * Readers for the experiment CSV outputs.
 *
 * Both files start with a `# config_hash=<hex>` comment line, then a header
 * row. Summary files carry one row per grid point; trace files carry thinned
 * per-replication regret trajectories.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const SUMMARY_COLUMNS = [
  "policy", "controller", "algorithm", "lambda", "mu", "alpha",
  "bias_fraction", "T", "reps", "reward_mean", "reward_std", "regret_mean",
  "regret_std", "nobs_mean", "energy_mean", "energy_std", "rli", "esi",
  "alg_updates", "packet_touches", "queue_ops", "storage_integral",
  "wallclock_s",
] as const;

export const TRACE_COLUMNS = [
  "policy", "controller", "algorithm", "lambda", "mu", "alpha",
  "bias_fraction", "rep", "slot", "regret",
] as const;

export interface CsvTable {
  path: string;
  configHash: string;
  rows: Record<string, string>[];
}

export class CsvFormatError extends Error {}

export function parseCsvText(text: string, path: string, required: readonly string[]): CsvTable {
  const newline = text.indexOf("\n");
  const first = newline >= 0 ? text.slice(0, newline).trim() : text.trim();
  const match = first.match(/^# config_hash=([0-9a-f]+)$/);
  if (!match) {
    throw new CsvFormatError(`${path}: missing '# config_hash=...' header line`);
  }
  const body = text.slice(newline + 1);
  const parsed = Papa.parse<Record<string, string>>(body, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new CsvFormatError(`${path}: ${e.message} (row ${e.row})`);
  }
  const have = new Set(parsed.meta.fields ?? []);
  for (const column of required) {
    if (!have.has(column)) {
      throw new CsvFormatError(`${path}: missing column '${column}'`);
    }
  }
  return { path, configHash: match[1], rows: parsed.data };
}

export function readTables(paths: string[], required: readonly string[]): CsvTable[] {
  if (paths.length === 0) {
    throw new CsvFormatError("no input CSV files given");
  }
  return paths.map((p) => parseCsvText(readFileSync(p, "utf-8"), p, required));
}

/** Unique config hashes across inputs, in first-seen order. */
export function combinedHash(tables: CsvTable[]): string {
  const seen: string[] = [];
  for (const t of tables) {
    if (!seen.includes(t.configHash)) seen.push(t.configHash);
  }
  return seen.join(",");
}

export function num(row: Record<string, string>, column: string, path: string): number {
  const raw = row[column];
  if (raw === undefined || raw === "") {
    throw new CsvFormatError(`${path}: empty value in required column '${column}'`);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new CsvFormatError(`${path}: non-numeric value '${raw}' in column '${column}'`);
  }
  return value;
}

export type RowFilter = Record<string, string>;

/** Keep rows whose columns literally match every filter entry. */
export function applyFilter(rows: Record<string, string>[], filter: RowFilter): Record<string, string>[] {
  return rows.filter((row) => Object.entries(filter).every(([k, v]) => row[k] === v));
}

export function parseFilterArgs(pairs: string[]): RowFilter {
  const filter: RowFilter = {};
  for (const pair of pairs) {
    const eq = pair.indexOf("=");
    if (eq <= 0) {
      throw new CsvFormatError(`bad --filter '${pair}', expected key=value`);
    }
    filter[pair.slice(0, eq)] = pair.slice(eq + 1);
  }
  return filter;
}
