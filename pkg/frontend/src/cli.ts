#!/usr/bin/env node
/**
 * figures <family> --in <csv...> --out <path> [--filter key=value ...]
 *                  [--format svg|png]
 *
 * Families: reward-vs-lambda | reward-vs-alpha-bias | regret-vs-t |
 *           rli-bars | esi-bars
 * The output format defaults to SVG; --format png switches to the bitmap
 * backend. Every image embeds the config hash(es) of its input CSVs.
 */

import { realpathSync, writeFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { CsvFormatError, parseFilterArgs } from "./csv.js";
import { FAMILIES, Family, renderFamily } from "./families.js";
import { sceneToPng } from "./png.js";
import { sceneToSvg } from "./svg.js";

export interface CliOptions {
  family: Family;
  inputs: string[];
  out: string;
  filter: Record<string, string>;
  format: "svg" | "png";
}

export class UsageError extends Error {}

export function parseArgs(argv: string[]): CliOptions {
  if (argv.length === 0) {
    throw new UsageError(`usage: figures <family> --in <csv...> --out <path> [--filter k=v ...] [--format svg|png]`);
  }
  const family = argv[0] as Family;
  if (!FAMILIES.includes(family)) {
    throw new UsageError(`unknown family '${argv[0]}', expected one of: ${FAMILIES.join(", ")}`);
  }
  const inputs: string[] = [];
  const filterPairs: string[] = [];
  let out = "";
  let format: "svg" | "png" = "svg";
  let i = 1;
  const takeValues = (dest: string[]) => {
    while (i < argv.length && !argv[i].startsWith("--")) {
      dest.push(argv[i]);
      i += 1;
    }
  };
  while (i < argv.length) {
    const flag = argv[i];
    i += 1;
    switch (flag) {
      case "--in":
        takeValues(inputs);
        break;
      case "--filter":
        takeValues(filterPairs);
        break;
      case "--out":
        out = argv[i] ?? "";
        i += 1;
        break;
      case "--format": {
        const value = argv[i] ?? "";
        i += 1;
        if (value !== "svg" && value !== "png") {
          throw new UsageError(`--format must be svg or png, got '${value}'`);
        }
        format = value;
        break;
      }
      default:
        throw new UsageError(`unknown flag '${flag}'`);
    }
  }
  if (inputs.length === 0) throw new UsageError("--in requires at least one CSV path");
  if (!out) throw new UsageError("--out is required");
  return { family, inputs, out, filter: parseFilterArgs(filterPairs), format };
}

export function run(argv: string[]): number {
  let options: CliOptions;
  try {
    options = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError || err instanceof CsvFormatError) {
      console.error(String(err.message));
      return 2;
    }
    throw err;
  }
  try {
    const scene = renderFamily(options.family, options.inputs, options.filter);
    if (options.format === "png") {
      writeFileSync(options.out, sceneToPng(scene));
    } else {
      writeFileSync(options.out, sceneToSvg(scene), "utf-8");
    }
    console.log(`wrote ${options.out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvFormatError) {
      console.error(String(err.message));
      return 1;
    }
    if (err instanceof Error && "code" in err) {
      console.error(String(err.message));
      return 1;
    }
    throw err;
  }
}

function invokedDirectly(): boolean {
  if (!process.argv[1]) return false;
  try {
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(run(process.argv.slice(2)));
}
