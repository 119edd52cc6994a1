import { describe, expect, it } from "vitest";
import { CsvFormatError, SUMMARY_COLUMNS, applyFilter, combinedHash, parseCsvText, parseFilterArgs } from "../src/csv.js";

const HEADER = SUMMARY_COLUMNS.join(",");

function summaryCsv(rows: string[], hash = "abc123"): string {
  return [`# config_hash=${hash}`, HEADER, ...rows].join("\n") + "\n";
}

const ROW =
  "lifo,qr-mab,ucb,0.6,0.3,,,5000,500,3900.5,660.2,280.1,55.0,1500.2,3446.0,12.0,0.25,0.75,1500.0,1500.0,5500.0,0.0,0.012";

describe("parseCsvText", () => {
  it("extracts the config hash and rows", () => {
    const table = parseCsvText(summaryCsv([ROW]), "x.csv", SUMMARY_COLUMNS);
    expect(table.configHash).toBe("abc123");
    expect(table.rows).toHaveLength(1);
    expect(table.rows[0].policy).toBe("lifo");
    expect(table.rows[0].alpha).toBe("");
  });

  it("rejects a file without the hash comment", () => {
    expect(() => parseCsvText(HEADER + "\n" + ROW, "x.csv", SUMMARY_COLUMNS)).toThrow(CsvFormatError);
  });

  it("names a missing column", () => {
    const broken = ["# config_hash=ff", "policy,controller", "lifo,qr-mab"].join("\n");
    expect(() => parseCsvText(broken, "x.csv", SUMMARY_COLUMNS)).toThrow(/missing column 'algorithm'/);
  });

  it("handles quoted policy labels containing commas", () => {
    const quoted = ROW.replace("lifo", '"delta-uniform(alpha=0.5,bias=1)"');
    const table = parseCsvText(summaryCsv([quoted]), "x.csv", SUMMARY_COLUMNS);
    expect(table.rows[0].policy).toBe("delta-uniform(alpha=0.5,bias=1)");
  });
});

describe("filters", () => {
  it("keeps only literally matching rows", () => {
    const table = parseCsvText(summaryCsv([ROW, ROW.replace("0.6", "0.9")]), "x.csv", SUMMARY_COLUMNS);
    expect(applyFilter(table.rows, { lambda: "0.9" })).toHaveLength(1);
    expect(applyFilter(table.rows, { lambda: "0.7" })).toHaveLength(0);
  });

  it("parses key=value pairs", () => {
    expect(parseFilterArgs(["mu=0.3", "policy=lifo"])).toEqual({ mu: "0.3", policy: "lifo" });
    expect(() => parseFilterArgs(["oops"])).toThrow(CsvFormatError);
  });
});

describe("combinedHash", () => {
  it("joins unique hashes in order", () => {
    const a = parseCsvText(summaryCsv([ROW], "aaa"), "a.csv", SUMMARY_COLUMNS);
    const b = parseCsvText(summaryCsv([ROW], "bbb"), "b.csv", SUMMARY_COLUMNS);
    const a2 = parseCsvText(summaryCsv([ROW], "aaa"), "c.csv", SUMMARY_COLUMNS);
    expect(combinedHash([a, b, a2])).toBe("aaa,bbb");
  });
});
