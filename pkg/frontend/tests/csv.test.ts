import { describe, expect, it } from "vitest";

import { parseCsv, requireColumns } from "../src/csv";

describe("csv parser", () => {
  it("parses header and rows", () => {
    const table = parseCsv("a,b\n1,2\n3,4\n", "demo.csv");
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([
      { a: "1", b: "2" },
      { a: "3", b: "4" },
    ]);
  });

  it("handles a header-only file", () => {
    const table = parseCsv("N,L,t\n", "empty.csv");
    expect(table.rows).toEqual([]);
  });

  it("rejects an empty file", () => {
    expect(() => parseCsv("", "none.csv")).toThrow(/empty file/);
  });

  it("names the missing column and the file in schema errors", () => {
    const table = parseCsv("N,L\n2,3\n", "heatmap.csv");
    expect(() => requireColumns(table, ["N", "mu"])).toThrow(
      /missing column 'mu' in heatmap\.csv/,
    );
  });
});
