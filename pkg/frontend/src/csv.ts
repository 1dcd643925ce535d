/**
 * Minimal CSV reader for the harness export schema: comma-separated, first
 * line is the header, no quoting (the exporter never emits commas in values).
 */

import { readFileSync } from "fs";
import { basename } from "path";

export interface Table {
  /** file name used in error messages */
  name: string;
  header: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, name: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${name}: empty file`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    header.forEach((col, i) => {
      row[col] = cells[i] ?? "";
    });
    return row;
  });
  return { name, header, rows };
}

export function readTable(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"), basename(path));
}

/** Schema check: every figure names the columns it consumes up front. */
export function requireColumns(table: Table, columns: string[]): void {
  for (const column of columns) {
    if (!table.header.includes(column)) {
      throw new Error(
        `missing column '${column}' in ${table.name} (header has: ${table.header.join(", ")})`,
      );
    }
  }
}

export function num(row: Record<string, string>, column: string): number {
  return Number(row[column]);
}
