import { readFileSync } from "fs";
import { parse } from "papaparse";

/** Raised when an input CSV is empty or lacks the columns a plot needs. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export type Cell = number | string;

export interface Table {
  path: string;
  columns: string[];
  rows: Record<string, Cell>[];
}

// The solver writes floats as %.12g with "inf"/"-inf"/"nan" tokens; label
// columns (e.g. "experiment") stay strings.
function coerce(raw: string): Cell {
  const s = raw.trim();
  if (s === "inf") return Infinity;
  if (s === "-inf") return -Infinity;
  if (s === "nan") return NaN;
  if (s === "") return NaN;
  const n = Number(s);
  return Number.isNaN(n) ? s : n;
}

export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`${path}: malformed CSV (${e.message}, row ${e.row})`);
  }
  const columns = parsed.meta.fields ?? [];
  if (columns.length === 0 || parsed.data.length === 0) {
    throw new SchemaError(`${path}: empty CSV, nothing to plot`);
  }
  const rows = parsed.data.map((raw) => {
    const row: Record<string, Cell> = {};
    for (const c of columns) row[c] = coerce(raw[c] ?? "");
    return row;
  });
  return { path, columns, rows };
}

export function requireColumns(table: Table, needed: string[]): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${table.path}: missing column(s) ${missing.join(", ")} ` +
        `(have: ${table.columns.join(", ")})`,
    );
  }
}

/** Numeric cell access; label columns come back as NaN. */
export function num(row: Record<string, Cell>, column: string): number {
  const v = row[column];
  return typeof v === "number" ? v : NaN;
}
