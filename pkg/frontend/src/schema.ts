import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const EXPECTED_HEADER = ["scheme", "sweep_value", "mean_rate", "stderr", "n"];

export interface AggregateRow {
  scheme: string;
  sweepValue: number;
  meanRate: number;
  stderr: number;
  n: number;
}

export class SchemaError extends Error {}

function headerMessage(found: string[]): string {
  return (
    `expected columns [${EXPECTED_HEADER.join(", ")}], ` +
    `found [${found.join(", ")}]`
  );
}

function toNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw === "" || !Number.isFinite(value)) {
    throw new SchemaError(`row ${line}: column ${column} is not a finite number (${raw})`);
  }
  return value;
}

/** Parse an aggregate CSV; throws SchemaError on any shape problem. */
export function parseAggregateCsv(text: string): AggregateRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const found = parsed.meta.fields ?? [];
  const missing = EXPECTED_HEADER.filter((c) => !found.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(headerMessage(found));
  }
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`malformed CSV: ${first.message} (row ${first.row})`);
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`no data rows; ${headerMessage(found)}`);
  }
  return parsed.data.map((row, i) => ({
    scheme: row.scheme,
    sweepValue: toNumber(row.sweep_value, "sweep_value", i + 2),
    meanRate: toNumber(row.mean_rate, "mean_rate", i + 2),
    stderr: toNumber(row.stderr, "stderr", i + 2),
    n: toNumber(row.n, "n", i + 2),
  }));
}

export function readAggregateCsv(path: string): AggregateRow[] {
  return parseAggregateCsv(readFileSync(path, "utf8"));
}
