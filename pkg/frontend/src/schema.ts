/** CSV schemas of the simulator commands and strict parsing against them. */

import Papa from "papaparse";

export type FigureKind = "sinr_theta" | "metrics_vs_power" | "throughput_mcs";

/** Exact header (column order included) emitted by the producing command. */
export const SCHEMAS: Record<FigureKind, string[]> = {
  sinr_theta: ["candidate_id", "theta_deg", "sinr_db"],
  metrics_vs_power: [
    "sweep_var",
    "value",
    "evm_db",
    "cf_db",
    "rssi_dbm",
    "bp_dbm",
    "cinr_db",
    "cfe_hz",
    "ce_ppm",
  ],
  throughput_mcs: ["mcs", "if_hz", "case", "throughput_mbps"],
};

export class SchemaError extends Error {}

export type Row = Record<string, string>;

/**
 * Parse CSV text and verify the header matches the kind's schema exactly.
 * Throws SchemaError naming the offending header on mismatch, or when the
 * file has no data rows.
 */
export function parseCsv(text: string, kind: FigureKind): Row[] {
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`unparsable CSV: ${parsed.errors[0].message}`);
  }
  const expected = SCHEMAS[kind];
  const got = parsed.meta.fields ?? [];
  if (got.length !== expected.length || expected.some((c, i) => got[i] !== c)) {
    throw new SchemaError(
      `header mismatch for kind '${kind}': got "${got.join(",")}", ` +
        `expected "${expected.join(",")}"`
    );
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`no data rows for kind '${kind}'`);
  }
  return parsed.data;
}

export function num(row: Row, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`non-numeric value '${row[col]}' in column '${col}'`);
  }
  return v;
}
