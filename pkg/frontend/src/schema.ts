/**
 * The CSV contract with the segchain CLI.
 *
 * Rows carry (scheme, stage, L0_km, Nr, L_km, e_Z, e_X, r_inf, R_bit_hz,
 * K_hz, C_K, p_end) and, on distance grids, plob_hz.  Floats are printed
 * with 12 significant digits; non-finite values appear as "inf"/"-inf"
 * (e.g. the cost of a dead configuration).  This module never computes
 * physics — it only parses and validates.
 */

import Papa from "papaparse";
import { z } from "zod";

export const SCHEMES = ["seg-ed", "seg-noed", "seg-prob", "peg-ed"] as const;
export type Scheme = (typeof SCHEMES)[number];

export class SchemaError extends Error {}

/** "inf"/"-inf" are valid in the contract; anything unparseable is not. */
function parseNumber(text: string, column: string, line: number): number {
  const t = text.trim();
  if (t === "inf") return Infinity;
  if (t === "-inf") return -Infinity;
  if (t === "") throw new SchemaError(`row ${line}: empty value in column ${column}`);
  const v = Number(t);
  if (Number.isNaN(v)) {
    throw new SchemaError(`row ${line}: bad number ${JSON.stringify(text)} in column ${column}`);
  }
  return v;
}

const rowShape = z.object({
  scheme: z.enum(SCHEMES),
  stage: z.string().min(1),
  L0_km: z.number().positive(),
  Nr: z.number().int().nonnegative(),
  L_km: z.number().nonnegative(),
  e_Z: z.number().min(0).max(1),
  e_X: z.number().min(0).max(1),
  r_inf: z.number().min(0).max(1),
  R_bit_hz: z.number().nonnegative(),
  K_hz: z.number().nonnegative(),
  C_K: z.number().nonnegative(), // may be Infinity
  p_end: z.number().min(0).max(1),
  plob_hz: z.number().optional(),
});

export type Row = z.infer<typeof rowShape>;

export const REQUIRED_COLUMNS = [
  "scheme", "stage", "L0_km", "Nr", "L_km", "e_Z", "e_X",
  "r_inf", "R_bit_hz", "K_hz", "C_K", "p_end",
] as const;

const NUMERIC_COLUMNS = REQUIRED_COLUMNS.slice(2) as readonly string[];

export function parseCsv(text: string): Row[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(`CSV parse error: ${first.message} (row ${first.row})`);
  }
  const header = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`missing columns: ${missing.join(", ")}`);
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("empty CSV: a header alone carries no curves");
  }
  const hasPlob = header.includes("plob_hz");
  return parsed.data.map((raw, i) => {
    const line = i + 2; // 1-based, after the header
    const record: Record<string, unknown> = {
      scheme: raw["scheme"],
      stage: raw["stage"],
    };
    for (const column of NUMERIC_COLUMNS) {
      record[column] = parseNumber(raw[column] ?? "", column, line);
    }
    if (hasPlob) record["plob_hz"] = parseNumber(raw["plob_hz"] ?? "", "plob_hz", line);
    const checked = rowShape.safeParse(record);
    if (!checked.success) {
      const issue = checked.error.issues[0]!;
      throw new SchemaError(`row ${line}: ${issue.path.join(".")}: ${issue.message}`);
    }
    return checked.data;
  });
}
