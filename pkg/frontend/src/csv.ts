/**
 * Readers for the solver CLI's output files.
 *
 * Two shapes exist: spectra files (`k,sigma`, k contiguous from 1, sigma
 * nonincreasing) and time sweeps (`t,sigma1`, t ascending). Anything else
 * is rejected loudly: the plots are generated from these files alone, so a
 * malformed file means the wrong input was passed.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface Spectrum {
  /** 1-based singular value indices, contiguous. */
  k: number[];
  /** Singular values, nonincreasing, same length as k. */
  sigma: number[];
}

export type SweepPoint = { t: number; sigma1: number };

function parseNumericCsv(path: string, header: [string, string]): number[][] {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new Error(`${path}: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0 || rows[0].join(",") !== header.join(",")) {
    throw new Error(
      `${path}: expected header '${header.join(",")}', got '${rows[0]?.join(",")}'`,
    );
  }
  return rows.slice(1).map((row, i) => {
    const values = row.map(Number);
    if (values.length !== 2 || values.some((v) => Number.isNaN(v))) {
      throw new Error(`${path}: non-numeric row ${i + 2}: '${row.join(",")}'`);
    }
    return values;
  });
}

export function readSpectrumCsv(path: string): Spectrum {
  const rows = parseNumericCsv(path, ["k", "sigma"]);
  if (rows.length === 0) {
    throw new Error(`${path}: spectrum file has no data rows`);
  }
  const k = rows.map((r) => r[0]);
  const sigma = rows.map((r) => r[1]);
  k.forEach((ki, i) => {
    if (ki !== i + 1) throw new Error(`${path}: k column must be 1..n, found ${ki} at row ${i + 2}`);
  });
  for (let i = 1; i < sigma.length; i++) {
    if (sigma[i] > sigma[i - 1]) {
      throw new Error(`${path}: sigma must be nonincreasing (row ${i + 2})`);
    }
  }
  return { k, sigma };
}

export function readSweepCsv(path: string): SweepPoint[] {
  const rows = parseNumericCsv(path, ["t", "sigma1"]);
  if (rows.length === 0) {
    throw new Error(`${path}: sweep file has no data rows`);
  }
  const points = rows.map(([t, sigma1]) => ({ t, sigma1 }));
  for (let i = 1; i < points.length; i++) {
    if (points[i].t <= points[i - 1].t) {
      throw new Error(`${path}: t must be strictly ascending (row ${i + 2})`);
    }
  }
  return points;
}
