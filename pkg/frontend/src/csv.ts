/**
 * Reader for the scan CSVs and their verdict sidecars.
 *
 * Expected headers, per experiment family:
 *   scans:          t,value,error_estimate   (dirac probe: t,value,envelope)
 *   cancellations:  trial,residual,error_estimate
 *   decay-check:    row,value,error_estimate
 *
 * The sidecar <stem>_verdict.json sits next to the CSV and carries the
 * verdict plus the fitted exponent/coefficient; figures display those
 * numbers verbatim and never recompute them.
 */

import { readFileSync, existsSync } from "node:fs";
import path from "node:path";

import { MissingFile, SchemaMismatch } from "./spec.js";

export interface ScanTable {
  header: string[];
  rows: number[][];
  path: string;
}

export interface Verdict {
  verdict: string;
  exponent?: number;
  coefficient?: number;
  r_squared?: number;
  residual?: number;
  linear_slope?: number;
  seed?: number;
  config_hash?: string;
  [key: string]: unknown;
}

export function readScanCsv(file: string, wantFirst: string[]): ScanTable {
  if (!existsSync(file)) {
    throw new MissingFile(`input CSV not found: ${file}`);
  }
  const text = readFileSync(file, "utf-8").trim();
  if (text.length === 0) {
    throw new SchemaMismatch(`empty CSV: ${file}`);
  }
  const lines = text.split(/\r?\n/);
  const header = lines[0].split(",").map((h) => h.trim());
  if (!wantFirst.includes(header[0]) || header.length < 2) {
    throw new SchemaMismatch(
      `CSV ${file} has header [${header.join(",")}], expected to start with one of [${wantFirst.join("|")}]`
    );
  }
  const rows: number[][] = [];
  for (const line of lines.slice(1)) {
    if (line.trim().length === 0) continue;
    const cells = line.split(",").map(Number);
    if (cells.length !== header.length || cells.some((c) => Number.isNaN(c))) {
      throw new SchemaMismatch(`CSV ${file} has a malformed row: ${line}`);
    }
    rows.push(cells);
  }
  if (rows.length === 0) {
    throw new SchemaMismatch(`CSV ${file} contains no data rows`);
  }
  return { header, rows, path: file };
}

export function sidecarPath(csvFile: string): string {
  const dir = path.dirname(csvFile);
  const stem = path.basename(csvFile).replace(/\.csv$/, "");
  return path.join(dir, `${stem}_verdict.json`);
}

export function readVerdict(csvFile: string): Verdict | null {
  const file = sidecarPath(csvFile);
  if (!existsSync(file)) return null;
  const data = JSON.parse(readFileSync(file, "utf-8"));
  if (typeof data !== "object" || data === null || typeof data.verdict !== "string") {
    throw new SchemaMismatch(`verdict sidecar ${file} lacks a verdict field`);
  }
  return data as Verdict;
}
