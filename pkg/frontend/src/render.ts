/** render(spec): read the CSVs + sidecars, write one SVG figure. */

import { mkdirSync, writeFileSync } from "node:fs";
import path from "node:path";

import { readScanCsv, readVerdict, ScanTable, Verdict } from "./csv.js";
import {
  envelopeFigure,
  growthFigure,
  residualHistFigure,
  slopeCompareFigure,
} from "./figures.js";
import { FigureSpec, SchemaMismatch } from "./spec.js";

const FIRST_COLUMN: Record<FigureSpec["kind"], string[]> = {
  growth: ["t"],
  envelope: ["t"],
  "residual-hist": ["trial", "row"],
  "slope-compare": ["t"],
};

export function render(spec: FigureSpec): string {
  const tables: ScanTable[] = spec.inputs.map((f) =>
    readScanCsv(f, FIRST_COLUMN[spec.kind])
  );
  const verdicts: Array<Verdict | null> = spec.inputs.map((f) => readVerdict(f));

  let svg: string;
  switch (spec.kind) {
    case "growth":
      svg = growthFigure(tables, verdicts, spec.logLog, spec.title);
      break;
    case "envelope":
      svg = envelopeFigure(tables, verdicts, spec.title);
      break;
    case "residual-hist":
      svg = residualHistFigure(tables, verdicts, spec.title);
      break;
    case "slope-compare":
      svg = slopeCompareFigure(tables, verdicts, spec.title);
      break;
    default:
      throw new SchemaMismatch(`unknown figure kind ${(spec as FigureSpec).kind}`);
  }
  mkdirSync(path.dirname(path.resolve(spec.output)), { recursive: true });
  writeFileSync(spec.output, svg + "\n");
  return spec.output;
}
