/**
 * Figure specification: which CSVs to read, what kind of figure to draw,
 * where to write the SVG. Validated with zod; the schema mirrors the CSV
 * contract documented in the main package README.
 */

import { z } from "zod";

export const FIGURE_KINDS = [
  "growth",
  "envelope",
  "residual-hist",
  "slope-compare",
] as const;

export const FigureSpecSchema = z
  .object({
    inputs: z.array(z.string()).min(1),
    kind: z.enum(FIGURE_KINDS),
    output: z.string(),
    logLog: z.boolean().default(false),
    title: z.string().optional(),
  })
  .strict();

export type FigureSpec = z.infer<typeof FigureSpecSchema>;

export class SchemaMismatch extends Error {}
export class MissingFile extends Error {}

export function parseFigureSpec(raw: unknown): FigureSpec {
  const res = FigureSpecSchema.safeParse(raw);
  if (!res.success) {
    throw new SchemaMismatch(`invalid figure spec: ${res.error.message}`);
  }
  return res.data;
}
