#!/usr/bin/env node
/**
 * secgrowth-figures: render one figure per FigureSpec JSON.
 *
 * Usage:
 *   node dist/cli.js spec.json [more-specs.json ...]
 *
 * A spec looks like:
 *   { "inputs": ["out/toy.csv"], "kind": "growth",
 *     "output": "figs/toy.svg", "logLog": true }
 */

import { readFileSync } from "node:fs";

import { render } from "./render.js";
import { MissingFile, parseFigureSpec, SchemaMismatch } from "./spec.js";

export function main(argv: string[]): number {
  if (argv.length === 0) {
    console.error("usage: secgrowth-figures <figure-spec.json> [...]");
    return 2;
  }
  for (const specPath of argv) {
    let raw: unknown;
    try {
      raw = JSON.parse(readFileSync(specPath, "utf-8"));
    } catch (err) {
      console.error(`cannot read spec ${specPath}: ${(err as Error).message}`);
      return 2;
    }
    try {
      const out = render(parseFigureSpec(raw));
      console.log(`wrote ${out}`);
    } catch (err) {
      if (err instanceof SchemaMismatch || err instanceof MissingFile) {
        console.error(`${err.constructor.name}: ${err.message}`);
        return 1;
      }
      throw err;
    }
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
