#!/usr/bin/env node
/** figkit <kind> --in <csv> --out <svg> [--marks a,b,...]
 *
 * Renders a dfrcbeam result table into a deterministic SVG figure.
 * Kinds: tradeoff | beampattern | convergence | mc.
 */

import { readFileSync, writeFileSync } from "fs";
import { parseArgs } from "util";

import { EmptySelectionError, MissingColumnError, parseCsv } from "./csv.js";
import { buildChart, Kind } from "./kinds.js";
import { renderChart } from "./svg.js";

const KINDS: Kind[] = ["tradeoff", "beampattern", "convergence", "mc"];
const DEFAULT_MARKS = "-60,-30,30,60";

export function render(kind: Kind, csvText: string, marks: number[]): string {
  return renderChart(buildChart(kind, parseCsv(csvText), marks));
}

export function main(argv: string[]): number {
  const kind = argv[0] as Kind;
  if (!KINDS.includes(kind)) {
    console.error(`usage: figkit <${KINDS.join("|")}> --in <csv> --out <svg> [--marks a,b,...]`);
    return 2;
  }
  let values: { in?: string; out?: string; marks?: string };
  try {
    ({ values } = parseArgs({
      args: argv.slice(1),
      options: {
        in: { type: "string" },
        out: { type: "string" },
        marks: { type: "string", default: DEFAULT_MARKS },
      },
    }));
  } catch (err) {
    console.error(`argument error: ${(err as Error).message}`);
    return 2;
  }
  if (!values.in || !values.out) {
    console.error("both --in and --out are required");
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(values.in, "utf8");
  } catch (err) {
    console.error(`cannot read ${values.in}: ${(err as Error).message}`);
    return 2;
  }
  const marks = kind === "beampattern"
    ? (values.marks ?? DEFAULT_MARKS).split(",").map(Number).filter(Number.isFinite)
    : [];
  try {
    writeFileSync(values.out, render(kind, text, marks));
  } catch (err) {
    if (err instanceof MissingColumnError || err instanceof EmptySelectionError) {
      console.error(`${err.name}: ${err.message}`);
      return 3;
    }
    throw err;
  }
  return 0;
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop() as string)) {
  process.exit(main(process.argv.slice(2)));
}
