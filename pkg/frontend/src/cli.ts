#!/usr/bin/env node
/** roc-figures CLI: render simulator CSV outputs into SVG figures. */

import { readFileSync, writeFileSync, renameSync, mkdtempSync, rmSync } from "node:fs";
import { basename, dirname, join } from "node:path";
import { FigureKind, SCHEMAS, SchemaError, parseCsv } from "./schema.js";
import { renderFigure } from "./render.js";

const USAGE =
  "usage: roc-figures render --kind <sinr_theta|metrics_vs_power|throughput_mcs> " +
  "--in <a.csv> [<b.csv>] --out <fig.svg>";

interface Args {
  kind: FigureKind;
  inputs: string[];
  out: string;
}

function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") throw new SchemaError(USAGE);
  let kind: string | undefined;
  const inputs: string[] = [];
  let out: string | undefined;
  for (let i = 1; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--kind") kind = argv[++i];
    else if (a === "--out") out = argv[++i];
    else if (a === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) inputs.push(argv[++i]);
    } else throw new SchemaError(`unknown argument '${a}'\n${USAGE}`);
  }
  if (!kind || !(kind in SCHEMAS)) {
    throw new SchemaError(`--kind must be one of: ${Object.keys(SCHEMAS).join(", ")}`);
  }
  if (inputs.length === 0 || !out) throw new SchemaError(USAGE);
  return { kind: kind as FigureKind, inputs, out };
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    process.stderr.write(`${(e as Error).message}\n`);
    return 2;
  }
  let svg: string;
  try {
    const series = args.inputs.map((path) => ({
      label: basename(path).replace(/\.csv$/, ""),
      rows: parseCsv(readFileSync(path, "utf8"), args.kind),
    }));
    svg = renderFigure(args.kind, series);
  } catch (e) {
    // render failures must not leave a partial or stale output file behind
    process.stderr.write(`error: ${(e as Error).message}\n`);
    return 1;
  }
  const tmpDir = mkdtempSync(join(dirname(args.out) || ".", ".rocfig-"));
  try {
    const tmp = join(tmpDir, "out.svg");
    writeFileSync(tmp, svg, "utf8");
    renameSync(tmp, args.out);
  } finally {
    rmSync(tmpDir, { recursive: true, force: true });
  }
  process.stderr.write(`wrote ${args.out}\n`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
