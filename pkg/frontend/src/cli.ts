#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { buildSvg, FIGURE_KINDS, FigureKind } from "./figure.js";
import { readAggregateCsv, SchemaError } from "./schema.js";

const USAGE =
  "usage: render --kind {convergence|sweep_m|sweep_power|deployment} --in <csv> --out <img>";

interface Args {
  kind: FigureKind;
  input: string;
  output: string;
}

export function parseArgs(argv: string[]): Args {
  const rest = argv[0] === "render" ? argv.slice(1) : argv;
  const flags = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const value = rest[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(USAGE);
    }
    flags.set(key.slice(2), value);
  }
  const kind = flags.get("kind");
  const input = flags.get("in");
  const output = flags.get("out");
  const extras = [...flags.keys()].filter((k) => !["kind", "in", "out"].includes(k));
  if (extras.length > 0) {
    throw new Error(`unknown flag --${extras[0]}\n${USAGE}`);
  }
  if (!kind || !input || !output) {
    throw new Error(USAGE);
  }
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new Error(`unknown figure kind ${kind}\n${USAGE}`);
  }
  return { kind: kind as FigureKind, input, output };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const rows = readAggregateCsv(args.input);
    writeFileSync(args.output, buildSvg(rows, args.kind), "utf8");
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error((err as Error).message);
    }
    return 1;
  }
  console.log(`wrote ${args.output}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
