#!/usr/bin/env node
import { writeFileSync } from "fs";
import yargs from "yargs";
import { SchemaError } from "./csv";
import { FigureKind, FigureSpec, renderFigure } from "./plots";

const KINDS: FigureKind[] = [
  "convergence",
  "condition-scaling",
  "condition-variation",
  "special-case",
];

function parseFloats(s: string): number[] {
  return s.split(",").map((v) => {
    const n = Number(v.trim());
    if (Number.isNaN(n)) throw new Error(`not a number: "${v}"`);
    return n;
  });
}

export function runCli(argv: string[]): number {
  const args = yargs(argv)
    .usage("$0 <kind> --in <csv...> --out <file.svg>")
    .command("$0 <kind>", "render experiment CSVs to an SVG figure")
    .positional("kind", { choices: KINDS, demandOption: true })
    .array("in")
    .string("in")
    .describe("in", "input CSV file(s); rows are pooled")
    .demandOption("in")
    .string("out")
    .describe("out", "output SVG path")
    .demandOption("out")
    .string("slopes")
    .describe("slopes", "comma list of reference slopes (default 2,3 / -3)")
    .string("metrics")
    .describe("metrics", "comma list of error columns (convergence only)")
    .string("title")
    .help()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parseSync();

  try {
    const out = args.out as string;
    if (!out.endsWith(".svg")) {
      throw new Error(`only SVG output is supported, got "${out}"`);
    }
    const spec: FigureSpec = {
      kind: args.kind as FigureKind,
      inputs: (args.in as string[]).map(String),
      slopes: args.slopes ? parseFloats(args.slopes) : undefined,
      metrics: args.metrics ? args.metrics.split(",").map((m) => m.trim()) : undefined,
      title: args.title,
    };
    writeFileSync(out, renderFigure(spec));
    return 0;
  } catch (e) {
    if (e instanceof SchemaError || e instanceof Error) {
      console.error(`fcm-figs: ${(e as Error).message}`);
      return 1;
    }
    throw e;
  }
}

if (require.main === module) {
  let code: number;
  try {
    code = runCli(process.argv.slice(2));
  } catch (e) {
    console.error(`fcm-figs: ${(e as Error).message}`);
    code = 1;
  }
  process.exit(code);
}
