#!/usr/bin/env node
/**
 * segchain-render --figure <id> --csv <path> --out <path>
 *
 * Exit codes mirror the producing CLI: 0 ok, 1 usage, 2 bad CSV, 3 I/O.
 * On any failure nothing is written to --out.
 */

import fs from "node:fs";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FIGURE_IDS } from "./figures.js";
import { renderFigure } from "./render.js";
import { SchemaError } from "./schema.js";

class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: { figure: (typeof FIGURE_IDS)[number]; csv: string; out: string };
  try {
    args = yargs(argv)
      .scriptName("segchain-render")
      .usage("$0 --figure <id> --csv <path> --out <path>")
      .option("figure", {
        choices: FIGURE_IDS,
        demandOption: true,
        describe: "which figure the CSV feeds",
      })
      .option("csv", {
        type: "string",
        demandOption: true,
        describe: "CSV written by the segchain figure/sweep commands",
      })
      .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
      .strict()
      .exitProcess(false)
      .fail((msg, err) => {
        throw new UsageError(msg ?? err?.message ?? "bad usage");
      })
      .parseSync();
  } catch (e) {
    process.stderr.write(`error: ${(e as Error).message}\n`);
    return 1;
  }

  let text: string;
  try {
    text = fs.readFileSync(args.csv, "utf8");
  } catch (e) {
    process.stderr.write(`error: cannot read ${args.csv}: ${(e as Error).message}\n`);
    return 3;
  }

  let svg: string;
  try {
    svg = renderFigure(args.figure, text);
  } catch (e) {
    if (e instanceof SchemaError) {
      process.stderr.write(`error: ${args.csv}: ${e.message}\n`);
      return 2;
    }
    throw e;
  }

  try {
    fs.writeFileSync(args.out, svg);
  } catch (e) {
    process.stderr.write(`error: cannot write ${args.out}: ${(e as Error).message}\n`);
    return 3;
  }

  process.stdout.write(`wrote ${args.out}\n`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) process.exit(main(hideBin(process.argv)));
