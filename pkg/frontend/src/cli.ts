#!/usr/bin/env node
import { Command, Option } from "commander";
import { DataError } from "./csv.js";
import { KINDS } from "./figures.js";
import { render } from "./render.js";

const program = new Command("render");
program
  .description("Render a figure image from a simulation CSV table")
  .addOption(
    new Option("--kind <kind>", "figure layout").choices([...KINDS]).makeOptionMandatory(),
  )
  .requiredOption("--in <path>", "input CSV file")
  .requiredOption("--out <path>", "output image path (.svg or .png)")
  .option("--x-label <text>", "override the x axis label")
  .option("--y-label <text>", "override the y axis label")
  .option("--series-column <name>", "fig2: column that splits rows into series")
  .showHelpAfterError();

program.parse();
const opts = program.opts<{
  kind: (typeof KINDS)[number];
  in: string;
  out: string;
  xLabel?: string;
  yLabel?: string;
  seriesColumn?: string;
}>();

try {
  render({
    kind: opts.kind,
    input: opts.in,
    output: opts.out,
    xLabel: opts.xLabel,
    yLabel: opts.yLabel,
    seriesColumn: opts.seriesColumn,
  });
} catch (err) {
  if (err instanceof DataError) {
    console.error(`render: ${err.message}`);
    process.exit(1);
  }
  throw err;
}
