/**
 * Figure rendering commands:
 *
 *   plot-sweep   <report.csv> <out.svg> [--style lines|errorbars]
 *   plot-heatmap <matrix.csv> <out.svg>
 *
 * Inputs are the CSV/meta files written by the tickcorr CLI; output is
 * SVG, byte-identical across runs for the same inputs.
 */

import { writeFileSync } from "node:fs";
import { readMatrix, readReport } from "./csv.js";
import { renderHeatmap } from "./heatmap.js";
import { renderSweep, type SweepStyle } from "./sweep.js";

const USAGE =
  "usage: plot-sweep <report.csv> <out.svg> [--style lines|errorbars]\n" +
  "       plot-heatmap <matrix.csv> <out.svg>";

export function run(argv: string[]): number {
  const [command, input, output, ...rest] = argv;
  if (!command || !input || !output) {
    console.error(USAGE);
    return 2;
  }
  let style: SweepStyle = "lines";
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === "--style") {
      const value = rest[++i];
      if (value !== "lines" && value !== "errorbars") {
        console.error(`error: unknown style "${value}"`);
        return 2;
      }
      style = value;
    } else {
      console.error(`error: unknown flag "${rest[i]}"`);
      return 2;
    }
  }
  try {
    if (command === "plot-sweep") {
      writeFileSync(output, renderSweep(readReport(input), style));
    } else if (command === "plot-heatmap") {
      writeFileSync(output, renderHeatmap(readMatrix(input)));
    } else {
      console.error(`error: unknown command "${command}"\n${USAGE}`);
      return 2;
    }
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
  console.log(`${command}: ${input} -> ${output}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(run(process.argv.slice(2)));
}
