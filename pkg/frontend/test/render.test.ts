import assert from "node:assert/strict";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { readMatrix, readReport } from "../src/csv.js";
import { renderHeatmap } from "../src/heatmap.js";
import { renderSweep } from "../src/sweep.js";
import { run } from "../src/cli.js";

const golden = (name: string) =>
  fileURLToPath(new URL(`../../golden/${name}`, import.meta.url));

const scratch = mkdtempSync(join(tmpdir(), "tickcorr-figures-"));

test("missing-data sweep renders as multi-panel lines", () => {
  const svg = renderSweep(readReport(golden("missing.csv")), "lines");
  assert.ok(svg.startsWith("<svg"));
  assert.ok(svg.includes("polyline"));
  assert.ok(svg.includes("fraction = 0.4"));
  assert.match(svg, /MM/);
  assert.match(svg, /HY/);
});

test("process-comparison renders one panel per model", () => {
  const svg = renderSweep(readReport(golden("process.csv")), "lines");
  assert.ok(svg.includes("model = merton-0"));
  assert.ok(svg.includes("model = vg"));
  assert.match(svg, /HY-async/);
});

test("extended comparison renders error bars with a Nyquist marker", () => {
  const svg = renderSweep(readReport(golden("extended.csv")), "errorbars");
  assert.ok(svg.includes("Nyquist"));
  assert.ok(svg.includes("stroke-dasharray"));
  assert.ok(svg.includes("circle"));
});

test("heatmap renders tickers, colour bar and insets", () => {
  const svg = renderHeatmap(readMatrix(golden("corr.csv")));
  assert.ok(svg.includes("SYN1"));
  assert.ok(svg.includes("mean|rho| ="));
  assert.ok(svg.includes("rgb("));
});

test("all four figure types render deterministically via the cli", () => {
  const jobs: Array<[string, string, string[]]> = [
    ["plot-sweep", "missing.csv", ["--style", "lines"]],
    ["plot-sweep", "process.csv", ["--style", "lines"]],
    ["plot-sweep", "extended.csv", ["--style", "errorbars"]],
    ["plot-heatmap", "corr.csv", []],
  ];
  for (const [command, name, flags] of jobs) {
    const a = join(scratch, `${name}.a.svg`);
    const b = join(scratch, `${name}.b.svg`);
    assert.equal(run([command, golden(name), a, ...flags]), 0);
    assert.equal(run([command, golden(name), b, ...flags]), 0);
    assert.deepEqual(readFileSync(a), readFileSync(b), `${name}: bytes differ across runs`);
  }
});

test("out-of-range correlations get hatched and flagged", () => {
  const path = join(scratch, "oor.csv");
  writeFileSync(path, "ticker,A,B\nA,1.0,1.05\nB,1.05,1.0\n");
  writeFileSync(
    path.replace(".csv", ".meta.json"),
    JSON.stringify({ mean_abs_corr: 1.05, std_abs_corr: 0.0, rho_out_of_range: true }),
  );
  const svg = renderHeatmap(readMatrix(path));
  assert.ok(svg.includes("|rho| &gt; 1"));
  assert.ok(svg.includes(">!</text>"));
});

test("schema mismatch names the offending column", () => {
  const path = join(scratch, "bad.csv");
  writeFileSync(path, "fraction,rho,estimator,avg,std,reps\n0,0.1,MM,0.1,0.0,2\n");
  assert.throws(() => readReport(path), /column "avg"/);
});

test("empty grid is rejected", () => {
  const path = join(scratch, "empty.csv");
  writeFileSync(path, "fraction,rho,estimator,mean,std,reps\n");
  assert.throws(() => readReport(path), /empty grid/);
});

test("non-square matrix is rejected", () => {
  const path = join(scratch, "nonsquare.csv");
  writeFileSync(path, "ticker,A,B\nA,1.0,0.5\n");
  assert.throws(() => readMatrix(path), /not square/);
});

test("cli reports unknown commands and bad inputs with nonzero status", () => {
  assert.equal(run(["plot-nothing", "x", "y"]), 2);
  assert.equal(run(["plot-sweep", golden("missing.csv"), join(scratch, "x.svg"), "--style", "dots"]), 2);
  assert.equal(run(["plot-heatmap", join(scratch, "nonsquare.csv"), join(scratch, "x.svg")]), 1);
});
