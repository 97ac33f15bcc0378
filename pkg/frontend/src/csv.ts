/**
 * Parsers for the CSV schemas emitted by the tickcorr CLI.
 * No computation happens here: every number plotted comes from the files.
 */

import { readFileSync, existsSync } from "node:fs";

export interface ReportRow {
  panel: string;
  sweep: number;
  estimator: string;
  mean: number;
  std: number;
  reps: number;
}

export interface Report {
  panelName: string;
  sweepName: string;
  rows: ReportRow[];
  meta: Record<string, unknown> | null;
}

export interface Matrix {
  tickers: string[];
  values: number[][];
  meta: Record<string, unknown> | null;
}

function splitCsv(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.length > 0)
    .map((line) => line.split(","));
}

function metaPath(csvPath: string): string {
  return csvPath.replace(/\.csv$/, "") + ".meta.json";
}

function loadMeta(csvPath: string): Record<string, unknown> | null {
  const path = metaPath(csvPath);
  if (!existsSync(path)) return null;
  return JSON.parse(readFileSync(path, "utf8")) as Record<string, unknown>;
}

function parseNumber(cell: string, column: string, line: number): number {
  const value = Number(cell);
  if (!Number.isFinite(value)) {
    throw new Error(`column "${column}": non-numeric value "${cell}" on line ${line}`);
  }
  return value;
}

/** Experiment report: header `<panel>,<sweep>,estimator,mean,std,reps`. */
export function readReport(path: string): Report {
  const rows = splitCsv(readFileSync(path, "utf8"));
  if (rows.length === 0) throw new Error("empty report CSV");
  const header = rows[0];
  const expected = ["estimator", "mean", "std", "reps"];
  if (header.length !== 6) {
    throw new Error(`report header must have 6 columns, got ${header.length}`);
  }
  expected.forEach((name, i) => {
    if (header[i + 2] !== name) {
      throw new Error(`column "${header[i + 2]}": expected "${name}" at position ${i + 3}`);
    }
  });
  const out: ReportRow[] = [];
  for (let i = 1; i < rows.length; i++) {
    const r = rows[i];
    if (r.length !== 6) throw new Error(`line ${i + 1}: expected 6 fields, got ${r.length}`);
    out.push({
      panel: r[0],
      sweep: parseNumber(r[1], header[1], i + 1),
      estimator: r[2],
      mean: parseNumber(r[3], "mean", i + 1),
      std: parseNumber(r[4], "std", i + 1),
      reps: parseNumber(r[5], "reps", i + 1),
    });
  }
  if (out.length === 0) throw new Error("report holds no data rows (empty grid)");
  return { panelName: header[0], sweepName: header[1], rows: out, meta: loadMeta(path) };
}

/** Correlation matrix: ticker header row/column, square body. */
export function readMatrix(path: string): Matrix {
  const rows = splitCsv(readFileSync(path, "utf8"));
  if (rows.length < 2) throw new Error("matrix CSV needs a header and at least one row");
  const tickers = rows[0].slice(1);
  const body = rows.slice(1);
  if (body.length !== tickers.length) {
    throw new Error(`matrix not square: ${tickers.length} columns but ${body.length} rows`);
  }
  const values = body.map((r, i) => {
    if (r.length !== tickers.length + 1) {
      throw new Error(`matrix not square: row ${i + 2} has ${r.length - 1} values`);
    }
    return r.slice(1).map((cell, j) => parseNumber(cell, tickers[j], i + 2));
  });
  return { tickers, values, meta: loadMeta(path) };
}
