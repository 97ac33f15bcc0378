/**
 * Sweep figures: one subplot per panel, one series per estimator.
 * `lines` joins the means; `errorbars` draws points with +/- one
 * standard deviation whiskers. A per-panel Nyquist marker is drawn when
 * the report metadata carries `nyquist_from_mean_gap`.
 */

import type { Report, ReportRow } from "./csv.js";
import { PALETTE, SvgDoc, fmtTick, linearScale, niceTicks } from "./svg.js";

export type SweepStyle = "lines" | "errorbars";

const PANEL_W = 360;
const PANEL_H = 260;
const MARGIN = { left: 52, right: 16, top: 30, bottom: 40 };
const COLS = 2;

interface Series {
  estimator: string;
  points: Array<{ sweep: number; mean: number; std: number }>;
}

function groupPanels(rows: ReportRow[]): Map<string, Series[]> {
  const panels = new Map<string, Map<string, Series>>();
  for (const row of rows) {
    let byEst = panels.get(row.panel);
    if (!byEst) {
      byEst = new Map();
      panels.set(row.panel, byEst);
    }
    let series = byEst.get(row.estimator);
    if (!series) {
      series = { estimator: row.estimator, points: [] };
      byEst.set(row.estimator, series);
    }
    series.points.push({ sweep: row.sweep, mean: row.mean, std: row.std });
  }
  const out = new Map<string, Series[]>();
  for (const panel of [...panels.keys()].sort()) {
    const seriesList = [...panels.get(panel)!.values()].sort((a, b) =>
      a.estimator.localeCompare(b.estimator),
    );
    for (const s of seriesList) s.points.sort((a, b) => a.sweep - b.sweep);
    out.set(panel, seriesList);
  }
  return out;
}

function nyquistFor(report: Report, panel: string): number | null {
  const meta = report.meta;
  if (!meta || typeof meta !== "object") return null;
  const table = (meta as Record<string, unknown>)["nyquist_from_mean_gap"];
  if (!table || typeof table !== "object") return null;
  const value = (table as Record<string, unknown>)[panel];
  return typeof value === "number" ? value : null;
}

export function renderSweep(report: Report, style: SweepStyle): string {
  const panels = groupPanels(report.rows);
  const n = panels.size;
  const cols = Math.min(COLS, n);
  const rowsCount = Math.ceil(n / cols);
  const width = cols * PANEL_W + 20;
  const height = rowsCount * PANEL_H + 46;
  const doc = new SvgDoc(width, height);

  const estimators = [...new Set(report.rows.map((r) => r.estimator))].sort();
  const color = (est: string) => PALETTE[estimators.indexOf(est) % PALETTE.length];

  // legend
  estimators.forEach((est, i) => {
    const x = 20 + i * 130;
    doc.line(x, 16, x + 22, 16, color(est), 2);
    doc.text(x + 27, 20, est, { size: 11 });
  });

  let index = 0;
  for (const [panel, seriesList] of panels) {
    const px = (index % cols) * PANEL_W + 10;
    const py = Math.floor(index / cols) * PANEL_H + 36;
    index += 1;

    const xs = seriesList.flatMap((s) => s.points.map((p) => p.sweep));
    const lo = seriesList.flatMap((s) =>
      s.points.map((p) => (style === "errorbars" ? p.mean - p.std : p.mean)),
    );
    const hi = seriesList.flatMap((s) =>
      s.points.map((p) => (style === "errorbars" ? p.mean + p.std : p.mean)),
    );
    const nyquist = nyquistFor(report, panel);
    const xMin = Math.min(...xs, nyquist ?? Infinity);
    const xMax = Math.max(...xs, nyquist ?? -Infinity);
    const pad = (Math.max(...hi) - Math.min(...lo)) * 0.08 || 0.1;
    const yMin = Math.min(...lo) - pad;
    const yMax = Math.max(...hi) + pad;

    const x = linearScale([xMin, xMax], [px + MARGIN.left, px + PANEL_W - MARGIN.right]);
    const y = linearScale([yMin, yMax], [py + PANEL_H - MARGIN.bottom, py + MARGIN.top]);

    // frame and axes
    doc.rect(px + MARGIN.left, py + MARGIN.top, PANEL_W - MARGIN.left - MARGIN.right,
      PANEL_H - MARGIN.top - MARGIN.bottom, "none", "#888");
    for (const t of niceTicks(xMin, xMax)) {
      doc.line(x(t), y(yMin), x(t), y(yMin) + 4, "#888");
      doc.text(x(t), y(yMin) + 16, fmtTick(t), { size: 9, anchor: "middle" });
    }
    for (const t of niceTicks(yMin, yMax)) {
      doc.line(x(xMin) - 4, y(t), x(xMin), y(t), "#888");
      doc.text(x(xMin) - 7, y(t) + 3, fmtTick(t), { size: 9, anchor: "end" });
    }
    doc.text(px + PANEL_W / 2, py + PANEL_H - 8, report.sweepName, { size: 10, anchor: "middle" });
    doc.text(px + PANEL_W / 2, py + MARGIN.top - 8,
      `${report.panelName} = ${panel}`, { size: 11, anchor: "middle" });

    if (nyquist !== null) {
      doc.line(x(nyquist), y(yMin), x(nyquist), y(yMax), "#000", 1, "5,4");
      doc.text(x(nyquist) + 3, y(yMax) + 12, "Nyquist", { size: 9 });
    }

    for (const series of seriesList) {
      const c = color(series.estimator);
      if (style === "lines") {
        doc.polyline(series.points.map((p) => [x(p.sweep), y(p.mean)]), c);
        for (const p of series.points) doc.circle(x(p.sweep), y(p.mean), 2, c);
      } else {
        for (const p of series.points) {
          doc.line(x(p.sweep), y(p.mean - p.std), x(p.sweep), y(p.mean + p.std), c, 1);
          doc.line(x(p.sweep) - 3, y(p.mean - p.std), x(p.sweep) + 3, y(p.mean - p.std), c, 1);
          doc.line(x(p.sweep) - 3, y(p.mean + p.std), x(p.sweep) + 3, y(p.mean + p.std), c, 1);
          doc.circle(x(p.sweep), y(p.mean), 2.5, c);
        }
      }
    }
  }
  return doc.toString();
}
