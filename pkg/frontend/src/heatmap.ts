/**
 * Correlation heatmap with ticker labels, a colour scale fixed to
 * [-1, 1] (panels stay comparable across figures), and the mean|rho|
 * +/- std inset taken from the matrix metadata. Cells outside [-1, 1]
 * are hatched.
 */

import type { Matrix } from "./csv.js";
import { SvgDoc, divergingColor, fmtTick } from "./svg.js";

const CELL = 42;
const MARGIN = { left: 72, top: 72, right: 96, bottom: 54 };

export function renderHeatmap(matrix: Matrix): string {
  const n = matrix.tickers.length;
  const width = MARGIN.left + n * CELL + MARGIN.right;
  const height = MARGIN.top + n * CELL + MARGIN.bottom;
  const doc = new SvgDoc(width, height);

  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = matrix.values[i][j];
      const x = MARGIN.left + j * CELL;
      const y = MARGIN.top + i * CELL;
      doc.rect(x, y, CELL, CELL, divergingColor(v), "#ddd");
      if (Math.abs(v) > 1) {
        doc.line(x + 3, y + CELL - 3, x + CELL - 3, y + 3, "#000", 1.2);
        doc.text(x + CELL / 2, y + 12, "!", { size: 11, anchor: "middle" });
      }
      const label = (Math.round(v * 100) / 100).toFixed(2);
      doc.text(x + CELL / 2, y + CELL / 2 + 4, label, {
        size: 9,
        anchor: "middle",
        fill: Math.abs(v) > 0.6 ? "#fff" : "#222",
      });
    }
  }

  matrix.tickers.forEach((ticker, i) => {
    doc.text(MARGIN.left - 8, MARGIN.top + i * CELL + CELL / 2 + 4, ticker, {
      size: 10,
      anchor: "end",
    });
    doc.text(MARGIN.left + i * CELL + CELL / 2, MARGIN.top - 10, ticker, {
      size: 10,
      anchor: "middle",
      rotate: -45,
    });
  });

  // colour bar
  const barX = MARGIN.left + n * CELL + 24;
  const barH = n * CELL;
  const steps = 48;
  for (let s = 0; s < steps; s++) {
    const v = 1 - (2 * s) / (steps - 1);
    doc.rect(barX, MARGIN.top + (s * barH) / steps, 14, barH / steps + 0.5, divergingColor(v));
  }
  for (const v of [-1, -0.5, 0, 0.5, 1]) {
    const y = MARGIN.top + ((1 - v) / 2) * barH;
    doc.text(barX + 20, y + 3, fmtTick(v), { size: 9 });
  }

  // inset statistics come from the primary component's metadata
  const meta = matrix.meta ?? {};
  const mean = meta["mean_abs_corr"];
  const std = meta["std_abs_corr"];
  if (typeof mean === "number" && typeof std === "number") {
    doc.text(MARGIN.left, height - 20,
      `mean|rho| = ${mean.toFixed(3)} +/- ${std.toFixed(3)}`, { size: 12 });
  }
  if (meta["rho_out_of_range"] === true) {
    doc.text(MARGIN.left, height - 6, "! contains |rho| > 1 (finite-sample estimate)", {
      size: 10,
      fill: "#a00",
    });
  }
  const title = [meta["estimator"], meta["clock"], meta["scale"]]
    .filter((v) => v !== undefined && v !== null)
    .join(" / ");
  if (title) doc.text(MARGIN.left, 18, title, { size: 12 });
  return doc.toString();
}
