/**
 * Minimal deterministic SVG builder: plain string assembly, fixed
 * precision, no timestamps or randomness, so identical inputs give
 * identical bytes.
 */

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

export function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export function fmtTick(v: number): string {
  const r = Math.round(v * 1e6) / 1e6;
  return Object.is(r, -0) ? "0" : String(r);
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  return fn;
}

/** Round tick steps to a 1/2/5 ladder. */
export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (lo === hi) return [lo];
  const rawStep = (hi - lo) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(rawStep))));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-9 * step; v += step) ticks.push(v);
  return ticks;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  raw(tag: string): void {
    this.parts.push(tag);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.raw(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.raw(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.raw(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, stroke = "none"): void {
    this.raw(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
        `fill="${fill}" stroke="${stroke}"/>`,
    );
  }

  text(x: number, y: number, content: string, opts: { size?: number; anchor?: string; rotate?: number; fill?: string } = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222";
    const transform = opts.rotate ? ` transform="rotate(${opts.rotate} ${fmt(x)} ${fmt(y)})"` : "";
    this.raw(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" ` +
        `fill="${fill}"${transform}>${escapeXml(content)}</text>`,
    );
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Diverging blue-white-red map over [-1, 1]; inputs are clamped. */
export function divergingColor(v: number): string {
  const t = Math.max(-1, Math.min(1, v));
  const lerp = (a: number, b: number, u: number) => Math.round(a + (b - a) * u);
  let r: number, g: number, b: number;
  if (t < 0) {
    const u = t + 1; // [-1, 0] -> [0, 1]
    r = lerp(33, 255, u);
    g = lerp(102, 255, u);
    b = lerp(172, 255, u);
  } else {
    r = lerp(255, 178, t);
    g = lerp(255, 24, t);
    b = lerp(255, 43, t);
  }
  return `rgb(${r},${g},${b})`;
}
