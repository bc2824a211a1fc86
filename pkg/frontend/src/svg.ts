/** Minimal deterministic SVG emission: fixed number formatting, no
 * environment-dependent state, so identical inputs give identical bytes. */

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export function fmt(v: number): string {
  // fixed 3-decimal formatting keeps output bytes stable across platforms
  const s = v.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export class Scale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number
  ) {}

  at(v: number): number {
    const t = this.d1 === this.d0 ? 0.5 : (v - this.d0) / (this.d1 - this.d0);
    return this.r0 + t * (this.r1 - this.r0);
  }

  /** Round-numbered ticks covering the domain. */
  ticks(count = 5): number[] {
    const span = this.d1 - this.d0;
    if (span <= 0) return [this.d0];
    const raw = span / count;
    const mag = Math.pow(10, Math.floor(Math.log10(raw)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count) ?? mag * 10;
    const out: number[] = [];
    for (let v = Math.ceil(this.d0 / step) * step; v <= this.d1 + 1e-9; v += step) {
      out.push(Math.abs(v) < step / 1e6 ? 0 : v);
    }
    return out;
  }
}

export function extent(values: number[], pad = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo < hi)) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

export const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
];

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`
    );
    this.parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, opts = ""): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" ${opts}/>`
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.2, opts = ""): void {
    const d = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="${fmt(width)}" ${opts}/>`
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`
    );
  }

  text(x: number, y: number, s: string, opts = ""): void {
    this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}" ${opts}>${escapeXml(s)}</text>`);
  }

  /** Framed axes with ticks and labels for one panel. */
  axes(box: Box, xs: Scale, ys: Scale, xlabel: string, ylabel: string): void {
    this.parts.push(
      `<rect x="${fmt(box.x)}" y="${fmt(box.y)}" width="${fmt(box.w)}" height="${fmt(box.h)}" ` +
        `fill="none" stroke="black" stroke-width="0.8"/>`
    );
    for (const t of xs.ticks()) {
      const px = xs.at(t);
      this.line(px, box.y + box.h, px, box.y + box.h + 4, "black");
      this.text(px, box.y + box.h + 15, trimTick(t), 'text-anchor="middle"');
    }
    for (const t of ys.ticks()) {
      const py = ys.at(t);
      this.line(box.x - 4, py, box.x, py, "black");
      this.text(box.x - 6, py + 3, trimTick(t), 'text-anchor="end"');
    }
    this.text(box.x + box.w / 2, box.y + box.h + 30, xlabel, 'text-anchor="middle"');
    this.text(
      box.x - 42,
      box.y + box.h / 2,
      ylabel,
      `text-anchor="middle" transform="rotate(-90 ${fmt(box.x - 42)} ${fmt(box.y + box.h / 2)})"`
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function trimTick(v: number): string {
  const s = fmt(v);
  return s.replace(/\.?0+$/, "");
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
