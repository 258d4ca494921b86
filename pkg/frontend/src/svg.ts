/** Minimal hand-rolled SVG builder: axes, polylines, bars, text. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN: Margin = { top: 42, right: 24, bottom: 52, left: 72 };

export type Scale = (v: number) => number;

export function makeScale(
  lo: number,
  hi: number,
  rangeLo: number,
  rangeHi: number,
  log: boolean
): Scale {
  if (log) {
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    return (v) => rangeLo + ((Math.log10(v) - llo) / (lhi - llo || 1)) * (rangeHi - rangeLo);
  }
  return (v) => rangeLo + ((v - lo) / (hi - lo || 1)) * (rangeHi - rangeLo);
}

export function ticks(lo: number, hi: number, n: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    const e0 = Math.floor(Math.log10(lo));
    const e1 = Math.ceil(Math.log10(hi));
    for (let e = e0; e <= e1; e++) {
      const v = 10 ** e;
      if (v >= lo * 0.999 && v <= hi * 1.001) out.push(v);
    }
    return out.length >= 2 ? out : [lo, hi];
  }
  const step = (hi - lo) / (n - 1);
  return Array.from({ length: n }, (_, i) => lo + i * step);
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export class SvgDoc {
  private parts: string[] = [];

  add(part: string) {
    this.parts.push(part);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#444", width = 1, dash = "") {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(
      `<line x1="${x1.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" y2="${y2.toFixed(2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.8, dash = "") {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    const path = pts.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
    this.add(`<polyline points="${path}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  circle(x: number, y: number, r: number, fill: string) {
    this.add(`<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, opacity = 1.0) {
    this.add(
      `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}" height="${h.toFixed(2)}" fill="${fill}" opacity="${opacity}"/>`
    );
  }

  text(x: number, y: number, s: string, opts: { size?: number; anchor?: string; fill?: string; attrs?: string } = {}) {
    const { size = 12, anchor = "start", fill = "#222", attrs = "" } = opts;
    this.add(
      `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" font-size="${size}" text-anchor="${anchor}" fill="${fill}" font-family="Menlo, monospace" ${attrs}>${esc(s)}</text>`
    );
  }

  axes(
    xs: Scale,
    ys: Scale,
    xLim: [number, number],
    yLim: [number, number],
    logX: boolean,
    logY: boolean,
    xLabel: string,
    yLabel: string
  ) {
    const { top, bottom, left, right } = MARGIN;
    const x0 = left;
    const x1 = WIDTH - right;
    const y0 = HEIGHT - bottom;
    const y1 = top;
    this.line(x0, y0, x1, y0);
    this.line(x0, y0, x0, y1);
    for (const t of ticks(xLim[0], xLim[1], 6, logX)) {
      const px = xs(t);
      this.line(px, y0, px, y0 + 5);
      this.text(px, y0 + 18, fmt(t), { anchor: "middle", size: 11 });
    }
    for (const t of ticks(yLim[0], yLim[1], 6, logY)) {
      const py = ys(t);
      this.line(x0 - 5, py, x0, py);
      this.text(x0 - 8, py + 4, fmt(t), { anchor: "end", size: 11 });
    }
    this.text((x0 + x1) / 2, HEIGHT - 14, xLabel, { anchor: "middle" });
    this.text(16, (y0 + y1) / 2, yLabel, {
      anchor: "middle",
      attrs: `transform="rotate(-90 16 ${(y0 + y1) / 2})"`,
    });
  }

  render(title?: string): string {
    const head =
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">` +
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`;
    const titleEl = title
      ? `<text x="${WIDTH / 2}" y="24" font-size="15" text-anchor="middle" font-family="Menlo, monospace">${esc(title)}</text>`
      : "";
    return `${head}${titleEl}${this.parts.join("\n")}</svg>`;
  }
}
