/**
 * The four figure kinds. Figures display the CSV rows and the sidecar's
 * fitted numbers only — no physics is recomputed here. The annotated
 * exponent is embedded both as visible text and as a `data-exponent`
 * attribute carrying the sidecar value exactly (String() round-trips
 * doubles in JS).
 */

import { ScanTable, Verdict } from "./csv.js";
import { HEIGHT, MARGIN, SvgDoc, WIDTH, fmt, makeScale } from "./svg.js";

const DATA_COLORS = ["#1f6fb2", "#c23b22", "#3d8f5f", "#8456a8", "#b8860b"];

function plotArea() {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

function positive(rows: number[][], col: number): number[][] {
  return rows.filter((r) => r[col] > 0);
}

export function growthFigure(
  tables: ScanTable[],
  verdicts: Array<Verdict | null>,
  logLog: boolean,
  title?: string
): string {
  const doc = new SvgDoc();
  const { x0, x1, y0, y1 } = plotArea();
  const rows = logLog
    ? tables.flatMap((t) => positive(t.rows, 1).filter((r) => r[0] > 0))
    : tables.flatMap((t) => t.rows);
  const xsv = rows.map((r) => r[0]);
  const ysv = rows.map((r) => r[1]);
  const xLim: [number, number] = [Math.min(...xsv), Math.max(...xsv)];
  const yLim: [number, number] = [Math.min(...ysv), Math.max(...ysv)];
  const xs = makeScale(xLim[0], xLim[1], x0, x1, logLog);
  const ys = makeScale(yLim[0], yLim[1], y0, y1, logLog);
  doc.axes(xs, ys, xLim, yLim, logLog, logLog, "t", "|value|");

  tables.forEach((table, i) => {
    const pts = (logLog ? positive(table.rows, 1) : table.rows).map(
      (r) => [xs(r[0]), ys(r[1])] as [number, number]
    );
    doc.polyline(pts, DATA_COLORS[i % DATA_COLORS.length]);
    for (const [px, py] of pts) doc.circle(px, py, 1.8, DATA_COLORS[i % DATA_COLORS.length]);
  });

  const v = verdicts[0];
  if (v && typeof v.exponent === "number" && typeof v.coefficient === "number") {
    // fitted power law from the sidecar, drawn over the data range
    const fitPts: Array<[number, number]> = [];
    for (let i = 0; i <= 64; i++) {
      const t = logLog
        ? xLim[0] * Math.pow(xLim[1] / xLim[0], i / 64)
        : xLim[0] + ((xLim[1] - xLim[0]) * i) / 64;
      const yv = v.coefficient * Math.pow(t, v.exponent);
      if (yv >= yLim[0] && yv <= yLim[1]) fitPts.push([xs(t), ys(yv)]);
    }
    doc.polyline(fitPts, "#222", 1.2, "6 4");
    doc.text(
      x1 - 6,
      y1 + 16,
      `${v.verdict}: fitted t^${fmt(v.exponent)}`,
      { anchor: "end", size: 13, attrs: `data-exponent="${v.exponent}" data-verdict="${v.verdict}"` }
    );
  } else if (v) {
    doc.text(x1 - 6, y1 + 16, `${v.verdict}`, {
      anchor: "end",
      size: 13,
      attrs: `data-verdict="${v.verdict}"`,
    });
  }
  return doc.render(title ?? "growth scan");
}

export function envelopeFigure(
  tables: ScanTable[],
  verdicts: Array<Verdict | null>,
  title?: string
): string {
  const doc = new SvgDoc();
  const { x0, x1, y0, y1 } = plotArea();
  const rows = tables.flatMap((t) => t.rows);
  const xsv = rows.map((r) => r[0]);
  const ysv = rows.map((r) => r[1]);
  const xLim: [number, number] = [Math.min(...xsv), Math.max(...xsv)];
  const lo = Math.min(...ysv);
  const hi = Math.max(...ysv);
  const pad = 0.25 * (hi - lo || hi || 1);
  const yLim: [number, number] = [Math.max(0, lo - pad), hi + pad];
  const xs = makeScale(xLim[0], xLim[1], x0, x1, false);
  const ys = makeScale(yLim[0], yLim[1], y0, y1, false);
  doc.axes(xs, ys, xLim, yLim, false, false, "t", "t^{3/2} |value|");
  // envelope band between observed min and max: flat within band = bounded
  doc.rect(x0, ys(hi), x1 - x0, Math.abs(ys(lo) - ys(hi)), "#9ec9e8", 0.35);
  tables.forEach((table, i) => {
    const pts = table.rows.map((r) => [xs(r[0]), ys(r[1])] as [number, number]);
    doc.polyline(pts, DATA_COLORS[i % DATA_COLORS.length]);
    for (const [px, py] of pts) doc.circle(px, py, 1.8, DATA_COLORS[i % DATA_COLORS.length]);
  });
  const v = verdicts[0];
  if (v) {
    const ratio = hi / (lo || 1);
    const label =
      typeof v.exponent === "number"
        ? `${v.verdict}: fitted t^${fmt(v.exponent)}, max/min ${fmt(ratio)}`
        : `${v.verdict}: max/min ${fmt(ratio)}`;
    const attrs =
      typeof v.exponent === "number"
        ? `data-exponent="${v.exponent}" data-verdict="${v.verdict}"`
        : `data-verdict="${v.verdict}"`;
    doc.text(x1 - 6, y1 + 16, label, { anchor: "end", size: 13, attrs });
  }
  return doc.render(title ?? "decay envelope");
}

export function residualHistFigure(
  tables: ScanTable[],
  verdicts: Array<Verdict | null>,
  title?: string
): string {
  const doc = new SvgDoc();
  const { x0, x1, y0, y1 } = plotArea();
  const residuals = tables.flatMap((t) => t.rows.map((r) => r[1]));
  const floor = 1e-18;
  const logs = residuals.map((r) => Math.log10(Math.max(Math.abs(r), floor)));
  const lo = Math.floor(Math.min(...logs));
  const hi = Math.ceil(Math.max(...logs)) + 1e-9;
  const nBins = Math.max(6, Math.min(18, Math.round(hi - lo)));
  const counts = new Array<number>(nBins).fill(0);
  for (const l of logs) {
    const b = Math.min(nBins - 1, Math.max(0, Math.floor(((l - lo) / (hi - lo)) * nBins)));
    counts[b] += 1;
  }
  const xs = makeScale(lo, hi, x0, x1, false);
  const ys = makeScale(0, Math.max(...counts), y0, y1, false);
  doc.axes(xs, ys, [lo, hi], [0, Math.max(...counts)], false, false, "log10 |residual|", "count");
  const bw = (x1 - x0) / nBins;
  counts.forEach((c, i) => {
    if (c > 0) doc.rect(x0 + i * bw + 1, ys(c), bw - 2, y0 - ys(c), DATA_COLORS[0], 0.8);
  });
  const v = verdicts[0];
  if (v && typeof v.residual === "number") {
    doc.text(x1 - 6, y1 + 16, `${v.verdict}: worst residual ${fmt(v.residual)}`, {
      anchor: "end",
      size: 13,
      attrs: `data-residual="${v.residual}" data-verdict="${v.verdict}"`,
    });
  }
  return doc.render(title ?? "cancellation residuals");
}

export function slopeCompareFigure(
  tables: ScanTable[],
  verdicts: Array<Verdict | null>,
  title?: string
): string {
  const doc = new SvgDoc();
  const { x0, x1, y0, y1 } = plotArea();
  const entries = tables.map((t, i) => {
    const v = verdicts[i];
    const slope =
      v && typeof v.linear_slope === "number"
        ? Math.abs(v.linear_slope)
        : v && typeof v.coefficient === "number"
          ? v.coefficient
          : 0;
    const name = t.path.split("/").pop()?.replace(/\.csv$/, "") ?? `scan ${i}`;
    return { name, slope, verdict: v?.verdict ?? "?" };
  });
  const floor = 1e-16;
  const logs = entries.map((e) => Math.log10(Math.max(e.slope, floor)));
  const lo = Math.min(...logs, -16) - 1;
  const hi = Math.max(...logs) + 1;
  const xs = makeScale(lo, hi, x0, x1, false);
  const bh = (y0 - y1) / Math.max(entries.length, 1);
  doc.axes(
    makeScale(lo, hi, x0, x1, false),
    makeScale(0, 1, y0, y1, false),
    [lo, hi],
    [0, 1],
    false,
    false,
    "log10 |dA/dt|",
    ""
  );
  entries.forEach((e, i) => {
    const y = y1 + i * bh + bh * 0.2;
    const w = Math.max(xs(Math.log10(Math.max(e.slope, floor))) - x0, 1);
    doc.rect(x0, y, w, bh * 0.6, DATA_COLORS[i % DATA_COLORS.length], 0.85);
    doc.text(x0 + 4, y + bh * 0.45, `${e.name} [${e.verdict}] slope ${fmt(e.slope)}`, {
      size: 12,
      attrs: `data-slope="${e.slope}" data-verdict="${e.verdict}"`,
    });
  });
  return doc.render(title ?? "loop slope comparison");
}
