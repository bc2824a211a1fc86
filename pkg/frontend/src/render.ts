/** The three figure renderers. Each takes parsed CSV rows and returns SVG text. */

import { Row, num, FigureKind, SchemaError } from "./schema.js";
import { Box, PALETTE, Scale, SvgDoc, extent } from "./svg.js";

const WIDTH = 760;
const MARGIN = { left: 70, right: 20, top: 30, bottom: 50 };

/** Metric panels of the power-sweep figure, in render order. */
export const METRIC_PANELS: Array<{ col: string; label: string }> = [
  { col: "evm_db", label: "EVM (dB)" },
  { col: "ce_ppm", label: "clock error (ppm)" },
  { col: "cf_db", label: "crest factor (dB)" },
  { col: "rssi_dbm", label: "RSSI (dBm)" },
  { col: "bp_dbm", label: "burst power (dBm)" },
  { col: "cinr_db", label: "CINR (dB)" },
];

const EVM_LIMIT_DB = -25;

function groupBy(rows: Row[], col: string): Map<string, Row[]> {
  const out = new Map<string, Row[]>();
  for (const r of rows) {
    const key = r[col];
    const list = out.get(key);
    if (list) list.push(r);
    else out.set(key, [r]);
  }
  return out;
}

/** One curve per mapping candidate plus the bold per-angle envelope. */
export function renderSinrTheta(rows: Row[]): string {
  const height = 420;
  const box: Box = {
    x: MARGIN.left,
    y: MARGIN.top,
    w: WIDTH - MARGIN.left - MARGIN.right,
    h: height - MARGIN.top - MARGIN.bottom,
  };
  const [x0, x1] = extent(rows.map((r) => num(r, "theta_deg")), 0);
  const [y0, y1] = extent(rows.map((r) => num(r, "sinr_db")));
  const xs = new Scale(x0, x1, box.x, box.x + box.w);
  const ys = new Scale(y0, y1, box.y + box.h, box.y);

  const doc = new SvgDoc(WIDTH, height);
  doc.axes(box, xs, ys, "steering angle (deg)", "SINR (dB)");
  doc.text(box.x, box.y - 10, "SINR vs steering angle by mapping candidate", 'font-weight="bold"');

  const groups = [...groupBy(rows, "candidate_id").entries()];
  let colorIdx = 0;
  for (const [cid, g] of groups) {
    const pts = g
      .slice()
      .sort((a, b) => num(a, "theta_deg") - num(b, "theta_deg"))
      .map((r): [number, number] => [xs.at(num(r, "theta_deg")), ys.at(num(r, "sinr_db"))]);
    if (cid === "envelope") {
      doc.polyline(pts, "black", 2.5);
      doc.text(pts[pts.length - 1][0] - 4, pts[pts.length - 1][1] - 6, "envelope", 'text-anchor="end" font-weight="bold"');
    } else {
      doc.polyline(pts, PALETTE[colorIdx++ % PALETTE.length], 1.0, 'opacity="0.8"');
    }
  }
  return doc.render();
}

/** Six stacked metric panels vs the swept variable; 1-2 series overlaid. */
export function renderMetricsVsPower(series: Array<{ label: string; rows: Row[] }>): string {
  const panelH = 130;
  const gap = 46;
  const height = MARGIN.top + METRIC_PANELS.length * (panelH + gap);
  const doc = new SvgDoc(WIDTH, height);
  const sweepVar = series[0].rows[0]["sweep_var"];

  const allX = series.flatMap((s) => s.rows.map((r) => num(r, "value")));
  const [x0, x1] = extent(allX, 0);

  METRIC_PANELS.forEach((panel, pi) => {
    const box: Box = {
      x: MARGIN.left,
      y: MARGIN.top + pi * (panelH + gap),
      w: WIDTH - MARGIN.left - MARGIN.right,
      h: panelH,
    };
    const allY = series.flatMap((s) => s.rows.map((r) => num(r, panel.col)));
    let [y0, y1] = extent(allY);
    if (panel.col === "evm_db") {
      y0 = Math.min(y0, EVM_LIMIT_DB - 1);
      y1 = Math.max(y1, EVM_LIMIT_DB + 1);
    }
    const xs = new Scale(x0, x1, box.x, box.x + box.w);
    const ys = new Scale(y0, y1, box.y + box.h, box.y);
    doc.axes(box, xs, ys, pi === METRIC_PANELS.length - 1 ? sweepVar : "", panel.label);

    if (panel.col === "evm_db") {
      const py = ys.at(EVM_LIMIT_DB);
      doc.line(box.x, py, box.x + box.w, py, "#d62728", 'stroke-dasharray="5 3"');
      doc.text(box.x + box.w - 4, py - 4, "-25 dB limit", 'text-anchor="end" fill="#d62728"');
    }

    series.forEach((s, si) => {
      const pts = s.rows
        .slice()
        .sort((a, b) => num(a, "value") - num(b, "value"))
        .map((r): [number, number] => [xs.at(num(r, "value")), ys.at(num(r, panel.col))]);
      doc.polyline(pts, PALETTE[si % PALETTE.length], 1.6);
      if (pi === 0) {
        doc.text(box.x + 8, box.y + 14 + 14 * si, s.label, `fill="${PALETTE[si % PALETTE.length]}"`);
      }
    });
  });
  return doc.render();
}

/** Grouped bars: throughput per MCS, one bar per (if_hz, case) combination. */
export function renderThroughputMcs(rows: Row[]): string {
  const height = 420;
  const box: Box = {
    x: MARGIN.left,
    y: MARGIN.top,
    w: WIDTH - MARGIN.left - MARGIN.right,
    h: height - MARGIN.top - MARGIN.bottom,
  };
  const mcsValues = [...new Set(rows.map((r) => num(r, "mcs")))].sort((a, b) => a - b);
  const combos = [...new Set(rows.map((r) => `${r["if_hz"]}/${r["case"]}`))];
  const [, yMax] = extent(rows.map((r) => num(r, "throughput_mbps")), 0);
  const ys = new Scale(0, yMax * 1.05, box.y + box.h, box.y);
  const xs = new Scale(mcsValues[0] - 0.5, mcsValues[mcsValues.length - 1] + 0.5, box.x, box.x + box.w);

  const doc = new SvgDoc(WIDTH, height);
  doc.axes(box, xs, ys, "MCS index", "throughput (Mbps)");
  doc.text(box.x, box.y - 10, "Throughput vs MCS by IF slot and interference case", 'font-weight="bold"');

  const slotW = box.w / mcsValues.length;
  const barW = (slotW * 0.8) / combos.length;
  const byKey = new Map<string, number>();
  for (const r of rows) {
    byKey.set(`${num(r, "mcs")}|${r["if_hz"]}/${r["case"]}`, num(r, "throughput_mbps"));
  }
  mcsValues.forEach((mcs) => {
    const x0 = xs.at(mcs) - (barW * combos.length) / 2;
    combos.forEach((combo, ci) => {
      const v = byKey.get(`${mcs}|${combo}`);
      if (v === undefined) return;
      const top = ys.at(v);
      doc.rect(x0 + ci * barW, top, Math.max(barW - 1, 0.5), box.y + box.h - top, PALETTE[ci % PALETTE.length]);
    });
  });
  combos.forEach((combo, ci) => {
    const lx = box.x + 10;
    const ly = box.y + 14 + 14 * ci;
    doc.rect(lx, ly - 8, 10, 10, PALETTE[ci % PALETTE.length]);
    const [ifHz, caseName] = combo.split("/");
    doc.text(lx + 16, ly, `${Number(ifHz) / 1e6} MHz, ${caseName}`);
  });
  return doc.render();
}

/** Dispatch a figure kind to its renderer (1 input file, or 2 for overlays). */
export function renderFigure(kind: FigureKind, inputs: Array<{ label: string; rows: Row[] }>): string {
  if (kind === "metrics_vs_power") {
    if (inputs.length < 1 || inputs.length > 2) {
      throw new SchemaError("metrics_vs_power takes 1 or 2 input CSVs");
    }
    return renderMetricsVsPower(inputs);
  }
  if (inputs.length !== 1) {
    throw new SchemaError(`kind '${kind}' takes exactly 1 input CSV`);
  }
  return kind === "sinr_theta" ? renderSinrTheta(inputs[0].rows) : renderThroughputMcs(inputs[0].rows);
}
