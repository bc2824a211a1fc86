import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { parseCsv } from "../src/schema.js";
import {
  METRIC_PANELS,
  renderFigure,
  renderMetricsVsPower,
  renderSinrTheta,
  renderThroughputMcs,
} from "../src/render.js";

const FIXTURES = join(__dirname, "fixtures");

function fixtureRows(kind: "sinr_theta" | "metrics_vs_power" | "throughput_mcs", file: string) {
  return parseCsv(readFileSync(join(FIXTURES, file), "utf8"), kind);
}

describe("renderSinrTheta", () => {
  const svg = renderSinrTheta(fixtureRows("sinr_theta", "sinr_theta.csv"));

  it("produces a well-formed SVG with axis labels", () => {
    expect(svg).toMatch(/^<svg /);
    expect(svg.trimEnd()).toMatch(/<\/svg>$/);
    expect(svg).toContain("steering angle (deg)");
    expect(svg).toContain("SINR (dB)");
  });

  it("draws one polyline per candidate plus a bold envelope", () => {
    const rows = fixtureRows("sinr_theta", "sinr_theta.csv");
    const nCurves = new Set(rows.map((r) => r["candidate_id"])).size;
    const polylines = svg.match(/<polyline /g) ?? [];
    expect(polylines.length).toBe(nCurves);
    expect(svg).toContain('stroke="black" stroke-width="2.500"');
    expect(svg).toContain(">envelope</text>");
  });
});

describe("renderMetricsVsPower", () => {
  const s50 = { label: "metrics_50m", rows: fixtureRows("metrics_vs_power", "metrics_50m.csv") };
  const s15 = { label: "metrics_15m", rows: fixtureRows("metrics_vs_power", "metrics_15m.csv") };

  it("renders six labelled panels", () => {
    const svg = renderMetricsVsPower([s50]);
    const frames = svg.match(/fill="none" stroke="black" stroke-width="0\.8"/g) ?? [];
    expect(frames.length).toBe(6);
    for (const panel of METRIC_PANELS) {
      expect(svg).toContain(`>${panel.label}</text>`);
    }
    expect(svg).toContain("input_power_dbm");
  });

  it("marks the -25 dB EVM threshold", () => {
    const svg = renderMetricsVsPower([s50]);
    expect(svg).toContain("-25 dB limit");
    expect(svg).toContain('stroke-dasharray="5 3"');
  });

  it("overlays two series with a legend entry each", () => {
    const svg = renderMetricsVsPower([s50, s15]);
    expect(svg).toContain(">metrics_50m</text>");
    expect(svg).toContain(">metrics_15m</text>");
    const curves = svg.match(/stroke-width="1\.600"/g) ?? [];
    expect(curves.length).toBe(2 * METRIC_PANELS.length);
  });

  it("rejects zero or three inputs via renderFigure", () => {
    expect(() => renderFigure("metrics_vs_power", [])).toThrowError(/1 or 2/);
    expect(() => renderFigure("metrics_vs_power", [s50, s15, s50])).toThrowError(/1 or 2/);
  });
});

describe("renderThroughputMcs", () => {
  const rows = fixtureRows("throughput_mcs", "throughput_mcs.csv");
  const svg = renderThroughputMcs(rows);

  it("labels the axes and title", () => {
    expect(svg).toContain("MCS index");
    expect(svg).toContain("throughput (Mbps)");
    expect(svg).toContain("Throughput vs MCS");
  });

  it("draws one bar per CSV row plus legend swatches", () => {
    const combos = new Set(rows.map((r) => `${r["if_hz"]}/${r["case"]}`)).size;
    const bars = (svg.match(/<rect /g) ?? []).length;
    // background + panel frame are rects too: rows + legend swatches + 2
    expect(bars).toBe(rows.length + combos + 2);
    expect(svg).toContain("75 MHz, clean");
    expect(svg).toContain("175 MHz, coex");
  });
});

describe("determinism", () => {
  it("renders byte-identical SVG on repeated calls", () => {
    for (let i = 0; i < 2; i++) {
      const a = renderSinrTheta(fixtureRows("sinr_theta", "sinr_theta.csv"));
      const b = renderSinrTheta(fixtureRows("sinr_theta", "sinr_theta.csv"));
      expect(a).toBe(b);
    }
    const m1 = renderMetricsVsPower([
      { label: "x", rows: fixtureRows("metrics_vs_power", "metrics_50m.csv") },
    ]);
    const m2 = renderMetricsVsPower([
      { label: "x", rows: fixtureRows("metrics_vs_power", "metrics_50m.csv") },
    ]);
    expect(m1).toBe(m2);
  });
});
