import { mkdtempSync, readFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { readSpectrumCsv, readSweepCsv } from "../src/csv.js";
import { plotSpectra, plotTimeSweep } from "../src/plots.js";

const FIXTURES = join(__dirname, "..", "fixtures");
const outDir = mkdtempSync(join(tmpdir(), "gramdecay-plots-"));

const spectraFiles = (ex: number, levels: number[]) =>
  levels.map((nx) => join(FIXTURES, `spectra_${ex}_${nx}.csv`));

function countPolylines(svg: string): number {
  return (svg.match(/<polyline /g) ?? []).length;
}

describe("plotSpectra", () => {
  it("renders one curve per level plus fit and reference overlays", () => {
    const files = spectraFiles(1, [8, 16, 32, 64, 128]);
    const out = join(outDir, "fig_example1.svg");
    const result = plotSpectra(files, out, { shift: 2 });
    expect(existsSync(out)).toBe(true);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
    // 5 level curves + fitted decay law + exponential reference
    expect(countPolylines(svg)).toBe(7);
    expect(result.levels).toBe(5);
    expect(result.fit.eta).toBeGreaterThan(0);
    expect(result.fit.r2).toBeGreaterThan(0.9);
  });

  it("orders levels bottom-to-top regardless of argument order", () => {
    const files = spectraFiles(1, [128, 8, 64, 16, 32]);
    const out = join(outDir, "fig_example1_shuffled.svg");
    const result = plotSpectra(files, out);
    const svg = readFileSync(out, "utf8");
    const labels = [...svg.matchAll(/nx=(\d+)/g)].map((m) => Number(m[1]));
    expect(labels).toEqual([8, 16, 32, 64, 128]);
    expect(result.levels).toBe(5);
  });

  it("handles a single level with fit overlay", () => {
    const out = join(outDir, "fig_example2.svg");
    const result = plotSpectra(spectraFiles(2, [128]), out);
    const svg = readFileSync(out, "utf8");
    expect(countPolylines(svg)).toBe(3); // data + fit + reference
    expect(result.levels).toBe(1);
  });

  it("renders the rough-output example's spectrum", () => {
    const out = join(outDir, "fig_example3.svg");
    const result = plotSpectra(spectraFiles(3, [128]), out);
    expect(result.levels).toBe(1);
    expect(result.fit.eta).toBeGreaterThan(0);
  });

  it("renders the ill-posed example's ladder", () => {
    const out = join(outDir, "fig_example4.svg");
    const result = plotSpectra(spectraFiles(4, [8, 16, 32, 64, 128]), out);
    expect(result.levels).toBe(5);
    expect(existsSync(out)).toBe(true);
  });

  it("rejects empty input", () => {
    expect(() => plotSpectra([], join(outDir, "nope.svg"))).toThrow(/no spectra/);
  });
});

describe("plotTimeSweep", () => {
  it("example 2: unit guide slope hugs the fitted power", () => {
    const out = join(outDir, "sweep_example2.svg");
    const result = plotTimeSweep(join(FIXTURES, "sweep_2.csv"), 0.0, out);
    expect(result.guidePower).toBe(1.0);
    expect(Math.abs(result.fittedPower - result.guidePower!)).toBeLessThanOrEqual(0.1);
    expect(existsSync(out)).toBe(true);
  });

  it("example 3: half-power guide hugs the fitted power", () => {
    const out = join(outDir, "sweep_example3.svg");
    const result = plotTimeSweep(join(FIXTURES, "sweep_3.csv"), 0.25, out);
    expect(result.guidePower).toBeCloseTo(0.5, 10);
    expect(Math.abs(result.fittedPower - result.guidePower!)).toBeLessThanOrEqual(0.1);
  });

  it("omits the growth guide outside the admissible range", () => {
    const out = join(outDir, "sweep_example4.svg");
    const result = plotTimeSweep(join(FIXTURES, "sweep_4.csv"), 0.75, out);
    expect(result.guidePower).toBeNull();
    expect(existsSync(out)).toBe(true);
  });

  it("renders the uncontrolled example's sweep", () => {
    // strong damping curves the small-t data away from the asymptotic
    // power here, so only the rendering inventory is asserted
    const out = join(outDir, "sweep_example1.svg");
    const result = plotTimeSweep(join(FIXTURES, "sweep_1.csv"), 0.0, out);
    expect(result.guidePower).toBe(1.0);
    expect(result.fittedPower).toBeGreaterThan(0.8);
    expect(existsSync(out)).toBe(true);
  });

  it("synthetic linear data overlays its guide exactly", async () => {
    const { writeFileSync } = await import("node:fs");
    const path = join(outDir, "synthetic_sweep.csv");
    const ts = Array.from({ length: 9 }, (_, j) => 0.1 * 2 ** -(8 - j));
    const body = ts.map((t) => `${t},${t}`).join("\n");
    writeFileSync(path, `t,sigma1\n${body}\n`);
    const out = join(outDir, "sweep_synthetic.svg");
    const result = plotTimeSweep(path, 0.0, out);
    expect(result.fittedPower).toBeCloseTo(1.0, 8);
    const svg = readFileSync(out, "utf8");
    // data polyline and the t^1 guide coincide: same endpoints
    const polylines = [...svg.matchAll(/<polyline points="([^"]+)"/g)].map((m) => m[1]);
    const dataEnds = polylines[0].split(" ");
    const guideEnds = polylines[1].split(" ");
    expect(guideEnds[0]).toBe(dataEnds[0]);
    expect(guideEnds[guideEnds.length - 1]).toBe(dataEnds[dataEnds.length - 1]);
  });
});

describe("csv readers", () => {
  it("round-trips a spectra fixture", () => {
    const spec = readSpectrumCsv(join(FIXTURES, "spectra_1_128.csv"));
    expect(spec.k[0]).toBe(1);
    expect(spec.sigma[0]).toBeGreaterThan(spec.sigma[1]);
  });

  it("round-trips a sweep fixture", () => {
    const pts = readSweepCsv(join(FIXTURES, "sweep_2.csv"));
    expect(pts.length).toBe(9);
    expect(pts[0].t).toBeLessThan(pts[1].t);
  });

  it("rejects a wrong header", async () => {
    const { writeFileSync } = await import("node:fs");
    const path = join(outDir, "bad.csv");
    writeFileSync(path, "a,b\n1,2\n");
    expect(() => readSpectrumCsv(path)).toThrow(/expected header/);
  });
});
