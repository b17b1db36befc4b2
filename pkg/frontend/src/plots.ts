/**
 * The two figure styles the benchmark produces.
 *
 * Spectra figure: every refinement level's singular values overlaid on a
 * semilog-y axis, with the square-root decay law fitted to the finest level
 * and a plain-exponential reference anchored to the coarsest level, which
 * is the visual argument that refinement degrades exponential decay toward
 * the square-root law.
 *
 * Sweep figure: sigma_1 against time on log-log axes with power-law guide
 * lines t^(1-2*alpha) (the predicted small-t growth) and t^(1/2), anchored
 * at the smallest-t data point.
 */

import { writeFileSync } from "node:fs";
import { basename } from "node:path";

import { readSpectrumCsv, readSweepCsv, Spectrum, SweepPoint } from "./csv.js";
import { fitSqrtDecay, fitTimePower, SqrtDecayFit } from "./fit.js";
import {
  decadeTicks,
  drawAxes,
  linearScale,
  linearTicks,
  log10Scale,
  MARGIN,
  seriesColor,
  SvgScene,
} from "./svg.js";

const FLOOR_REL = 1e-14;

export interface SpectraPlotResult {
  svgPath: string;
  fit: SqrtDecayFit;
  levels: number;
}

function levelLabel(path: string): string {
  const name = basename(path).replace(/\.csv$/, "");
  const parts = name.split("_");
  const nx = parts[parts.length - 1];
  return /^\d+$/.test(nx) ? `nx=${nx}` : name;
}

function positive(spectrum: Spectrum): Array<[number, number]> {
  return spectrum.k
    .map((k, i) => [k, spectrum.sigma[i]] as [number, number])
    .filter(([, s]) => s > 0);
}

/**
 * Overlay the spectra of all supplied levels plus the fitted decay law of
 * the finest level and an exponential reference from the coarsest one.
 * Files are ordered by their sigma_1 (levels increase monotonically), so
 * any argument order works.
 */
export function plotSpectra(
  files: string[],
  outImage: string,
  opts: { shift?: number; title?: string } = {},
): SpectraPlotResult {
  if (files.length === 0) throw new Error("no spectra files given");
  const shift = opts.shift ?? 2;
  const spectra = files
    .map((f) => ({ file: f, data: readSpectrumCsv(f) }))
    .sort((a, b) => a.data.sigma[0] - b.data.sigma[0]);
  const finest = spectra[spectra.length - 1].data;
  const coarsest = spectra[0].data;

  const floor = FLOOR_REL * finest.sigma[0];
  const lastAbove = finest.sigma.filter((s) => s > floor).length;
  const fit = fitSqrtDecay(
    finest.sigma,
    shift,
    Math.max(4, shift + 2),
    Math.max(lastAbove, shift + 6),
    floor,
  );

  const kMax = Math.max(...spectra.map(({ data }) => data.k.length));
  const sigMax = finest.sigma[0];
  let sigMin = sigMax;
  for (const { data } of spectra) {
    for (const s of data.sigma) if (s > 0 && s < sigMin) sigMin = s;
  }
  sigMin = Math.max(sigMin, sigMax * 1e-22);

  const scene = new SvgScene();
  const xScale = linearScale([0, kMax + 1], [MARGIN.left, scene.width - MARGIN.right]);
  const yScale = log10Scale(
    [sigMin / 10, sigMax * 10],
    [scene.height - MARGIN.bottom, MARGIN.top],
  );
  drawAxes(scene, xScale, yScale, {
    title: opts.title ?? "Singular values per refinement level",
    xLabel: "k",
    yLabel: "sigma_k",
    xTicks: linearTicks([0, kMax + 1]),
    yTicks: decadeTicks(yScale.domain),
  });

  spectra.forEach(({ file, data }, i) => {
    const pts = positive(data)
      .filter(([, s]) => s >= sigMin / 10)
      .map(([k, s]) => [xScale(k), yScale(s)] as [number, number]);
    const color = seriesColor(i);
    scene.polyline(pts, color, 1.4);
    for (const [x, y] of pts) scene.marker(x, y, color, 1.8);
    scene.text(scene.width - MARGIN.right - 6, MARGIN.top + 14 + 13 * i, levelLabel(file), {
      anchor: "end",
      fill: color,
      size: 10,
    });
  });

  // fitted decay law of the finest level
  const fitPts: Array<[number, number]> = [];
  for (let k = shift + 1; k <= kMax; k++) {
    const s = fit.M * Math.exp(-fit.eta * Math.sqrt(k - shift));
    if (s >= sigMin / 10 && s <= sigMax * 10) fitPts.push([xScale(k), yScale(s)]);
  }
  scene.polyline(fitPts, "#111", 2.0, "6 3");
  scene.text(scene.width - MARGIN.right - 6, MARGIN.top + 14 + 13 * spectra.length,
    `fit: M exp(-${fit.eta.toFixed(2)} sqrt(k-${shift}))`,
    { anchor: "end", size: 10 });

  // plain-exponential reference from the coarsest level's initial decay
  const gamma = Math.log(
    Math.max(coarsest.sigma[0], 1e-300) / Math.max(coarsest.sigma[1] ?? coarsest.sigma[0], 1e-300),
  );
  const refPts: Array<[number, number]> = [];
  for (let k = 1; k <= kMax; k++) {
    const s = coarsest.sigma[0] * Math.exp(-gamma * (k - 1));
    if (s >= sigMin / 10 && s <= sigMax * 10) refPts.push([xScale(k), yScale(s)]);
  }
  scene.polyline(refPts, "#777", 2.0, "2 3");
  scene.text(scene.width - MARGIN.right - 6, MARGIN.top + 27 + 13 * spectra.length,
    `ref: C exp(-${gamma.toFixed(2)} k)`, { anchor: "end", size: 10, fill: "#777" });

  writeFileSync(outImage, scene.render());
  return { svgPath: outImage, fit, levels: spectra.length };
}

export interface SweepPlotResult {
  svgPath: string;
  fittedPower: number;
  guidePower: number | null;
}

/**
 * sigma_1 over time on log-log axes. Guide lines for t^(1-2*alpha) and
 * t^(1/2) are anchored at the smallest-t data point; the primary guide is
 * omitted when alpha >= 1/2 (no growth prediction exists there).
 */
export function plotTimeSweep(
  file: string,
  alpha: number,
  outImage: string,
  opts: { title?: string } = {},
): SweepPlotResult {
  const points: SweepPoint[] = readSweepCsv(file);
  const fitted = fitTimePower(points);
  const guide = alpha < 0.5 ? 1 - 2 * alpha : null;

  const ts = points.map((p) => p.t);
  const ss = points.map((p) => p.sigma1);
  const scene = new SvgScene();
  const xScale = log10Scale(
    [Math.min(...ts) / 1.5, Math.max(...ts) * 1.5],
    [MARGIN.left, scene.width - MARGIN.right],
  );
  const anchor = points[0];
  const guides: Array<{ p: number; label: string; dash: string; color: string }> = [];
  if (guide !== null) {
    guides.push({ p: guide, label: `C t^${guide.toFixed(2)}`, dash: "", color: "#111" });
  }
  guides.push({ p: 0.5, label: "C t^0.50", dash: "6 3", color: "#777" });

  let sMin = Math.min(...ss);
  let sMax = Math.max(...ss);
  for (const g of guides) {
    for (const t of [ts[0], ts[ts.length - 1]]) {
      const v = anchor.sigma1 * (t / anchor.t) ** g.p;
      sMin = Math.min(sMin, v);
      sMax = Math.max(sMax, v);
    }
  }
  const yScale = log10Scale([sMin / 2, sMax * 2], [scene.height - MARGIN.bottom, MARGIN.top]);

  drawAxes(scene, xScale, yScale, {
    title: opts.title ?? "Largest singular value over time",
    xLabel: "t",
    yLabel: "sigma_1",
    xTicks: decadeTicks(xScale.domain),
    yTicks: decadeTicks(yScale.domain),
    xFormat: (v) => v.toExponential(0),
  });

  const dataPts = points.map((p) => [xScale(p.t), yScale(p.sigma1)] as [number, number]);
  scene.polyline(dataPts, seriesColor(0), 1.6);
  for (const [x, y] of dataPts) scene.marker(x, y, seriesColor(0));
  scene.text(scene.width - MARGIN.right - 6, MARGIN.top + 14, `data (p_fit=${fitted.toFixed(2)})`, {
    anchor: "end",
    fill: seriesColor(0),
    size: 10,
  });

  guides.forEach((g, i) => {
    const pts = [ts[0], ts[ts.length - 1]].map(
      (t) =>
        [xScale(t), yScale(anchor.sigma1 * (t / anchor.t) ** g.p)] as [number, number],
    );
    scene.polyline(pts, g.color, 1.8, g.dash);
    scene.text(scene.width - MARGIN.right - 6, MARGIN.top + 27 + 13 * i, g.label, {
      anchor: "end",
      size: 10,
      fill: g.color,
    });
  });

  writeFileSync(outImage, scene.render());
  return { svgPath: outImage, fittedPower: fitted, guidePower: guide };
}
