/**
 * The two fits the figures overlay: a square-root-exponential decay law for
 * spectra and a small-t power law for sigma_1 growth. Both mirror the
 * solver's analysis conventions so the plotted curves agree with the
 * summary files.
 */

export interface SqrtDecayFit {
  M: number;
  eta: number;
  shift: number;
  kMin: number;
  kMax: number;
  r2: number;
}

function leastSquares(x: number[], y: number[]): { slope: number; intercept: number; r2: number } {
  const n = x.length;
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) ** 2;
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) ** 2;
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  const r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1;
  return { slope, intercept, r2 };
}

/**
 * Ordinary least squares of ln(sigma_k) against sqrt(k - shift) over
 * k in [kMin, kMax], ignoring entries at or below `floor` (the round-off
 * plateau). Needs at least 4 usable points.
 */
export function fitSqrtDecay(
  sigma: number[],
  shift: number,
  kMin: number,
  kMax: number,
  floor: number,
): SqrtDecayFit {
  if (kMin <= shift) throw new Error(`kMin=${kMin} must exceed shift=${shift}`);
  const xs: number[] = [];
  const ys: number[] = [];
  for (let k = kMin; k <= Math.min(kMax, sigma.length); k++) {
    const s = sigma[k - 1];
    if (s > floor) {
      xs.push(Math.sqrt(k - shift));
      ys.push(Math.log(s));
    }
  }
  if (xs.length < 4) {
    throw new Error(`only ${xs.length} points above the floor in [${kMin}, ${kMax}]`);
  }
  const { slope, intercept, r2 } = leastSquares(xs, ys);
  return { M: Math.exp(intercept), eta: -slope, shift, kMin, kMax, r2 };
}

/**
 * Slope of ln(sigma_1) vs ln(t) on the smallest half of the t values
 * (rounded up): growth powers are small-t statements and the data
 * saturates at larger times.
 */
export function fitTimePower(points: Array<{ t: number; sigma1: number }>): number {
  if (points.length < 3) throw new Error("need at least 3 sweep points");
  const sorted = [...points].sort((a, b) => a.t - b.t);
  const nUse = Math.ceil(sorted.length / 2);
  const xs = sorted.slice(0, nUse).map((p) => Math.log(p.t));
  const ys = sorted.slice(0, nUse).map((p) => Math.log(p.sigma1));
  return leastSquares(xs, ys).slope;
}
