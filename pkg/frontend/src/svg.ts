/**
 * A small SVG scene builder: enough axes, ticks, polylines and labels for
 * semilog and log-log convergence figures, with no DOM dependency.
 */

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const f = ((value: number) => r0 + ((value - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  f.domain = domain;
  return f;
}

export function log10Scale(domain: [number, number], range: [number, number]): Scale {
  const inner = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  const f = ((value: number) => inner(Math.log10(value))) as Scale;
  f.domain = domain;
  return f;
}

export function decadeTicks(domain: [number, number]): number[] {
  const lo = Math.ceil(Math.log10(domain[0]) - 1e-9);
  const hi = Math.floor(Math.log10(domain[1]) + 1e-9);
  const ticks: number[] = [];
  const step = Math.max(1, Math.ceil((hi - lo) / 8));
  for (let e = lo; e <= hi; e += step) ticks.push(10 ** e);
  return ticks;
}

export function linearTicks(domain: [number, number], count = 7): number[] {
  const span = domain[1] - domain[0];
  const raw = span / count;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count) ?? mag * 10;
  const ticks: number[] = [];
  for (let v = Math.ceil(domain[0] / step) * step; v <= domain[1] + 1e-12; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

const PALETTE = ["#1b6ca8", "#2a9d8f", "#e9c46a", "#f4a261", "#e76f51", "#9b5de5", "#444444"];

export function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export class SvgScene {
  readonly width: number;
  readonly height: number;
  private parts: string[] = [];

  constructor(width = 720, height = 460) {
    this.width = width;
    this.height = height;
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#000", width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${x1.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" y2="${y2.toFixed(2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    if (points.length === 0) return;
    const pts = points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  marker(x: number, y: number, fill: string, r = 2.6): void {
    this.parts.push(`<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, opts: { size?: number; anchor?: string; fill?: string; rotate?: number } = {}): void {
    const { size = 11, anchor = "start", fill = "#222", rotate } = opts;
    const transform = rotate !== undefined ? ` transform="rotate(${rotate} ${x} ${y})"` : "";
    this.parts.push(
      `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" font-size="${size}" text-anchor="${anchor}" fill="${fill}" font-family="sans-serif"${transform}>${esc(content)}</text>`,
    );
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

export interface AxesOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  xTicks: number[];
  yTicks: number[];
  xFormat?: (v: number) => string;
  yFormat?: (v: number) => string;
}

export const MARGIN = { left: 64, right: 16, top: 34, bottom: 44 };

export function drawAxes(scene: SvgScene, xScale: Scale, yScale: Scale, opts: AxesOptions): void {
  const x0 = MARGIN.left;
  const x1 = scene.width - MARGIN.right;
  const y0 = scene.height - MARGIN.bottom;
  const y1 = MARGIN.top;
  scene.line(x0, y0, x1, y0);
  scene.line(x0, y0, x0, y1);
  const fmtX = opts.xFormat ?? ((v: number) => String(v));
  const fmtY = opts.yFormat ?? ((v: number) => v.toExponential(0));
  for (const tick of opts.xTicks) {
    const px = xScale(tick);
    scene.line(px, y0, px, y0 + 4);
    scene.line(px, y0, px, y1, "#eee", 0.6);
    scene.text(px, y0 + 16, fmtX(tick), { anchor: "middle" });
  }
  for (const tick of opts.yTicks) {
    const py = yScale(tick);
    scene.line(x0 - 4, py, x0, py);
    scene.line(x0, py, x1, py, "#eee", 0.6);
    scene.text(x0 - 7, py + 3.5, fmtY(tick), { anchor: "end", size: 10 });
  }
  scene.text((x0 + x1) / 2, scene.height - 10, opts.xLabel, { anchor: "middle", size: 12 });
  scene.text(14, (y0 + y1) / 2, opts.yLabel, { anchor: "middle", size: 12, rotate: -90 });
  scene.text((x0 + x1) / 2, 20, opts.title, { anchor: "middle", size: 14 });
}
