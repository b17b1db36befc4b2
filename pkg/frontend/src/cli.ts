/**
 * Standalone plot generator for solver CLI outputs.
 *
 *   node dist/cli.js spectra --out fig.svg [--shift 2] spectra_1_8.csv ...
 *   node dist/cli.js sweep   --out fig.svg --alpha 0.25 sweep_3.csv
 */

import { parseArgs } from "node:util";

import { plotSpectra, plotTimeSweep } from "./plots.js";

function usage(): never {
  console.error(
    [
      "usage:",
      "  plot spectra --out FILE.svg [--shift N] [--title T] SPECTRA.csv [...]",
      "  plot sweep   --out FILE.svg --alpha A [--title T] SWEEP.csv",
    ].join("\n"),
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command === "spectra") {
    const { values, positionals } = parseArgs({
      args: rest,
      allowPositionals: true,
      options: {
        out: { type: "string" },
        shift: { type: "string", default: "2" },
        title: { type: "string" },
      },
    });
    if (!values.out || positionals.length === 0) usage();
    const result = plotSpectra(positionals, values.out, {
      shift: Number(values.shift),
      title: values.title,
    });
    console.log(
      `wrote ${result.svgPath}: ${result.levels} level(s), ` +
        `eta=${result.fit.eta.toFixed(3)}, r2=${result.fit.r2.toFixed(3)}`,
    );
    return 0;
  }
  if (command === "sweep") {
    const { values, positionals } = parseArgs({
      args: rest,
      allowPositionals: true,
      options: {
        out: { type: "string" },
        alpha: { type: "string" },
        title: { type: "string" },
      },
    });
    if (!values.out || values.alpha === undefined || positionals.length !== 1) usage();
    const result = plotTimeSweep(positionals[0], Number(values.alpha), values.out, {
      title: values.title,
    });
    const guide = result.guidePower === null ? "none" : result.guidePower.toFixed(2);
    console.log(
      `wrote ${result.svgPath}: fitted p=${result.fittedPower.toFixed(3)}, guide slope ${guide}`,
    );
    return 0;
  }
  usage();
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js");
if (invokedDirectly) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(2);
  }
}
