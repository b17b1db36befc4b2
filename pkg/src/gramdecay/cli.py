"""Command-line entry point for the experiment runner.

Subcommands:
  run             full ladder + finest-level sweep for one example
  sweep-time      finest-level time sweep only
  compare-oracle  low-rank solver vs dense oracle on a small grid
  fit             decay/power fit of an existing CSV output file

Exit codes: 0 when every check passes, 1 when a bound or reference check
fails, 2 on a runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .decay import SingularSpectrum, fit_sqrt_decay, fit_time_power
from .experiments import (
    ExperimentConfig,
    compare_oracle,
    config_from_file,
    run_experiment,
    run_time_sweep,
)


def _build_config(args) -> ExperimentConfig:
    if args.config:
        cfg = config_from_file(args.config, example_id=args.example)
    else:
        cfg = ExperimentConfig(example_id=args.example)
    overrides = {}
    if getattr(args, "output_dir", None):
        overrides["output_dir"] = args.output_dir
    if getattr(args, "levels", None):
        overrides["levels"] = tuple(int(v) for v in args.levels.split(","))
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _cmd_run(args) -> int:
    summary = run_experiment(_build_config(args))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary["all_pass"] else 1


def _cmd_sweep_time(args) -> int:
    report = run_time_sweep(_build_config(args))
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_compare_oracle(args) -> int:
    cfg = _build_config(args)
    if args.nx:
        cfg = dataclasses.replace(cfg, levels=(args.nx,))
    report = compare_oracle(cfg)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_fit(args) -> int:
    path = Path(args.input)
    header = path.read_text().splitlines()[0].strip()
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if header == "k,sigma":
        sigmas = data[:, 1]
        spec = SingularSpectrum(t=float("nan"), level=0, n=0, sigmas=sigmas)
        shift = args.shift
        floor = 1e-14 * sigmas[0] if sigmas.size else 0.0
        k_max = int(np.sum(sigmas > floor))
        fit = fit_sqrt_decay(spec, shift=shift, k_min=max(4, shift + 2),
                             k_max=max(k_max, shift + 6), floor=floor)
        out = {"kind": "sqrt-decay", "M": fit.M, "eta": fit.eta,
               "shift": fit.shift, "k_min": fit.k_min, "k_max": fit.k_max,
               "r2": fit.r2}
    elif header == "t,sigma1":
        out = {"kind": "time-power", "p": fit_time_power(data.tolist())}
    else:
        raise ValueError(f"unrecognized CSV header {header!r}")
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gramdecay",
        description="Low-rank Lyapunov/Riccati benchmark experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--example", type=int, choices=(1, 2, 3, 4), required=False)
        p.add_argument("--config", type=str, default=None, help="YAML config file")
        p.add_argument("--output-dir", type=str, default=None)
        p.add_argument("--levels", type=str, default=None,
                       help="comma-separated nx values, e.g. 8,16,32")

    p_run = sub.add_parser("run", help="run one example's ladder and sweep")
    add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep-time", help="finest-level time sweep only")
    add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep_time)

    p_cmp = sub.add_parser("compare-oracle", help="validate against the dense oracle")
    add_common(p_cmp)
    p_cmp.add_argument("--nx", type=int, default=None, help="single small level")
    p_cmp.set_defaults(func=_cmd_compare_oracle)

    p_fit = sub.add_parser("fit", help="fit an existing spectra/sweep CSV")
    p_fit.add_argument("--input", type=str, required=True)
    p_fit.add_argument("--shift", type=int, default=2)
    p_fit.set_defaults(func=_cmd_fit)

    args = parser.parse_args(argv)
    if args.command != "fit" and not args.config and args.example is None:
        parser.error("--example is required when no config file is given")
    try:
        return args.func(args)
    except Exception as exc:  # surface as exit code 2 per the CLI contract
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
