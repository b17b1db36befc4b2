"""Batch runner for the four unit-square benchmark problems.

For each refinement level the configured example system is assembled and
solved (closed-form Gramian factor when there is no input, Strang-split
Riccati marching otherwise), spectra are extracted at the final time, and
on the finest level a dyadic time sweep, a square-root decay fit and the
bound check are added.  Results land in plain CSV/JSON files; the summary
carries per-level leading singular values, the fitted constants and a set
of pass/fail checks anchored to the converged reference values of the
benchmark (largest singular values, small-t growth powers, per-level
growth for the ill-posed case).

Everything in the default path is deterministic: fixed evaluation order
and no randomized algorithms, so identical configurations reproduce the
data files byte for byte (the summary's runtime field excepted).
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as la
import yaml

from .decay import SingularSpectrum, check_thm_bound, fit_sqrt_decay, fit_time_power
from .dle import DleSincParams, dle_sinc_factor
from .dre import SplittingConfig, solve
from .grids import DiscretizedSystem, assemble_example
from .krylov import ExpmConfig
from .lowrank import LowRankFactor
from .oracle import dense_dle, dense_dre
from .sincquad import DEFAULT_D, min_m

# Converged reference values of the benchmark problems (finest-level top
# singular values at T = 0.1 and the observed small-t growth behaviour),
# with the acceptance tolerances around them.
REFERENCE_SIGMA1 = {1: 0.0167962353514286, 2: 0.0654816392477379, 3: 0.320176547367678}
REFERENCE_SIGMA2_EX1 = 4.17148558625769e-04
SIGMA1_RTOL = {1: 0.03, 2: 0.05, 3: 0.10}
POWER_RANGE = {2: (0.85, 1.10), 3: (0.40, 0.65)}
EX1_FIT_WINDOW = (4, 24)
EX1_R2_MIN = 0.95
EX4_GROWTH_MIN = 1.5
EX4_MIN_RATIOS = 4


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs for one experiment run; defaults reproduce the benchmark."""

    example_id: int
    levels: tuple = (8, 16, 32, 64, 128)
    T: float = 0.1
    n_steps: int = 256
    time_sweep: tuple | None = None  # default: T * 2^-j, j = 0..8
    compress_tol: float = 1e-14
    expm_tol: float = 1e-4
    expm_max_basis: int = 800
    sinc_m: int | None = None  # default: accuracy-targeted per solver path
    d: float = DEFAULT_D
    max_rank: int | None = None  # default: capped only for the ill-posed example
    fit_floor_rel: float | None = None  # default: per solver path
    bound_tol_factor: float = 4.0
    output_dir: str = "outputs"

    def __post_init__(self):
        if self.example_id not in (1, 2, 3, 4):
            raise ValueError(f"example_id must be 1..4, got {self.example_id}")
        if self.T <= 0.0:
            raise ValueError(f"final time T must be positive, got {self.T}")
        levels = tuple(int(v) for v in self.levels)
        if list(levels) != sorted(levels) or len(set(levels)) != len(levels):
            raise ValueError("levels must be strictly ascending")
        object.__setattr__(self, "levels", levels)
        if self.time_sweep is not None:
            sweep = tuple(float(t) for t in self.time_sweep)
            if any(not (0.0 < t <= self.T) for t in sweep):
                raise ValueError("time_sweep values must lie in (0, T]")
            object.__setattr__(self, "time_sweep", sweep)

    @property
    def sweep(self) -> tuple:
        if self.time_sweep is not None:
            return self.time_sweep
        return tuple(self.T * 2.0 ** (-j) for j in range(9))

    def is_lyapunov(self) -> bool:
        return self.example_id == 1


def _auto_m(d: float, rho: float, target: float) -> int:
    """Node count driving the quadrature error estimate below ``target``."""
    need = math.ceil(math.log(1.0 / target) ** 2 / (2.0 * math.pi * d * rho))
    return max(min_m(d, rho), need)


def _solver_m(cfg: ExperimentConfig, sys: DiscretizedSystem, sweep: bool = False) -> int:
    if cfg.sinc_m is not None:
        return cfg.sinc_m
    alpha = sys.alpha if sys.alpha < 0.5 else 0.0
    rho = 1.0 - 2.0 * alpha
    if cfg.is_lyapunov():
        if sweep:
            # Sweep points only feed sigma_1(t); seven digits is plenty.
            return _auto_m(cfg.d, rho, 1e-7)
        # Closed-form path at the final time: push quadrature truncation to
        # round-off so the figure-level spectra resolve their full decay range.
        return _auto_m(cfg.d, rho, 1e-15)
    # Per-step Gramian: splitting error dominates well before 1e-7.
    return _auto_m(cfg.d, rho, 1e-7)


def _expm_config(cfg: ExperimentConfig) -> ExpmConfig:
    return ExpmConfig(tol=cfg.expm_tol, max_basis=cfg.expm_max_basis)


def _floor_rel(cfg: ExperimentConfig) -> float:
    if cfg.fit_floor_rel is not None:
        return cfg.fit_floor_rel
    # The closed-form path resolves the spectrum to round-off; the marching
    # path inherits the 1e-4 residual tolerance of its exponential actions,
    # so its trustworthy range is correspondingly shorter.
    return 1e-14 if cfg.is_lyapunov() else 1e-8


def _max_rank(cfg: ExperimentConfig) -> int | None:
    if cfg.max_rank is not None:
        return cfg.max_rank
    return 120 if cfg.example_id == 4 else None


def _splitting_config(cfg: ExperimentConfig, sys: DiscretizedSystem, sample_times) -> SplittingConfig:
    return SplittingConfig(
        sinc_m=_solver_m(cfg, sys),
        n_steps=cfg.n_steps,
        compress_tol=cfg.compress_tol,
        sinc_d=cfg.d,
        expm=_expm_config(cfg),
        sample_times=tuple(sample_times),
        max_rank=_max_rank(cfg),
    )


def _lyapunov_factor(
    cfg: ExperimentConfig, sys: DiscretizedSystem, t: float, sweep: bool = False
) -> LowRankFactor:
    params = DleSincParams(m=_solver_m(cfg, sys, sweep=sweep), d=cfg.d, alpha=sys.alpha)
    return dle_sinc_factor(sys, t, params, expm_cfg=_expm_config(cfg))


def _solve_level(cfg: ExperimentConfig, sys: DiscretizedSystem, sample_times):
    """Factors at the requested times, as {time: factor}."""
    if cfg.is_lyapunov():
        t_final = max(sample_times)
        return {
            t: _lyapunov_factor(cfg, sys, t, sweep=t != t_final)
            for t in sorted(sample_times)
        }
    traj = solve(sys, LowRankFactor.zero(sys.n), cfg.T,
                 _splitting_config(cfg, sys, sample_times))
    return dict(zip(traj.times, traj.factors))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_spectrum_csv(path: Path, sigmas: np.ndarray) -> None:
    lines = ["k,sigma"]
    lines += [f"{k},{_fmt(s)}" for k, s in enumerate(sigmas, start=1)]
    path.write_text("\n".join(lines) + "\n")


def _write_sweep_csv(path: Path, pairs) -> None:
    lines = ["t,sigma1"]
    lines += [f"{_fmt(t)},{_fmt(s)}" for t, s in pairs]
    path.write_text("\n".join(lines) + "\n")


def _check(value: float, lo: float, hi: float | None) -> dict:
    ok = lo <= value and (hi is None or value <= hi)
    return {"passed": bool(ok), "value": float(value),
            "target": [float(lo), None if hi is None else float(hi)]}


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run the configured ladder and sweep; write outputs; return the summary.

    Per-level failures are recorded in the summary and do not abort the
    remaining levels.
    """
    t0 = time.perf_counter()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ex = cfg.example_id
    floor_rel = _floor_rel(cfg)

    level_records = []
    finest_spec: SingularSpectrum | None = None
    sweep_pairs: list[tuple[float, float]] = []
    sigma1_by_level: dict[int, float] = {}

    for li, nx in enumerate(cfg.levels):
        finest = li == len(cfg.levels) - 1
        record: dict = {"nx": nx, "n": nx * nx}
        try:
            sys = assemble_example(ex, nx, nx)
            times = set(cfg.sweep) | {cfg.T} if finest else {cfg.T}
            factors = _solve_level(cfg, sys, times)
            final = factors[max(factors)]
            sigmas = final.singular_values()
            record["rank"] = int(final.rank)
            record["sigma1"] = float(sigmas[0]) if sigmas.size else 0.0
            record["sigma2"] = float(sigmas[1]) if sigmas.size > 1 else 0.0
            sigma1_by_level[nx] = record["sigma1"]
            spath = out / f"spectra_{ex}_{nx}.csv"
            _write_spectrum_csv(spath, sigmas)
            record["spectrum_file"] = spath.name
            if finest:
                finest_spec = SingularSpectrum(t=cfg.T, level=li, n=nx * nx, sigmas=sigmas)
                sweep_pairs = sorted(
                    (t, float(f.singular_values()[0])) for t, f in factors.items() if t > 0
                )
                wpath = out / f"sweep_{ex}.csv"
                _write_sweep_csv(wpath, sweep_pairs)
                record["sweep_file"] = wpath.name
        except Exception as exc:  # keep the remaining levels running
            record["error"] = f"{type(exc).__name__}: {exc}"
        level_records.append(record)

    summary: dict = {
        "example": ex,
        "T": cfg.T,
        "n_steps": cfg.n_steps,
        "solver_path": "lyapunov-closed-form" if cfg.is_lyapunov() else "riccati-strang",
        "levels": level_records,
        "checks": {},
    }

    checks = summary["checks"]
    if finest_spec is not None:
        s = finest_spec.sigmas
        floor = floor_rel * s[0] if s.size else 0.0
        if ex in REFERENCE_SIGMA1:
            ref, rt = REFERENCE_SIGMA1[ex], SIGMA1_RTOL[ex]
            checks["sigma1_T"] = _check(s[0], ref * (1 - rt), ref * (1 + rt))
        if ex == 1 and s.size > 1:
            ref = REFERENCE_SIGMA2_EX1
            checks["sigma2_T"] = _check(s[1], ref * 0.95, ref * 1.05)
        if ex in (1, 2, 3):
            shift = 2  # 2 * dim Y + dim Z with one output, no terminal penalty
            k_min = max(shift + 2, 4)
            k_max = EX1_FIT_WINDOW[1] if ex == 1 else int(np.sum(s > floor))
            k_max = min(k_max, s.size)
            try:
                fit = fit_sqrt_decay(finest_spec, shift=shift, k_min=k_min,
                                     k_max=k_max, floor=floor)
                summary["fit"] = {
                    "M": fit.M, "eta": fit.eta, "shift": fit.shift,
                    "k_min": fit.k_min, "k_max": fit.k_max, "r2": fit.r2,
                }
                if ex == 1:
                    checks["spectrum_r2"] = _check(fit.r2, EX1_R2_MIN, 1.0)
                bound = check_thm_bound(
                    finest_spec, fit, t=cfg.T, alpha=0.0 if ex != 3 else 0.25,
                    dim_y=1, dim_z=0, tol_factor=cfg.bound_tol_factor, floor=floor,
                )
                summary["bound"] = {
                    "tol_factor": bound.tol_factor,
                    "flagged": list(bound.flagged),
                    "min_margin": min(bound.margins) if bound.margins else None,
                    "M_normalized": bound.M_normalized,
                }
                checks["bound_check"] = {
                    "passed": bound.ok,
                    "value": min(bound.margins) if bound.margins else 0.0,
                    "target": [0.0, None],
                }
            except ValueError as exc:
                summary["fit_error"] = str(exc)
        if ex in POWER_RANGE and len(sweep_pairs) >= 3:
            p = fit_time_power(sweep_pairs)
            summary["time_power"] = p
            checks["time_power"] = _check(p, *POWER_RANGE[ex])

    if ex == 4:
        sig = [sigma1_by_level[nx] for nx in cfg.levels if nx in sigma1_by_level]
        ratios = [b / a for a, b in zip(sig, sig[1:]) if a > 0]
        summary["growth_ratios"] = ratios
        enough = len(ratios) >= EX4_MIN_RATIOS
        checks["sigma1_growth"] = {
            "passed": bool(enough and all(r >= EX4_GROWTH_MIN for r in ratios)),
            "value": min(ratios) if ratios else 0.0,
            "target": [EX4_GROWTH_MIN, None],
        }

    summary["all_pass"] = all(c["passed"] for c in checks.values()) and not any(
        "error" in r for r in level_records
    )
    summary["runtime_seconds"] = round(time.perf_counter() - t0, 3)
    (out / f"summary_{ex}.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    return summary


def run_time_sweep(cfg: ExperimentConfig) -> dict:
    """Finest-level time sweep only: writes the sweep CSV, fits the power."""
    sub = dataclasses.replace(cfg, levels=(cfg.levels[-1],))
    nx = sub.levels[0]
    sys = assemble_example(sub.example_id, nx, nx)
    factors = _solve_level(sub, sys, set(sub.sweep))
    pairs = sorted((t, float(f.singular_values()[0])) for t, f in factors.items() if t > 0)
    out = Path(sub.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_sweep_csv(out / f"sweep_{sub.example_id}.csv", pairs)
    return {
        "example": sub.example_id,
        "nx": nx,
        "sweep": [[t, s] for t, s in pairs],
        "time_power": fit_time_power(pairs) if len(pairs) >= 3 else None,
    }


def compare_oracle(cfg: ExperimentConfig, oracle_rtol: float = 1e-8) -> dict:
    """Low-rank solver against the dense oracle on small levels.

    Reports the spectral-norm relative error and the absolute errors of the
    top ten singular values, per level.  Levels must satisfy the oracle's
    size cap (nx <= 16).  The low-rank solver runs with its exponential
    actions tightened well below the comparison tolerances, whatever the
    production default is.
    """
    cfg = dataclasses.replace(cfg, expm_tol=min(cfg.expm_tol, 1e-9))
    reports = []
    for nx in cfg.levels:
        if nx > 16:
            raise ValueError(f"oracle comparison restricted to nx <= 16, got {nx}")
        sys = assemble_example(cfg.example_id, nx, nx)
        factors = _solve_level(cfg, sys, {cfg.T})
        P_lr = factors[max(factors)].dense()
        if cfg.is_lyapunov():
            P_ref = dense_dle(sys, cfg.T)
        else:
            P_ref = dense_dre(sys, cfg.T, rtol=oracle_rtol)
        denom = la.norm(P_ref, 2)
        rel = float(la.norm(P_lr - P_ref, 2) / denom) if denom > 0 else 0.0
        s_lr = np.sort(np.abs(la.eigvalsh(P_lr)))[::-1][:10]
        s_ref = np.sort(np.abs(la.eigvalsh(P_ref)))[::-1][:10]
        width = min(len(s_lr), len(s_ref))
        reports.append({
            "nx": nx,
            "rel_spectral_error": rel,
            "sigma_abs_errors": np.abs(s_lr[:width] - s_ref[:width]).tolist(),
        })
    return {"example": cfg.example_id, "T": cfg.T, "levels": reports}


# Config-file schema: section -> allowed keys -> ExperimentConfig field.
_CONFIG_SCHEMA = {
    "experiment": {
        "example_id": "example_id",
        "levels": "levels",
        "T": "T",
        "time_sweep": "time_sweep",
    },
    "solver": {
        "n_steps": "n_steps",
        "compress_tol": "compress_tol",
        "expm_tol": "expm_tol",
        "expm_max_basis": "expm_max_basis",
        "sinc_m": "sinc_m",
        "d": "d",
        "max_rank": "max_rank",
    },
    "analysis": {
        "fit_floor_rel": "fit_floor_rel",
        "bound_tol_factor": "bound_tol_factor",
    },
    "output": {
        "dir": "output_dir",
    },
}


def config_from_file(path, example_id: int | None = None) -> ExperimentConfig:
    """Build a config from a YAML file of nested key/value sections.

    Every field is optional (defaults apply); unknown sections or keys are
    rejected.  example_id may come from the file or the argument, with the
    argument taking precedence.
    """
    raw = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a mapping of sections")
    kwargs: dict = {}
    for section, content in raw.items():
        if section not in _CONFIG_SCHEMA:
            raise ValueError(f"unknown config section {section!r}")
        if not isinstance(content, dict):
            raise ValueError(f"section {section!r} must be a mapping")
        for key, value in content.items():
            field = _CONFIG_SCHEMA[section].get(key)
            if field is None:
                raise ValueError(f"unknown key {key!r} in section {section!r}")
            if isinstance(value, list):
                value = tuple(value)
            kwargs[field] = value
    if example_id is not None:
        kwargs["example_id"] = example_id
    if "example_id" not in kwargs:
        raise ValueError("example_id missing: pass --example or set it in the file")
    return ExperimentConfig(**kwargs)
