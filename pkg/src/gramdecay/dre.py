"""Strang-splitting time integration of low-rank Riccati equations.

The flow is split into the affine Lyapunov part (two-sided semigroup
conjugation plus the per-step output Gramian, handled in closed form) and
the quadratic part P' = -P B B^T P, whose exact flow only updates the small
core.  One step of size tau composes quadratic half-steps around a full
affine step; the composition is second order, and for a zero input it
degenerates to the exact Lyapunov propagation.  The per-step Gramian factor
is built once by the sinc rule and reused, since the systems here are time
invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .dle import DleSincParams, dle_sinc_factor
from .grids import DiscretizedSystem
from .krylov import ExpmConfig, expm_action
from .lowrank import LowRankFactor, concat
from .sincquad import DEFAULT_D


class DivergenceError(RuntimeError):
    """The iteration produced non-finite values at some step."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class SplittingConfig:
    """Controls for ``solve``.

    sinc_m sets the node count of the per-step Gramian factor;
    compress_tol is the relative truncation level applied after every step
    (round-off level by default); sample_times lists the times at which
    snapshots are kept (final time only if omitted); max_rank optionally
    caps the retained rank, for problems that are expected to blow up.
    """

    sinc_m: int
    n_steps: int = 256
    compress_tol: float = 1e-14
    sinc_d: float = DEFAULT_D
    expm: ExpmConfig = field(default_factory=ExpmConfig)
    sample_times: tuple[float, ...] | None = None
    max_rank: int | None = None

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be at least 1, got {self.n_steps}")
        if not (0.0 <= self.compress_tol < 1.0):
            raise ValueError(f"compress_tol must be in [0, 1), got {self.compress_tol}")


@dataclass(frozen=True)
class SolutionTrajectory:
    """Snapshots of the solution factor at retained times."""

    times: tuple[float, ...]
    factors: tuple[LowRankFactor, ...]

    def __post_init__(self):
        if len(self.times) != len(self.factors):
            raise ValueError("times and factors must have equal length")
        if any(t2 < t1 for t1, t2 in zip(self.times, self.times[1:])):
            raise ValueError("times must be sorted")

    def __len__(self) -> int:
        return len(self.times)

    def at(self, t: float) -> LowRankFactor:
        """Snapshot at the retained time closest to t."""
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        return self.factors[i]


def nonlinear_flow(f: LowRankFactor, B: np.ndarray, s: float) -> LowRankFactor:
    """Exact flow of P' = -P B B^T P over time s: core-only update.

    With K = Z^T B the flow is S(s) = S (I + s K K^T S)^{-1}, obtained by
    solving rather than inverting since S may be numerically singular after
    compression.  The result is symmetrized to round-off.
    """
    if s < 0.0:
        raise ValueError(f"flow time must be nonnegative, got {s}")
    if f.rank == 0 or B.shape[1] == 0 or s == 0.0:
        return f
    K = f.Z.T @ B
    # S (I + s K K^T S)^{-1} computed as the solution of the transposed
    # system (I + s S K K^T) S' = S; right division matters, the other
    # ordering is not the flow.
    M = np.eye(f.rank) + s * (f.S @ (K @ K.T))
    try:
        S_new = np.linalg.solve(M, f.S)
    except np.linalg.LinAlgError as exc:  # cannot occur for PSD cores; defensive
        raise RuntimeError(f"singular core update in quadratic flow: {exc}") from exc
    return LowRankFactor(f.Z, 0.5 * (S_new + S_new.T))


def linear_flow(
    f: LowRankFactor,
    sys: DiscretizedSystem,
    tau: float,
    inhomog: LowRankFactor,
    cfg: SplittingConfig,
) -> LowRankFactor:
    """Affine Lyapunov step: conjugate by e^{tau A}, add the step Gramian.

    inhomog must be the Gramian factor for this system at step size tau.
    The result is compressed at cfg.compress_tol.
    """
    At = sys.A.T.tocsr() if sp.issparse(sys.A) else sys.A.T
    if f.rank > 0:
        propagated = LowRankFactor(expm_action(At, f.Z, tau, cfg.expm), f.S)
    else:
        propagated = f
    return concat(propagated, inhomog).compress(cfg.compress_tol, cfg.max_rank)


def strang_step(
    f: LowRankFactor,
    sys: DiscretizedSystem,
    tau: float,
    inhomog: LowRankFactor,
    cfg: SplittingConfig,
) -> LowRankFactor:
    """One second-order step: quadratic half-steps around a full affine step.

    The quadratic half-steps are exact core updates, so for a zero-width B
    this reduces to ``linear_flow`` outright.
    """
    half = nonlinear_flow(f, sys.B, 0.5 * tau)
    full = linear_flow(half, sys, tau, inhomog, cfg)
    return nonlinear_flow(full, sys.B, 0.5 * tau)


def _quadrature_alpha(sys: DiscretizedSystem) -> float:
    # Once discretized the integrand is bounded near s = 0 whatever the
    # continuum label says, so outside the admissible range we fall back to
    # the bounded-output rates (the constant, not the rate, absorbs the
    # roughness).
    return sys.alpha if sys.alpha < 0.5 else 0.0


def solve(
    sys: DiscretizedSystem,
    g_factor: LowRankFactor,
    T: float,
    cfg: SplittingConfig,
) -> SolutionTrajectory:
    """March the Riccati (or, for zero-width B, Lyapunov) flow to time T.

    Uniform steps tau = T / n_steps; the per-step Gramian factor is built
    once and reused.  Snapshots are retained at the step boundaries nearest
    cfg.sample_times, each compressed; T = 0 returns the initial factor.
    """
    if g_factor.n != sys.n:
        raise ValueError(f"initial factor has n={g_factor.n}, system has n={sys.n}")
    if T < 0.0:
        raise ValueError(f"horizon T must be nonnegative, got {T}")
    if T == 0.0:
        return SolutionTrajectory((0.0,), (g_factor,))

    tau = T / cfg.n_steps
    params = DleSincParams(m=cfg.sinc_m, d=cfg.sinc_d, alpha=_quadrature_alpha(sys))
    if sys.n_outputs > 0 and np.any(sys.C):
        inhomog = dle_sinc_factor(sys, tau, params, expm_cfg=cfg.expm)
        inhomog = inhomog.compress(cfg.compress_tol)
    else:
        inhomog = LowRankFactor.zero(sys.n)

    sample_times = cfg.sample_times if cfg.sample_times is not None else (T,)
    snap_steps: dict[int, float] = {}
    for ts in sample_times:
        if not (0.0 <= ts <= T * (1 + 1e-12)):
            raise ValueError(f"sample time {ts} outside [0, {T}]")
        snap_steps.setdefault(int(round(ts / tau)), ts)

    times: list[float] = []
    factors: list[LowRankFactor] = []
    f = g_factor
    if 0 in snap_steps:
        times.append(0.0)
        factors.append(f.compress(cfg.compress_tol))
    for k in range(1, cfg.n_steps + 1):
        try:
            f = strang_step(f, sys, tau, inhomog, cfg)
        except ValueError as exc:
            # overflow is caught by finiteness validation somewhere inside
            # the step (factor constructor or a linear-algebra routine)
            message = str(exc)
            if any(token in message for token in ("finite", "infs", "NaN")):
                raise DivergenceError(
                    f"solution factor diverged (non-finite) at step {k}", step=k
                ) from exc
            raise
        if f.rank and not np.all(np.isfinite(f.S)):
            raise DivergenceError(f"non-finite solution factor at step {k}", step=k)
        if k in snap_steps:
            times.append(k * tau)
            factors.append(f.compress(cfg.compress_tol))
    return SolutionTrajectory(tuple(times), tuple(factors))
