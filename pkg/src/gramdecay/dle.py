"""Closed-form low-rank solution of the differential Lyapunov equation.

With a zero input the solution at time t is the terminal term
e^{tA^T} G^T G e^{tA} plus the output Gramian integral of e^{sA^T} C^T C
e^{sA} over (0, t).  Discretizing that integral with the sinc rule turns
the solution into an explicitly finite-rank factor: one block column
sqrt(h w_k) e^{z_k A^T} C^T per quadrature node plus one block for the
terminal term, with identity core.  The column count is therefore capped by
``rank_bound`` exactly; no time stepping is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grids import DiscretizedSystem
from .krylov import ExpmConfig, KrylovPropagator
from .lowrank import LowRankFactor
from .sincquad import DEFAULT_D, for_gramian, min_m


@dataclass(frozen=True)
class DleSincParams:
    """Quadrature parameters for the finite-rank Gramian approximant.

    alpha grades the output operator's unboundedness and must lie in
    [0, 1/2); it fixes the endpoint decay rates rho = 1 - 2*alpha, mu = 1.
    """

    m: int
    d: float = DEFAULT_D
    alpha: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.alpha < 0.5):
            raise ValueError(
                f"alpha={self.alpha} is outside [0, 1/2): the Gramian integrand "
                "is not integrable and the problem is ill-posed"
            )
        required = min_m(self.d, 1.0 - 2.0 * self.alpha)
        if self.m < required:
            raise ValueError(f"m={self.m} below the admissible minimum {required}")


def rank_bound(m: int, dim_y: int, dim_z: int) -> int:
    """Column budget of the sinc approximant: (2m + 2) dim_y + dim_z."""
    if m < 1 or dim_y < 0 or dim_z < 0:
        raise ValueError("need m >= 1 and nonnegative dimensions")
    return (2 * m + 2) * dim_y + dim_z


def node_tolerance(params: DleSincParams, cap: float = 1e-4) -> float:
    """Krylov tolerance per node: an order below the quadrature error scale.

    The rule's relative accuracy is ~exp(-sqrt(2 pi rho d m)); pushing each
    exponential action a factor 10 below that keeps the quadrature error
    dominant.  Floored near round-off, capped at the solver default.
    """
    rho = 1.0 - 2.0 * params.alpha
    est = math.exp(-math.sqrt(2.0 * math.pi * rho * params.d * params.m))
    return min(cap, max(est / 10.0, 1e-14))


def dle_sinc_factor(
    sys: DiscretizedSystem,
    t: float,
    params: DleSincParams,
    expm_cfg: ExpmConfig | None = None,
) -> LowRankFactor:
    """Finite-rank factor of the Lyapunov solution at time t.

    Z stacks sqrt(h w_k) e^{z_k A^T} C^T over the quadrature nodes followed
    by e^{t A^T} G^T when a terminal penalty is present; S is the identity.
    Krylov non-convergence propagates; the column count never exceeds
    rank_bound(m, dim Y, dim Z).
    """
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    base = expm_cfg if expm_cfg is not None else ExpmConfig()
    expm_cfg = ExpmConfig(
        tol=node_tolerance(params, cap=base.tol),
        max_basis=base.max_basis,
        reorthogonalize=base.reorthogonalize,
    )
    At = sys.A.T.tocsr() if sp.issparse(sys.A) else sys.A.T

    blocks = []
    if sys.n_outputs > 0 and np.any(sys.C):
        rule = for_gramian(t, params.alpha, params.m, d=params.d)
        # All nodes share the Krylov space of (A^T, C^T); one basis serves
        # them all, grown once by the largest node time.
        propagator = KrylovPropagator(At, sys.C.T, expm_cfg)
        propagator.apply(rule.nodes[-1])
        for z, w in zip(rule.nodes, rule.weights):
            blocks.append(math.sqrt(rule.h * w) * propagator.apply(z))
    if sys.n_terminal > 0 and np.any(sys.G):
        blocks.append(KrylovPropagator(At, sys.G.T, expm_cfg).apply(t))

    if not blocks:
        return LowRankFactor.zero(sys.n)
    Z = np.hstack(blocks)
    assert Z.shape[1] <= rank_bound(params.m, sys.n_outputs, sys.n_terminal)
    return LowRankFactor.from_block(Z)
