"""Dense brute-force reference solutions for small systems.

Everything here is deliberately independent of the low-rank machinery: the
Lyapunov integral is evaluated by graded composite Gauss quadrature with
its own refinement control, and the Riccati equation is integrated as a
plain stiff-ish ODE on the packed upper triangle.  These routines back the
derived expected values in the test-suite and the oracle-comparison
subcommand; size caps keep them honest about their scope.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .grids import DiscretizedSystem

_EXPM_CAP = 400
_DLE_CAP = 256
_DRE_CAP = 256


def _dense(A) -> np.ndarray:
    return A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)


def dense_expm(A, t: float) -> np.ndarray:
    """expm(t*A) by scipy's backward-error-controlled scaling-and-squaring."""
    A = _dense(A)
    n = A.shape[0]
    if n > _EXPM_CAP:
        raise ValueError(f"dense_expm capped at n={_EXPM_CAP}, got {n}")
    return la.expm(t * A)


def _gauss_panels(t: float, n_panels: int, grading: float, order: int = 8):
    """Gauss-Legendre nodes/weights on [0, t] with panel edges t*(i/P)^g."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = t * (np.arange(n_panels + 1) / n_panels) ** grading
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


class _SymPropagator:
    """e^{sA^T} V via one symmetric eigendecomposition, reused per node."""

    def __init__(self, A: np.ndarray):
        self.lam, self.Q = la.eigh(A)

    def apply(self, V: np.ndarray, s: float) -> np.ndarray:
        return self.Q @ (np.exp(s * self.lam)[:, None] * (self.Q.T @ V))


def _propagate_factory(A: np.ndarray):
    if np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max())):
        return _SymPropagator(A).apply
    return lambda V, s: la.expm(s * A.T) @ V


def dense_dle(sys: DiscretizedSystem, t: float, n_quad: int = 8) -> np.ndarray:
    """Exact-integral evaluation of the Lyapunov solution at time t.

    Computes e^{tA^T} G^T G e^{tA} plus the output Gramian integral by
    composite Gauss quadrature with panels graded toward s = 0 (grading
    exponent tied to the s^(-2 alpha) endpoint behaviour), doubling the
    panel count until the result changes by less than 1e-8 relatively.
    """
    n = sys.n
    if n > _DLE_CAP:
        raise ValueError(f"dense_dle capped at n={_DLE_CAP}, got {n}")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    A = _dense(sys.A)
    propagate = _propagate_factory(A)

    P = np.zeros((n, n))
    if sys.n_terminal > 0 and np.any(sys.G):
        EG = propagate(sys.G.T, t)
        P += EG @ EG.T
    if t == 0.0 or sys.n_outputs == 0 or not np.any(sys.C):
        return 0.5 * (P + P.T)

    grading = max(1.0, 3.0 / max(1.0 - 2.0 * sys.alpha, 0.1))

    def gramian(n_panels: int) -> np.ndarray:
        nodes, weights = _gauss_panels(t, n_panels, grading)
        acc = np.zeros((n, n))
        for s, w in zip(nodes, weights):
            E = propagate(sys.C.T, s)
            acc += w * (E @ E.T)
        return acc

    prev = gramian(n_quad)
    for _ in range(12):
        n_quad *= 2
        cur = gramian(n_quad)
        delta = la.norm(cur - prev) / max(la.norm(cur), np.finfo(float).tiny)
        prev = cur
        if delta < 1e-8:
            P += cur
            return 0.5 * (P + P.T)
    raise RuntimeError(
        f"Gramian quadrature failed to settle below 1e-8 (last change {delta:.2e})"
    )


def dense_dre(sys: DiscretizedSystem, t: float, rtol: float = 1e-8) -> np.ndarray:
    """Adaptive explicit integration of the Riccati matrix ODE up to time t.

    Works on the packed upper triangle (the solution stays symmetric) with
    an embedded Runge-Kutta pair at the given relative tolerance.  Explicit
    stepping is fine here because the size cap keeps the stiffness mild for
    the t of interest; a step-size collapse is reported as such.
    """
    n = sys.n
    if n > _DRE_CAP:
        raise ValueError(f"dense_dre capped at n={_DRE_CAP}, got {n}")
    A = _dense(sys.A)
    B, C, G = sys.B, sys.C, sys.G
    CtC = C.T @ C if sys.n_outputs else np.zeros((n, n))
    P0 = G.T @ G if sys.n_terminal else np.zeros((n, n))

    iu = np.triu_indices(n)

    def pack(P):
        return P[iu]

    def unpack(v):
        P = np.zeros((n, n))
        P[iu] = v
        return P + np.triu(P, 1).T

    def rhs(_, v):
        P = unpack(v)
        dP = A.T @ P + P @ A + CtC
        if B.shape[1]:
            PB = P @ B
            dP -= PB @ PB.T
        return pack(dP)

    if t == 0.0:
        return P0
    sol = solve_ivp(rhs, (0.0, t), pack(P0), method="RK45", rtol=rtol, atol=1e-14)
    if not sol.success:
        raise RuntimeError(
            "Riccati ODE step size collapsed (stiffness); use a smaller t or "
            f"coarser grid: {sol.message}"
        )
    P = unpack(sol.y[:, -1])
    return 0.5 * (P + P.T)
