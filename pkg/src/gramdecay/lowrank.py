"""Symmetric low-rank factors P = Z S Z^T and their arithmetic.

A factor holds an n x r coefficient block Z and a small symmetric r x r
core S.  The represented operator Z S Z^T is symmetric by construction and
the core may be indefinite, which is what the Riccati flow needs: the
nonlinear substep updates only S, and terminal-penalty blocks join as extra
diagonal blocks.  Rank-0 factors are ordinary values representing the zero
operator.

All operations are pure: they validate their inputs, never mutate, and are
safe to call from concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

# Relative tolerance for the core-symmetry invariant.
_SYM_TOL = 1e-12


def _as_float_matrix(M, name: str) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got ndim={M.ndim}")
    return M


@dataclass(frozen=True)
class LowRankFactor:
    """Symmetric operator P = Z @ S @ Z.T in factored form.

    Z : (n, r) dense coefficient block, r <= n.
    S : (r, r) dense symmetric core.
    """

    Z: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        Z = _as_float_matrix(self.Z, "Z")
        S = _as_float_matrix(self.S, "S")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "S", S)
        n, r = Z.shape
        if S.shape != (r, r):
            raise ValueError(f"core shape {S.shape} does not match Z with r={r}")
        if r > n:
            raise ValueError(f"rank r={r} exceeds row dimension n={n}")
        if not np.all(np.isfinite(Z)) or not np.all(np.isfinite(S)):
            raise ValueError("factor entries must be finite")
        if r > 0:
            smax = np.max(np.abs(S))
            if smax > 0 and np.max(np.abs(S - S.T)) > _SYM_TOL * smax:
                raise ValueError("core S is not symmetric to working tolerance")

    @classmethod
    def zero(cls, n: int) -> "LowRankFactor":
        """The zero operator on an n-dimensional space."""
        return cls(np.zeros((n, 0)), np.zeros((0, 0)))

    @classmethod
    def from_block(cls, Z) -> "LowRankFactor":
        """Factor Z @ Z.T, i.e. identity core.

        Blocks wider than n are first reduced by orthonormalization, which
        represents the same operator within round-off at rank <= n.
        """
        Z = _as_float_matrix(Z, "Z")
        if Z.shape[1] > Z.shape[0]:
            return cls(*_reduce_wide(Z, np.eye(Z.shape[1])))
        return cls(Z, np.eye(Z.shape[1]))

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    @property
    def rank(self) -> int:
        return self.Z.shape[1]

    def dense(self) -> np.ndarray:
        """Explicit n x n matrix; intended for tests and small n."""
        if self.rank == 0:
            return np.zeros((self.n, self.n))
        P = self.Z @ self.S @ self.Z.T
        return 0.5 * (P + P.T)

    def apply(self, X) -> np.ndarray:
        """P @ X without forming the n x n product."""
        X = np.asarray(X, dtype=float)
        vec = X.ndim == 1
        X2 = X[:, None] if vec else X
        if X2.ndim != 2 or X2.shape[0] != self.n:
            raise ValueError(
                f"operand has {X2.shape[0] if X2.ndim == 2 else '?'} rows, expected {self.n}"
            )
        if self.rank == 0:
            Y = np.zeros_like(X2)
        else:
            Y = self.Z @ (self.S @ (self.Z.T @ X2))
        return Y[:, 0] if vec else Y

    def _core_image(self) -> tuple[np.ndarray, np.ndarray]:
        """Thin Q of Z and the transformed core R S R^T (symmetrized)."""
        Q, R = la.qr(self.Z, mode="economic")
        M = R @ self.S @ R.T
        return Q, 0.5 * (M + M.T)

    def singular_values(self) -> np.ndarray:
        """Nonzero singular values of Z S Z^T, decreasing.

        Equal to the absolute eigenvalues of R S R^T where Z = QR with Q
        orthonormal, so the cost is O(n r^2) rather than O(n^3).
        """
        if self.rank == 0:
            return np.zeros(0)
        _, M = self._core_image()
        s = np.sort(np.abs(la.eigvalsh(M)))[::-1]
        return s[s > 0.0]

    def compress(self, rel_tol: float, max_rank: int | None = None) -> "LowRankFactor":
        """Truncated re-factorization with spectral-norm control.

        Orthonormalizes Z, eigendecomposes the transformed core and drops
        eigenvalues of magnitude below rel_tol times the largest.  The
        truncation is by magnitude, not by clamping: tiny negative
        round-off eigenvalues of an analytically PSD operator are
        discarded.  ||P - P'||_2 <= rel_tol * ||P||_2 and the new rank
        never exceeds the old one.  An optional max_rank keeps only the
        largest-magnitude eigenvalues beyond the tolerance cut.
        """
        if not (0.0 <= rel_tol < 1.0):
            raise ValueError(f"rel_tol must be in [0, 1), got {rel_tol}")
        if self.rank == 0:
            return self
        Q, M = self._core_image()
        w, U = la.eigh(M)
        amax = np.max(np.abs(w))
        if amax == 0.0:
            return LowRankFactor.zero(self.n)
        order = np.argsort(np.abs(w))[::-1]
        w, U = w[order], U[:, order]
        keep = np.abs(w) > rel_tol * amax
        if max_rank is not None:
            keep &= np.arange(len(w)) < max_rank
        if not np.any(keep):
            return LowRankFactor.zero(self.n)
        return LowRankFactor(Q @ U[:, keep], np.diag(w[keep]))


def _reduce_wide(Z: np.ndarray, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormalize a block wider than its row count: (Q, R S R^T)."""
    Q, R = la.qr(Z, mode="economic")
    M = R @ S @ R.T
    return Q, 0.5 * (M + M.T)


def concat(f1: LowRankFactor, f2: LowRankFactor) -> LowRankFactor:
    """Sum P1 + P2: stacked blocks and block-diagonal core.

    The stacking is exact; should the combined width exceed n (possible
    only for very small n), the block is reduced by orthonormalization,
    which preserves the operator within round-off.
    """
    if f1.n != f2.n:
        raise ValueError(f"row dimensions differ: {f1.n} vs {f2.n}")
    if f1.rank == 0:
        return f2
    if f2.rank == 0:
        return f1
    Z = np.hstack([f1.Z, f2.Z])
    S = la.block_diag(f1.S, f2.S)
    if Z.shape[1] > Z.shape[0]:
        Z, S = _reduce_wide(Z, S)
    return LowRankFactor(Z, S)
