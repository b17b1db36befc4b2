"""Shared fixtures: small handmade systems and example assemblies."""

import numpy as np
import pytest
import scipy.sparse as sp

from gramdecay import DiscretizedSystem


def make_system(A, B=None, C=None, G=None, alpha=0.0, beta=0.0):
    """Wrap plain matrices in a DiscretizedSystem on a degenerate 1 x n grid."""
    A = sp.csr_matrix(np.atleast_2d(np.asarray(A, dtype=float)))
    n = A.shape[0]
    B = np.zeros((n, 0)) if B is None else np.atleast_2d(np.asarray(B, dtype=float))
    C = np.zeros((0, n)) if C is None else np.atleast_2d(np.asarray(C, dtype=float))
    G = np.zeros((0, n)) if G is None else np.atleast_2d(np.asarray(G, dtype=float))
    if B.shape[0] != n:
        B = B.T
    return DiscretizedSystem(
        A=A, B=B, C=C, G=G, nx=n, ny=1, cell_area=1.0, alpha=alpha, beta=beta
    )


@pytest.fixture
def scalar_lyapunov():
    """A = -1, C = 1, G = 0: P(t) = (1 - e^{-2t}) / 2."""
    return make_system(-1.0, C=1.0)


@pytest.fixture
def scalar_riccati():
    """A = -1, B = C = 1, G = 0: P(t) = sqrt(2) tanh(sqrt(2) t + atanh(1/sqrt 2)) - 1."""
    return make_system(-1.0, B=1.0, C=1.0)


def scalar_riccati_exact(t):
    return np.sqrt(2.0) * np.tanh(np.sqrt(2.0) * t + np.arctanh(1 / np.sqrt(2.0))) - 1.0
