"""Finite-difference discretizations of the unit-square example systems.

All operators live on a uniform interior grid of (0,1)^2 with the 5-point
Laplacian stencil.  Per axis, a Dirichlet end places the first node one
spacing h inside the boundary (the boundary value drops out), while a
Neumann end staggers the node half a spacing inside so the mirrored ghost
node gives a symmetric second-order zero-flux closure.  Every node then
owns the same cell of area hx*hy, so the discrete L2 mass matrix is the
scalar cell_area times the identity.

The assembled systems are expressed in coordinates where the discrete L2
inner product is the plain Euclidean one (fields scaled by sqrt(cell_area),
quadrature rows divided by it, input columns multiplied by it).  Singular
values of the solution matrices then coincide with singular values of the
underlying discretized operators, independent of the mesh.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
_KINDS = (DIRICHLET, NEUMANN)


@dataclass(frozen=True)
class EdgeSpec:
    """Boundary-condition kind for each edge of the unit square."""

    left: str = DIRICHLET
    right: str = DIRICHLET
    bottom: str = DIRICHLET
    top: str = DIRICHLET

    def __post_init__(self):
        for name in ("left", "right", "bottom", "top"):
            kind = getattr(self, name)
            if kind not in _KINDS:
                raise ValueError(f"unknown boundary kind {kind!r} on edge {name!r}")


@dataclass(frozen=True)
class DiscretizedSystem:
    """Sparse state operator with input/output/terminal maps and grid metadata.

    alpha and beta record the continuum unboundedness exponents of the
    output and input operators; they are classification labels, not
    computed quantities.
    """

    A: sp.spmatrix
    B: np.ndarray
    C: np.ndarray
    G: np.ndarray
    nx: int
    ny: int
    cell_area: float
    alpha: float
    beta: float

    def __post_init__(self):
        n = self.nx * self.ny
        if self.A.shape != (n, n):
            raise ValueError(f"A has shape {self.A.shape}, expected ({n}, {n})")
        if self.B.shape[0] != n or self.C.shape[1] != n or self.G.shape[1] != n:
            raise ValueError("B/C/G dimensions do not match the grid")

    @property
    def n(self) -> int:
        return self.nx * self.ny

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    @property
    def n_terminal(self) -> int:
        return self.G.shape[0]


def _axis_geometry(n: int, lo: str, hi: str) -> tuple[float, np.ndarray]:
    """Spacing and node coordinates for one axis with end kinds lo/hi."""
    if n < 2:
        raise ValueError(f"need at least 2 interior nodes per axis, got {n}")
    off_lo = 1.0 if lo == DIRICHLET else 0.5
    off_hi = 1.0 if hi == DIRICHLET else 0.5
    h = 1.0 / (n - 1 + off_lo + off_hi)
    coords = (off_lo + np.arange(n)) * h
    return h, coords


def _axis_operator(n: int, lo: str, hi: str) -> sp.csr_matrix:
    """1-d second-difference operator with the end closures described above."""
    h, _ = _axis_geometry(n, lo, hi)
    main = np.full(n, -2.0)
    if lo == NEUMANN:
        main[0] = -1.0
    if hi == NEUMANN:
        main[-1] = -1.0
    off = np.ones(n - 1)
    return (sp.diags([off, main, off], [-1, 0, 1]) / h**2).tocsr()


def grid_geometry(nx: int, ny: int, bc: EdgeSpec):
    """(hx, hy, xs, ys): spacings and interior node coordinates.

    Node ordering everywhere is x-fastest: index = j*nx + i for node
    (xs[i], ys[j]).
    """
    hx, xs = _axis_geometry(nx, bc.left, bc.right)
    hy, ys = _axis_geometry(ny, bc.bottom, bc.top)
    return hx, hy, xs, ys


def build_laplacian_2d(nx: int, ny: int, bc: EdgeSpec) -> sp.csr_matrix:
    """5-point Laplacian on the interior grid; symmetric, and negative
    definite as soon as one edge is Dirichlet."""
    Tx = _axis_operator(nx, bc.left, bc.right)
    Ty = _axis_operator(ny, bc.bottom, bc.top)
    A = sp.kron(sp.eye(ny), Tx) + sp.kron(Ty, sp.eye(nx))
    return A.tocsr()


def build_mean_output(nx: int, ny: int, bc: EdgeSpec) -> np.ndarray:
    """Quadrature row with cell_area per node, so that C @ x ~ integral of x.

    Bounded output (alpha label 0).
    """
    hx, hy, _, _ = grid_geometry(nx, ny, bc)
    return np.full((1, nx * ny), hx * hy)


def _edge_rows(nx: int, ny: int, edge: str) -> np.ndarray:
    if edge == "bottom":
        return np.arange(nx)
    if edge == "top":
        return (ny - 1) * nx + np.arange(nx)
    raise ValueError(f"unsupported edge {edge!r}")


def build_boundary_trace_output(nx: int, ny: int, edges, bc: EdgeSpec) -> np.ndarray:
    """Row approximating the integral of the boundary trace over the edges.

    Under the zero-flux ghost closure the wall value agrees with the
    adjacent node value to O(h^2), so the trace integral is the edge sum of
    adjacent-node values times hx.  The selected edges must be Neumann:
    on a Dirichlet edge the trace is identically zero and the output
    degenerates.  Unbounded output with alpha label 1/4.
    """
    edges = tuple(edges)
    if not edges:
        raise ValueError("at least one edge must be selected")
    hx, _, _, _ = grid_geometry(nx, ny, bc)
    row = np.zeros((1, nx * ny))
    for edge in edges:
        if getattr(bc, edge) != NEUMANN:
            raise ValueError(
                f"edge {edge!r} is Dirichlet: its trace is identically zero "
                "and the output would be degenerate"
            )
        row[0, _edge_rows(nx, ny, edge)] += hx
    return row


def build_normal_derivative_output(nx: int, ny: int, edges, bc: EdgeSpec) -> np.ndarray:
    """Row approximating the integral of the outward normal derivative.

    One-sided difference between the two node rows nearest each selected
    edge, integrated along the edge with weight hx.  This output carries
    the alpha label 3/4: it is deliberately rougher than the well-posedness
    threshold 1/2, so refining the grid blows the solution up.
    """
    edges = tuple(edges)
    if not edges:
        raise ValueError("at least one edge must be selected")
    hx, hy, _, _ = grid_geometry(nx, ny, bc)
    row = np.zeros((1, nx * ny))
    for edge in edges:
        outer = _edge_rows(nx, ny, edge)
        inner = outer + nx if edge == "bottom" else outer - nx
        row[0, outer] += hx / hy
        row[0, inner] -= hx / hy
    return row


def build_neumann_input(nx: int, ny: int, edge: str, bc: EdgeSpec) -> np.ndarray:
    """Forcing column for scalar flux control through the right edge.

    Prescribing d(x)/d(nu) = u on the right edge enters the right-edge node
    equations through the ghost-node elimination as a source u/hx per node.
    The column is consistent with ``build_laplacian_2d``: the steady state
    -A^{-1} B for u = 1 converges to the harmonic field with unit right-edge
    flux (which is xi_1 when the left edge is Dirichlet and the remaining
    edges are zero-flux).
    """
    if edge != "right":
        raise ValueError(f"only right-edge control is implemented, got {edge!r}")
    if bc.right != NEUMANN:
        raise ValueError("flux control requires a Neumann right edge")
    hx, _, _, _ = grid_geometry(nx, ny, bc)
    col = np.zeros((nx * ny, 1))
    col[np.arange(ny) * nx + (nx - 1), 0] = 1.0 / hx
    return col


_EXAMPLE_BCS = {
    1: EdgeSpec(),
    2: EdgeSpec(left=DIRICHLET, right=NEUMANN, bottom=NEUMANN, top=NEUMANN),
    3: EdgeSpec(left=DIRICHLET, right=NEUMANN, bottom=NEUMANN, top=NEUMANN),
    4: EdgeSpec(left=DIRICHLET, right=NEUMANN, bottom=NEUMANN, top=NEUMANN),
}


def assemble_example(example_id: int, nx: int, ny: int) -> DiscretizedSystem:
    """Wire one of the four benchmark systems on an nx-by-ny interior grid.

    1: uncontrolled heat flow, all-Dirichlet box, mean output (alpha 0).
    2: flux control through the right edge, Dirichlet left edge, mean
       output (alpha 0, beta 1/4).
    3: as 2, but the output integrates the boundary trace over the top and
       bottom edges (alpha 1/4).
    4: as 3, with the normal-derivative trace instead (alpha 3/4; violates
       the decay theory's admissible range on purpose).

    Matrices are returned in the Euclidean-L2 coordinates described in the
    module docstring.  All four systems have a zero terminal penalty.
    """
    if example_id not in _EXAMPLE_BCS:
        raise ValueError(f"unknown example id {example_id!r}; expected 1..4")
    bc = _EXAMPLE_BCS[example_id]
    A = build_laplacian_2d(nx, ny, bc)
    hx, hy, _, _ = grid_geometry(nx, ny, bc)
    cell_area = hx * hy
    scale = np.sqrt(cell_area)
    n = nx * ny

    if example_id == 1:
        C_raw = build_mean_output(nx, ny, bc)
        B = np.zeros((n, 0))
        alpha, beta = 0.0, 0.0
    else:
        B = build_neumann_input(nx, ny, "right", bc) * scale
        beta = 0.25
        if example_id == 2:
            C_raw = build_mean_output(nx, ny, bc)
            alpha = 0.0
        elif example_id == 3:
            C_raw = build_boundary_trace_output(nx, ny, ("top", "bottom"), bc)
            alpha = 0.25
        else:
            C_raw = build_normal_derivative_output(nx, ny, ("top", "bottom"), bc)
            alpha = 0.75

    return DiscretizedSystem(
        A=A,
        B=B,
        C=C_raw / scale,
        G=np.zeros((0, n)),
        nx=nx,
        ny=ny,
        cell_area=cell_area,
        alpha=alpha,
        beta=beta,
    )
