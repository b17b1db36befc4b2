"""Low-rank solvers for differential Lyapunov and Riccati equations.

The package provides symmetric low-rank factor arithmetic, a finite-interval
sinc quadrature rule with explicit rank bounds for Gramian integrals, block
Krylov matrix exponential actions, closed-form and Strang-splitting solvers,
dense reference oracles, and singular-value decay analysis, together with a
CLI reproducing the four unit-square benchmark problems.
"""

from .decay import (
    BoundReport,
    DecayFit,
    SingularSpectrum,
    WeylReport,
    check_thm_bound,
    fit_sqrt_decay,
    fit_time_power,
    verify_weyl,
)
from .dle import DleSincParams, dle_sinc_factor, rank_bound
from .dre import (
    DivergenceError,
    SolutionTrajectory,
    SplittingConfig,
    linear_flow,
    nonlinear_flow,
    solve,
    strang_step,
)
from .experiments import ExperimentConfig, compare_oracle, run_experiment
from .grids import (
    DIRICHLET,
    NEUMANN,
    DiscretizedSystem,
    EdgeSpec,
    assemble_example,
    build_boundary_trace_output,
    build_laplacian_2d,
    build_mean_output,
    build_neumann_input,
    build_normal_derivative_output,
    grid_geometry,
)
from .krylov import ConvergenceError, ExpmConfig, expm_action
from .lowrank import LowRankFactor, concat
from .oracle import dense_dle, dense_dre, dense_expm
from .sincquad import DEFAULT_D, SincRule, build_rule, for_gramian, integrate, min_m

__all__ = [
    "BoundReport",
    "ConvergenceError",
    "DecayFit",
    "DEFAULT_D",
    "DIRICHLET",
    "DiscretizedSystem",
    "DivergenceError",
    "DleSincParams",
    "EdgeSpec",
    "ExperimentConfig",
    "ExpmConfig",
    "LowRankFactor",
    "NEUMANN",
    "SincRule",
    "SingularSpectrum",
    "SolutionTrajectory",
    "SplittingConfig",
    "WeylReport",
    "assemble_example",
    "build_boundary_trace_output",
    "build_laplacian_2d",
    "build_mean_output",
    "build_neumann_input",
    "build_normal_derivative_output",
    "check_thm_bound",
    "compare_oracle",
    "concat",
    "dense_dle",
    "dense_dre",
    "dense_expm",
    "dle_sinc_factor",
    "expm_action",
    "fit_sqrt_decay",
    "fit_time_power",
    "for_gramian",
    "grid_geometry",
    "integrate",
    "linear_flow",
    "build_rule",
    "min_m",
    "nonlinear_flow",
    "rank_bound",
    "run_experiment",
    "solve",
    "strang_step",
    "verify_weyl",
]

__version__ = "0.1.0"
