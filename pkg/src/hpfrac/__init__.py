"""hp finite elements for time-dependent spectral fractional diffusion in 1D.

The pieces, bottom up: geometric meshes and degree vectors (mesh),
Gauss-Legendre/Gauss-Jacobi rules (quadrature), continuous hp spaces with
plain and y^alpha-weighted assembly (hp1d), the tensor-product cylinder
discretization with its decoupled resolvent solver (extension), hp-DG and
implicit Euler time stepping (timestepping), and the convergence studies
plus CSV/CLI plumbing (experiments, cli).
"""

from .mesh import (
    DegreeVector,
    Mesh1D,
    OPTIMAL_GRADING,
    TimePartition,
    geometric_mesh_1d,
    linear_degree_vector,
    time_partition,
)
from .quadrature import QuadratureRule, gauss_jacobi, gauss_legendre
from .hp1d import (
    DIRICHLET,
    FREE,
    HpSpace,
    assemble,
    assemble_weighted_y,
    build_space,
    error_norms,
    eval_deriv,
    eval_fn,
    l2_project,
    load_vector,
)
from .extension import (
    ExtensionDiscretization,
    build_extension,
    decouple_qz,
    decouple_real,
    dense_oracle_solve,
    fractional_matrix,
    solve_g_lambda,
    standard_extension,
)
from .timestepping import Trajectory, dg_step, dg_time_block, run_dg, run_euler
from .experiments import (
    ExperimentSpec,
    ResultRow,
    exact_eigen_solution,
    run_convergence_singular,
    run_convergence_smooth,
    run_singperturb_bench,
    selftest,
)

__version__ = "0.1.0"

__all__ = [
    "DegreeVector",
    "Mesh1D",
    "OPTIMAL_GRADING",
    "TimePartition",
    "geometric_mesh_1d",
    "linear_degree_vector",
    "time_partition",
    "QuadratureRule",
    "gauss_jacobi",
    "gauss_legendre",
    "DIRICHLET",
    "FREE",
    "HpSpace",
    "assemble",
    "assemble_weighted_y",
    "build_space",
    "error_norms",
    "eval_deriv",
    "eval_fn",
    "l2_project",
    "load_vector",
    "ExtensionDiscretization",
    "build_extension",
    "decouple_qz",
    "decouple_real",
    "dense_oracle_solve",
    "fractional_matrix",
    "solve_g_lambda",
    "standard_extension",
    "Trajectory",
    "dg_step",
    "dg_time_block",
    "run_dg",
    "run_euler",
    "ExperimentSpec",
    "ResultRow",
    "exact_eigen_solution",
    "run_convergence_singular",
    "run_convergence_smooth",
    "run_singperturb_bench",
    "selftest",
]
