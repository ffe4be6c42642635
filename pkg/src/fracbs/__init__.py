"""Meshless RBF collocation solver for fractional Black-Scholes equations."""

from .assembly import (
    AssemblyError,
    CollocationSystem,
    FractionalParams,
    build_rhs,
    build_system,
    spatial_operator_entry,
    spatial_operator_row,
)
from .fractional import (
    FractionalOrder,
    FunctionProfile,
    GammaPoleError,
    QuadratureError,
    caputo_fractional_derivative,
    caputo_weight,
    caputo_weights,
    discrete_caputo,
    rl_fractional_derivative,
    rl_fractional_integral,
    rl_power_derivative,
)
from .kernels import (
    MultiquadricKernel,
    PolyharmonicKernel,
    RadialKernel,
    RayProfile,
    classical_operator,
    kernel_eval,
    kernel_spec,
    multiquadric,
    parse_kernel,
    polyharmonic,
    ray_profile,
)
from .nodes import NodeSet, chebyshev_nodes, halton_sequence, unit_square_nodes
from .precondition import (
    PreconditionReport,
    Preconditioner,
    SingularPreconditionerError,
    SolveBreakdownError,
    SystemSolver,
    build_preconditioner,
    condition_number,
    qr_factor,
    solve,
)
from .problems import (
    ProblemSpec,
    bs_inverse_transform,
    bs_log_transform,
    example1,
    example2,
    get_problem,
)
from .solver import (
    SolutionHistory,
    SolverBreakdownError,
    StepRecord,
    analytic_error,
    residual_rmse,
    run,
)

__version__ = "0.1.0"
