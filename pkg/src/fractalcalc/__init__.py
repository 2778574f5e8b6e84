"""Numerical toolkit for calculus of fractional order alpha on Cantor-like sets.

The package builds middle-cut Cantor sets, computes their integral
staircase and gamma-dimension, differentiates and integrates functions
supported on the set, solves ordinary differential equations driven by the
staircase clock, and verifies Lyapunov-style stability and boundedness
certificates for a damped second order family.
"""

from .cantor import (
    CantorSpec,
    IntervalSet,
    contains,
    covering_measure,
    generate,
    hausdorff_dimension,
    iter_levels,
    max_depth,
)
from .calculus import (
    GridFunction,
    derivative_grid,
    fractal_derivative,
    fractal_integral,
    in_set,
    set_samples,
)
from .errors import (
    DomainError,
    EstimationError,
    ExpressionError,
    FractalCalcError,
    NumericalBlowupError,
    ParameterError,
    PreconditionError,
    ResolutionError,
)
from .expressions import Expression, compile_expression
from .fde import (
    FdeConstants,
    FdeSystem,
    Trajectory,
    solve_first_order,
    solve_second_order,
    warp_time,
)
from .lyapunov import (
    AssumptionGrids,
    AssumptionReport,
    ConditionCheck,
    DecayFit,
    LyapunovFunction,
    StabilityReport,
    Theorem1Report,
    Theorem2Report,
    boundedness_certificate,
    check_assumptions,
    classify_stability,
    lyapunov_derivative,
    stability_certificate,
    verify_theorem1,
    verify_theorem2,
)
from .staircase import (
    MassEstimate,
    StaircaseTable,
    build_staircase,
    characteristic,
    depth_for_resolution,
    dimension_sweep,
    estimate_mass,
    eval_staircase,
    gamma_dimension,
    l_alpha_sum,
)
from .systems import (
    example1_exact,
    example1_field,
    example1_lyapunov,
    example2_lienard_field,
    example2_lienard_lyapunov,
    example2_system,
    example3_field,
    example3_lyapunov,
    example3_system,
    linear_damped_system,
    theorem1_toy,
    theorem2_toy,
)

__version__ = "0.1.0"

__all__ = [
    "CantorSpec",
    "IntervalSet",
    "contains",
    "covering_measure",
    "generate",
    "hausdorff_dimension",
    "iter_levels",
    "max_depth",
    "GridFunction",
    "derivative_grid",
    "fractal_derivative",
    "fractal_integral",
    "in_set",
    "set_samples",
    "DomainError",
    "EstimationError",
    "ExpressionError",
    "FractalCalcError",
    "NumericalBlowupError",
    "ParameterError",
    "PreconditionError",
    "ResolutionError",
    "Expression",
    "compile_expression",
    "FdeConstants",
    "FdeSystem",
    "Trajectory",
    "solve_first_order",
    "solve_second_order",
    "warp_time",
    "AssumptionGrids",
    "AssumptionReport",
    "ConditionCheck",
    "DecayFit",
    "LyapunovFunction",
    "StabilityReport",
    "Theorem1Report",
    "Theorem2Report",
    "boundedness_certificate",
    "check_assumptions",
    "classify_stability",
    "lyapunov_derivative",
    "stability_certificate",
    "verify_theorem1",
    "verify_theorem2",
    "MassEstimate",
    "StaircaseTable",
    "build_staircase",
    "characteristic",
    "depth_for_resolution",
    "dimension_sweep",
    "estimate_mass",
    "eval_staircase",
    "gamma_dimension",
    "l_alpha_sum",
    "example1_exact",
    "example1_field",
    "example1_lyapunov",
    "example2_lienard_field",
    "example2_lienard_lyapunov",
    "example2_system",
    "example3_field",
    "example3_lyapunov",
    "example3_system",
    "linear_damped_system",
    "theorem1_toy",
    "theorem2_toy",
    "__version__",
]
