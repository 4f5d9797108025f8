"""Spectral solver and energy-function explorer for the fourth-order
critical equation Delta^2 u + alpha Delta u + a u = u^(2#-1) on the model
products S^1(t) x S^(n-1), n >= 5.
"""

from .bubble import (
    BubbleParams,
    RadialField,
    bubble_energy,
    bubble_eval,
    bubble_field,
    constant_field,
    expected_bubble_energy,
    pde_residual,
    pohozaev_identity_residual,
    pohozaev_witness,
    power_profile_field,
)
from .constants import (
    FactorizationError,
    OperatorParams,
    ScheduleReport,
    bubble_coefficient,
    constant_branch,
    critical_exponent,
    einstein_coefficients,
    factorize,
    sharp_constant,
    validate_schedule,
)
from .diagnostics import (
    ConcentrationReport,
    QuantizationReport,
    concentration_points,
    concentration_ratios,
    hessian_ratio,
    multi_bubble_energy,
    quantization_check,
)
from .field import (
    NormReport,
    PeriodicField,
    inverse,
    load_field,
    localized_mass,
    norms,
    save_field,
    transform,
)
from .geometry import (
    ManifoldSpec,
    QuadratureGrid,
    circle_eigenvalue,
    circle_multiplicity,
    product_volume,
    sphere_spectrum,
    sphere_volume,
)
from .solver import (
    ConvergenceError,
    PositivityError,
    QuotientMinimum,
    Solution,
    SolverOptions,
    bifurcation_alpha,
    linearized_operator,
    linearized_spectrum,
    minimize_quotient,
    newton_solve,
    quotient,
    rescale_to_solution,
    residual,
)
from .sweep import CSV_COLUMNS, SweepConfig, SweepRecord, branch_continuation, emit, quarter_square, run_sweep

__version__ = "0.1.0"
