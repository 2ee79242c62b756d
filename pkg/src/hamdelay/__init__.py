"""Hamiltonian delay equations from delay action functionals on loops in R^{2n}."""

from .errors import (
    BlowUpError,
    DimensionError,
    GridTooCoarseError,
    HamDelayError,
    InvalidDelayError,
    ModelSpecError,
    NotSkewSymmetricError,
    SolverBreakdownError,
)
from .functionals import (
    ClassicalFunctional,
    DoubleTimeProductFunctional,
    ExponentialFunctional,
    ResidualSystem,
    SumProductFunctional,
    TwoInputFunctional,
    action,
    classical_residual,
    energy_trace,
    grad_action,
    residual,
)
from .kernels import backend
from .loop_space import DelayShift, Loop, derivative, l2_inner, loop_average, quadrature, shift
from .lotka_volterra import LVModel, build_lv_functional, lv_delay_residual, lv_rhs, reduce_to_x
from .solvers import OrbitResult, SolverConfig, continue_in_tau, integrate_classical, solve_periodic
from .symplectic import (
    HamiltonianField,
    TimeDelayFamily,
    TwoInputHamiltonian,
    complex_structure,
    gradient_check,
    ham_vector_field,
    partial_vector_fields,
)

__version__ = "0.1.0"
