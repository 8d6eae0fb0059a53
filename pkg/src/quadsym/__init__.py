"""Symplectic propagators and uncertainty relations for quadratic Hamiltonians."""

from .canonical import (
    ClassicalTrajectory,
    PropagationResult,
    SymplecticMatrix,
    compose,
    propagate_lambda1,
    propagate_lambda2,
    random_symplectic,
    rotation_ct,
    solve_classical_z,
    squeeze_ct,
    stationary_total_lambda,
)
from .errors import (
    ArgumentError,
    DivergenceError,
    QuadsymError,
    SingularityError,
    ValidationError,
)
from .hamiltonian import (
    HamiltonianSpec,
    assemble_grand_matrix,
    omega_squared,
    preset,
    target_oscillator,
)
from .matcore import (
    characteristic_coefficient,
    check_positive_definite,
    matrix_exponential,
    resymplectify,
    symplectic_defect,
    symplectic_form,
)
from .states import (
    GaussianState,
    apply_ct,
    coherent_state,
    fock_state,
    random_valid_state,
    validate_state,
)
from .uncertainty import (
    UncertaintyReport,
    WilliamsonDecomposition,
    analyze,
    block_conditions,
    block_robertson_margin,
    characteristic_margins,
    commutator_matrix,
    heisenberg_lambda_form,
    normalized_sigma,
    robertson_margin,
    robertson_minimality,
    schrodinger_margin,
    symplectic_sigma_test,
    williamson,
)

__version__ = "0.1.0"
