"""Separation of variables for rational and elliptic sl(2) Gaudin systems."""

from .special_functions import (
    KERNEL_PRODUCT_SIGN,
    AnnulusPoint,
    DomainError,
    EllipticParams,
    ParameterError,
    PoleError,
    canonicalize,
    euler_phi,
    lame_kernel,
    normalized_lame_kernel,
    theta,
    theta_log_deriv,
    weierstrass_p,
)
from .operators import (
    CoordinateMap,
    DifferentialOperator,
    OperatorError,
    VerificationReport,
    d_op,
    make_op,
    op_apply,
    op_commutator,
    op_compose,
    op_equal,
    op_pullback,
)
from .gaudin import (
    EllipticHamiltonians,
    GaudinModel,
    GaudinModelError,
    Sl2Rep,
    check_linear_relations,
    elliptic_hamiltonians,
    joint_spectrum,
    make_model,
    model_violations,
    rational_hamiltonians,
    rational_matrix_reports,
    sl2_rep,
    validate_model,
)
from .sov import (
    ChartBoundaryError,
    SeparatedCoordinates,
    SovError,
    UVector,
    build_hat_operators_rational,
    elliptic_u_to_w,
    elliptic_w_to_u,
    incidence_check,
    make_uvector,
    radon_generators,
    radon_hamiltonians_elliptic,
    radon_hamiltonians_rational,
    rational_u_to_w,
    rational_w_to_u,
    separated_operator,
    sov_jacobian_elliptic,
    sov_jacobian_rational,
    verify_elliptic_separation,
    verify_rational_separation,
)

from .bethe import (
    BetheError,
    MatchReport,
    SeparatedSolution,
    bethe_equations_rational,
    bethe_solve_elliptic,
    bethe_solve_rational,
    elliptic_single_valued_check,
    indicial_exponents,
    mu_from_ansatz_rational,
    singlet_solutions,
    spectrum_match,
    verify_separated_solution,
)

__all__ = [
    "KERNEL_PRODUCT_SIGN",
    "AnnulusPoint",
    "DomainError",
    "EllipticParams",
    "ParameterError",
    "PoleError",
    "canonicalize",
    "euler_phi",
    "lame_kernel",
    "normalized_lame_kernel",
    "theta",
    "theta_log_deriv",
    "weierstrass_p",
    "CoordinateMap",
    "DifferentialOperator",
    "OperatorError",
    "VerificationReport",
    "d_op",
    "make_op",
    "op_apply",
    "op_commutator",
    "op_compose",
    "op_equal",
    "op_pullback",
    "EllipticHamiltonians",
    "GaudinModel",
    "GaudinModelError",
    "Sl2Rep",
    "check_linear_relations",
    "elliptic_hamiltonians",
    "joint_spectrum",
    "make_model",
    "model_violations",
    "rational_hamiltonians",
    "rational_matrix_reports",
    "sl2_rep",
    "validate_model",
    "ChartBoundaryError",
    "SeparatedCoordinates",
    "SovError",
    "UVector",
    "build_hat_operators_rational",
    "elliptic_u_to_w",
    "elliptic_w_to_u",
    "incidence_check",
    "make_uvector",
    "radon_generators",
    "radon_hamiltonians_elliptic",
    "radon_hamiltonians_rational",
    "rational_u_to_w",
    "rational_w_to_u",
    "separated_operator",
    "sov_jacobian_elliptic",
    "sov_jacobian_rational",
    "verify_elliptic_separation",
    "verify_rational_separation",
    "BetheError",
    "MatchReport",
    "SeparatedSolution",
    "bethe_equations_rational",
    "bethe_solve_elliptic",
    "bethe_solve_rational",
    "elliptic_single_valued_check",
    "indicial_exponents",
    "mu_from_ansatz_rational",
    "singlet_solutions",
    "spectrum_match",
    "verify_separated_solution",
]

__version__ = "0.1.0"
