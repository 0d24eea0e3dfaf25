"""Twisted differential operators over p-adic annuli."""

from .annulus import (
    AdmissibilityError,
    Annulus,
    Endomorphism,
    LaurentElement,
    NotAUnit,
    contractivity_check,
    endo_apply,
    endo_iterate,
    endo_validate,
    eta_admissible,
    gauss_norm,
    invert,
    x_radius,
)
from .confluence import (
    ConnectionModule,
    LogDivergent,
    NotConvergentAtOrderK,
    PrecisionExhausted,
    SigmaModule,
    confluence_transform,
    h_complex_sample_check,
    log_derivative_form,
    sigma_act,
    sigma_structure_identity_check,
)
from .config import Config, ConfigError, load_config
from .deformation import DeformationPlan, PlanMismatch, basis_change_matrix, deform, deform_operator, deform_order1_closed
from .derivatives import eta_convergent_check, radius_estimate, std_apply, taylor_expand
from .operators import TwistedOperator, op_apply, op_compose, op_norm, strong_map, strong_predicate, xi_action
from .padic import LogNorm, PadicScalar, PrecisionError, Qp, qbinom, qbinom_table, qfact, qint, qints_invertible_upto
from .xi import XiPolynomial, xi_expand, xi_mul, xi_to_divided, xi_to_monomial

__version__ = "0.1.0"
