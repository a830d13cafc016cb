"""Numerical extraction of pre-symplectic forms and metrics from divergences.

A divergence function F on M x M, together with the canonical almost-complex
structure J on the product, determines a two-form omega_F = d(dF o J) and a
metric-like tensor g_F = omega_F(J(.), .).  This package evaluates both
numerically on parallelizable statistical manifolds (the open probability
simplex, SU(H) x simplex, punctured Hilbert space) and checks them against
closed forms such as the Fisher-Rao metric.
"""
from .dual import HyperDual
from .geometry import (
    FORWARD_MODE,
    RICHARDSON,
    Chart,
    DifferentiationConfig,
    DomainError,
    Frame,
    FrameError,
    NumericError,
    Point,
    ProductPoint,
    SchemeError,
    coordinate_frame,
    diagonal,
    lie_derivative,
    lift_frame,
    second_lie_derivative,
)
from .extraction import (
    CovariantTensor2,
    DivergenceAxiomError,
    apply_J,
    extract_divergence_metric,
    g_F,
    omega_F,
    omega_pullback_diagonal,
    pullback_diagonal,
)
from .divergences import (
    TwoPointFunction,
    check_divergence_axioms,
    kl_divergence,
    kl_two_point,
    quadratic_two_point,
    umegaki_entropy,
)
from .simplex import (
    SimplexPoint,
    fisher_rao_metric,
    kl_metric_closed_form,
    simplex_chart,
    simplex_frame,
)
from .quantum import (
    DensityMatrix,
    GellMannBasis,
    UnfoldedQuantumPoint,
    gell_mann_basis,
    product_chart,
    structure_constants,
    umegaki_metric_closed_form,
    umegaki_two_point,
    unfold,
)
from .pure_states import (
    AmplitudeCoordinates,
    HilbertPoint,
    amplitude_embedding,
    complex_structure_H0,
    hermitian_tensor_h,
    kahler_from_potential,
    verify_fisher_rao_recovery,
)

__version__ = "0.1.0"
