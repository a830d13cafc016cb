"""Two-point functions: divergences on the simplex, Euclidean space and states.

A ``TwoPointFunction`` wraps a scalar function on M x M together with the
chart it is defined over; divergences are the special case that vanishes with
vanishing first derivatives on the diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import dual
from .extraction import DivergenceAxiomError, check_diagonal_divergence
from .geometry import (
    Chart,
    DifferentiationConfig,
    DomainError,
    Frame,
    Point,
    ProductPoint,
    coordinate_frame,
    diagonal,
    lie_derivative,
)
from .simplex import PROB_FLOOR, SUM_TOL, full_probs


@dataclass(frozen=True)
class TwoPointFunction:
    evaluate: Callable[[ProductPoint], float]
    label: str
    chart_label: str

    def __call__(self, pp: ProductPoint):
        return self.evaluate(pp)


def kl_divergence(p: Sequence[float], q: Sequence[float]) -> float:
    """KL divergence between two probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise DomainError("probability vectors must share a common length")
    if np.any(p <= PROB_FLOOR) or np.any(q <= PROB_FLOOR):
        raise DomainError(f"entries must exceed the floor {PROB_FLOOR}")
    for v in (p, q):
        if abs(v.sum() - 1.0) > SUM_TOL:
            raise DomainError("vectors must be normalized within tolerance")
    p = p / p.sum()
    q = q / q.sum()
    return float(np.sum(p * np.log(p / q)))


def kl_two_point(n: int) -> TwoPointFunction:
    """KL on simplex chart coordinates; propagates hyper-dual perturbations."""

    def evaluate(pp: ProductPoint):
        ps = full_probs(pp.left.coords)
        qs = full_probs(pp.right.coords)
        return sum(pj * dual.log(pj / qj) for pj, qj in zip(ps, qs))

    return TwoPointFunction(evaluate, "kl", f"simplex({n})")


def euclidean_chart(d: int) -> Chart:
    return Chart(d, lambda c: True, f"euclid({d})")


def quadratic_divergence(x, y) -> float:
    return 0.5 * float(np.sum((np.asarray(x) - np.asarray(y)) ** 2))


def quadratic_two_point(d: int) -> TwoPointFunction:
    """F(x, y) = |x - y|^2 / 2 on R^d; hyper-dual safe."""

    def evaluate(pp: ProductPoint):
        acc = 0.0
        for a, b in zip(pp.left.coords, pp.right.coords):
            diff = a - b
            acc = acc + 0.5 * diff * diff
        return acc

    return TwoPointFunction(evaluate, "quadratic", f"euclid({d})")


def umegaki_entropy(rho, sigma) -> float:
    """Umegaki relative entropy Tr(rho ln rho) - Tr(rho ln sigma)."""
    from .quantum import DensityMatrix, matrix_log_pd

    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    if not isinstance(sigma, DensityMatrix):
        sigma = DensityMatrix(sigma)
    r, s = rho.matrix, sigma.matrix
    return float(np.trace(r @ (matrix_log_pd(r) - matrix_log_pd(s))).real)


@dataclass(frozen=True)
class AxiomReport:
    label: str
    points_checked: int
    max_diagonal_value: float
    max_diagonal_gradient: float
    passed: bool


def check_divergence_axioms(f: TwoPointFunction, frame: Frame,
                            sampler: Callable[[int], Point], n_points: int,
                            cfg: DifferentiationConfig,
                            value_tol: float = 1e-9,
                            gradient_tol: float = 1e-6) -> AxiomReport:
    """Sample points and verify F = 0 and dF = 0 on the diagonal."""
    max_v = 0.0
    max_g = 0.0
    d = frame.chart.dimension
    for i in range(n_points):
        p = sampler(i)
        pp = diagonal(p)
        max_v = max(max_v, abs(dual.value(f.evaluate(pp))))
        for side in ("left", "right"):
            for j in range(d):
                max_g = max(max_g, abs(lie_derivative(f, side, j, pp, frame, cfg)))
    passed = max_v <= value_tol and max_g <= gradient_tol
    return AxiomReport(f.label, n_points, max_v, max_g, passed)


def require_divergence(f: TwoPointFunction, p: Point, frame: Frame,
                       cfg: DifferentiationConfig):
    """Raise DivergenceAxiomError unless f behaves as a divergence at p."""
    check_diagonal_divergence(f, p, frame, cfg)


__all__ = [
    "TwoPointFunction",
    "AxiomReport",
    "DivergenceAxiomError",
    "kl_divergence",
    "kl_two_point",
    "euclidean_chart",
    "quadratic_divergence",
    "quadratic_two_point",
    "umegaki_entropy",
    "check_divergence_axioms",
    "require_divergence",
    "coordinate_frame",
]
