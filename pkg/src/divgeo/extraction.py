"""Almost-complex structure on M x M and tensor extraction from divergences.

The (1,1) tensor J sends the left-lifted frame fields to the right-lifted
ones and vice versa with a sign; the 1-form gamma = dF o J then yields the
pre-symplectic form omega_F = d(gamma) by the invariant exterior-derivative
evaluation, and the metric-like tensor g_F(Z, W) = omega_F(J(Z), W).

All tensors are stored as evaluations on ordered pairs of frame fields
("evaluation convention"), never as wedge or symmetrized-product
coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import (
    LEFT,
    RIGHT,
    DifferentiationConfig,
    DomainError,
    Frame,
    Point,
    ProductPoint,
    diagonal,
    lie_bracket_tensor,
    lie_derivative,
    second_lie_derivative,
)


class DivergenceAxiomError(ValueError):
    """The two-point function fails the divergence conditions at the point."""


SYM_TOL = 1e-10


def _classify_symmetry(g: np.ndarray) -> str:
    scale = max(1.0, float(np.max(np.abs(g))))
    if np.max(np.abs(g - g.T)) <= SYM_TOL * scale:
        return "symmetric"
    if np.max(np.abs(g + g.T)) <= SYM_TOL * scale:
        return "antisymmetric"
    return "none"


@dataclass(frozen=True)
class CovariantTensor2:
    """Component matrix of a (0,2) tensor: components[a, b] = T(Z_a, Z_b)."""

    components: np.ndarray
    frame_tag: str
    base_point: object
    symmetry: str = field(default="")

    def __post_init__(self):
        g = np.asarray(self.components, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("tensor components must form a square matrix")
        object.__setattr__(self, "components", g)
        if not self.symmetry:
            object.__setattr__(self, "symmetry", _classify_symmetry(g))


def apply_J(v: np.ndarray) -> np.ndarray:
    """J on product tangent components: (a, b) -> (-b, a), exactly."""
    v = np.asarray(v)
    if v.ndim != 1 or v.size % 2 != 0:
        raise ValueError("expected a component vector of even length 2d")
    d = v.size // 2
    return np.concatenate([-v[d:], v[:d]])


_SIDES = (LEFT, RIGHT)


def _side_of(a, d):
    return (LEFT, a) if a < d else (RIGHT, a - d)


def _gamma_value(f, a, d, first_derivs):
    """gamma(Z_a) from cached first Lie derivatives.

    gamma(X_k) = L_Y_k F and gamma(Y_k) = -L_X_k F.
    """
    side, k = _side_of(a, d)
    if side == LEFT:
        return first_derivs[(RIGHT, k)]
    return -first_derivs[(LEFT, k)]


def _first_derivs(f, pp, frame, cfg, d):
    return {
        (side, k): lie_derivative(f, side, k, pp, frame, cfg)
        for side in _SIDES
        for k in range(d)
    }


def _bracket_cache(frame, pp, cfg, d):
    """Bracket coefficients of the base frame at both factor points."""
    cache = {}
    for side in _SIDES:
        if side == RIGHT and pp.is_diagonal():
            cache[RIGHT] = cache[LEFT]
            break
        c = lie_bracket_tensor(frame, pp.side(side), cfg)
        # reindex: lie_bracket_tensor returns c[l, j, k]
        cache[side] = c
    return cache


def _constant_coeff_frame(frame, pp):
    x1 = np.asarray(frame.vector_coeffs(pp.left), dtype=float)
    x2 = np.asarray(frame.vector_coeffs(pp.right), dtype=float)
    return frame.affine_flow and np.array_equal(x1, x2)


def _lie_of_gamma(f, a, b, pp, frame, cfg, d):
    """L_{Z_a} (gamma(Z_b)) as a single nested derivative."""
    side_b, k = _side_of(b, d)
    outer = _side_of(a, d)
    if side_b == LEFT:
        return second_lie_derivative(f, outer, (RIGHT, k), pp, frame, cfg)
    return -second_lie_derivative(f, outer, (LEFT, k), pp, frame, cfg)


def omega_F(f, pp: ProductPoint, frame: Frame, cfg: DifferentiationConfig,
            brackets_vanish: Optional[bool] = None) -> CovariantTensor2:
    """Full 2d x 2d pre-symplectic evaluations at a product point.

    omega(Z_a, Z_b) = L_{Z_a} gamma(Z_b) - L_{Z_b} gamma(Z_a) - gamma([Z_a, Z_b]);
    brackets only contribute when both fields lift from the same factor.
    Every entry is computed independently, so antisymmetry is a genuine
    numerical check rather than a storage convention.
    """
    d = frame.chart.dimension
    if brackets_vanish is None:
        brackets_vanish = _constant_coeff_frame(frame, pp)
    firsts = _first_derivs(f, pp, frame, cfg, d)
    brackets = None if brackets_vanish else _bracket_cache(frame, pp, cfg, d)

    g = np.zeros((2 * d, 2 * d))
    for a in range(2 * d):
        for b in range(2 * d):
            if a == b:
                continue
            val = _lie_of_gamma(f, a, b, pp, frame, cfg, d) - _lie_of_gamma(
                f, b, a, pp, frame, cfg, d
            )
            side_a, j = _side_of(a, d)
            side_b, k = _side_of(b, d)
            if side_a == side_b and brackets is not None:
                c = brackets[side_a][:, j, k]
                base = d if side_a == RIGHT else 0
                val -= sum(
                    c[l] * _gamma_value(f, base + l, d, firsts) for l in range(d)
                )
            g[a, b] = val
    return CovariantTensor2(g, f"lifted({frame.label})", pp)


def omega_block_expansion(f, pp: ProductPoint, frame: Frame,
                          cfg: DifferentiationConfig,
                          brackets_vanish: Optional[bool] = None) -> CovariantTensor2:
    """Cross-check route: assemble omega from its explicit block expansion.

    Wedge coefficients are evaluated on frame pairs, which antisymmetrizes
    the (not manifestly antisymmetric) printed coefficients.
    """
    d = frame.chart.dimension
    if brackets_vanish is None:
        brackets_vanish = _constant_coeff_frame(frame, pp)
    firsts = _first_derivs(f, pp, frame, cfg, d)
    brackets = None if brackets_vanish else _bracket_cache(frame, pp, cfg, d)

    lxy = np.array(
        [
            [second_lie_derivative(f, (LEFT, j), (RIGHT, k), pp, frame, cfg) for k in range(d)]
            for j in range(d)
        ]
    )
    lxx = np.array(
        [
            [second_lie_derivative(f, (LEFT, j), (LEFT, k), pp, frame, cfg) for k in range(d)]
            for j in range(d)
        ]
    )
    lyy = np.array(
        [
            [second_lie_derivative(f, (RIGHT, j), (RIGHT, k), pp, frame, cfg) for k in range(d)]
            for j in range(d)
        ]
    )

    fy = np.array([firsts[(RIGHT, l)] for l in range(d)])
    fx = np.array([firsts[(LEFT, l)] for l in range(d)])
    axx = lxy.copy()
    ayy = lxy.T.copy()
    if brackets is not None:
        axx -= 0.5 * np.einsum("l,ljk->jk", fy, brackets[LEFT])
        ayy += 0.5 * np.einsum("l,ljk->jk", fx, brackets[RIGHT])

    # coefficient of beta^k wedge alpha^j -> omega(X_a, Y_b) picks -C[a, b]
    cxy = lyy.T + lxx

    g = np.zeros((2 * d, 2 * d))
    g[:d, :d] = axx - axx.T
    g[d:, d:] = ayy - ayy.T
    g[:d, d:] = -cxy
    g[d:, :d] = cxy.T
    return CovariantTensor2(g, f"lifted({frame.label})", pp)


def _J_rows(g_omega: np.ndarray) -> np.ndarray:
    d = g_omega.shape[0] // 2
    g = np.empty_like(g_omega)
    g[:d, :] = g_omega[d:, :]
    g[d:, :] = -g_omega[:d, :]
    return g


def g_F(f, pp: ProductPoint, frame: Frame, cfg: DifferentiationConfig,
        omega: Optional[CovariantTensor2] = None) -> CovariantTensor2:
    """Metric-like evaluations g(Z_a, Z_b) = omega(J(Z_a), Z_b)."""
    if omega is None:
        omega = omega_F(f, pp, frame, cfg)
    return CovariantTensor2(_J_rows(omega.components), omega.frame_tag, pp)


DIAGONAL_TOL = 1e-12


def pullback_diagonal(t: CovariantTensor2, frame: Frame) -> CovariantTensor2:
    """Restrict a product tensor at a diagonal point to the base manifold.

    The diagonal immersion pushes the base field X_j to the sum of its two
    lifts; evaluations are averaged over the two redundant copies, i.e.
    (i_d* t)_{jk} = t(X_j + Y_j, X_k + Y_k) / 2, which reproduces the
    expected diagonal values (e.g. 2 x Fisher-Rao for KL).
    """
    pp = t.base_point
    if not isinstance(pp, ProductPoint) or not pp.is_diagonal(DIAGONAL_TOL):
        raise DomainError("pullback requires a tensor based at a diagonal point")
    g = t.components
    d = g.shape[0] // 2
    pulled = 0.5 * (g[:d, :d] + g[:d, d:] + g[d:, :d] + g[d:, d:])
    return CovariantTensor2(pulled, frame.label, pp.left)


def check_diagonal_divergence(f, p: Point, frame: Frame, cfg: DifferentiationConfig,
                              value_tol=1e-9, gradient_tol=1e-6):
    pp = diagonal(p)
    from .dual import value as primal_value

    v = primal_value(f.evaluate(pp))
    if abs(v) > value_tol:
        raise DivergenceAxiomError(
            f"{f.label!r} does not vanish on the diagonal at {p.coords}: {v}"
        )
    d = frame.chart.dimension
    for side in _SIDES:
        for j in range(d):
            g1 = lie_derivative(f, side, j, pp, frame, cfg)
            if abs(g1) > gradient_tol:
                raise DivergenceAxiomError(
                    f"first Lie derivative of {f.label!r} is {g1} along "
                    f"{side} field {j} at the diagonal"
                )


def extract_divergence_metric(f, p: Point, frame: Frame, cfg: DifferentiationConfig,
                              check: bool = True) -> CovariantTensor2:
    """Diagonal metric G_jk = -(L_Xj L_Yk F + L_Xk L_Yj F)|diag."""
    if check:
        check_diagonal_divergence(f, p, frame, cfg)
    pp = diagonal(p)
    d = frame.chart.dimension
    m = np.array(
        [
            [second_lie_derivative(f, (LEFT, j), (RIGHT, k), pp, frame, cfg) for k in range(d)]
            for j in range(d)
        ]
    )
    return CovariantTensor2(-(m + m.T), frame.label, p)


def metric_same_side_route(f, p: Point, frame: Frame, cfg: DifferentiationConfig,
                           side: str = LEFT) -> CovariantTensor2:
    """Equivalent route +(L L + L L) on a single factor, for cross-checks."""
    pp = diagonal(p)
    d = frame.chart.dimension
    m = np.array(
        [
            [second_lie_derivative(f, (side, j), (side, k), pp, frame, cfg) for k in range(d)]
            for j in range(d)
        ]
    )
    return CovariantTensor2(m + m.T, frame.label, p)


def omega_pullback_diagonal(f, p: Point, frame: Frame,
                            cfg: DifferentiationConfig,
                            brackets_vanish: Optional[bool] = None) -> CovariantTensor2:
    """i_d* omega_F computed directly on the pushed-forward fields.

    Entry (j, k) evaluates d(gamma) on (X_j + Y_j, X_k + Y_k); only the
    upper triangle is computed (the formula is antisymmetric term by term).
    """
    pp = diagonal(p)
    d = frame.chart.dimension
    if brackets_vanish is None:
        brackets_vanish = _constant_coeff_frame(frame, pp)
    firsts = _first_derivs(f, pp, frame, cfg, d)
    bracket = (
        None
        if brackets_vanish
        else _bracket_cache(frame, pp, cfg, d)[LEFT]  # same point on both sides
    )

    def move_both(q, j, s):
        return ProductPoint(frame.flow(q.left, j, s), frame.flow(q.right, j, s))

    def gamma_combined(l):
        return firsts[(RIGHT, l)] - firsts[(LEFT, l)]

    from .geometry import _central_mixed, _step_for

    h0 = _step_for(pp, cfg)

    def lie_combined(j, k):
        # L_{Xj+Yj} (gamma(Xk + Yk)) as one mixed stencil
        def phi2(s, u):
            moved = move_both(pp, j, s)
            right = moved.replace(RIGHT, frame.flow(moved.right, k, u))
            left = moved.replace(LEFT, frame.flow(moved.left, k, u))
            return f.evaluate(right) - f.evaluate(left)

        return _central_mixed(phi2, h0, cfg.extrapolation_levels)

    g = np.zeros((d, d))
    for j in range(d):
        for k in range(j + 1, d):
            val = lie_combined(j, k) - lie_combined(k, j)
            if bracket is not None:
                val -= sum(bracket[l, j, k] * gamma_combined(l) for l in range(d))
            g[j, k] = 0.5 * val
            g[k, j] = -0.5 * val
    return CovariantTensor2(g, frame.label, p, symmetry="antisymmetric")
