"""Charts, global frames, product-manifold lifting and Lie-derivative backends.

Everything here is chart-local: a manifold is represented by a single global
chart with a global frame of vector fields (the manifolds of interest are
parallelizable).  Derivatives along frame fields come in two interchangeable
flavours: exact forward-mode via hyper-dual numbers, and Richardson-extrapolated
central differences for functions that go through eigendecompositions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dual import HyperDual, value as primal_value


class DomainError(ValueError):
    """A coordinate vector lies outside the chart domain."""


class FrameError(ValueError):
    """Frame coefficient matrix is singular or malformed."""


class NumericError(ArithmeticError):
    """Non-finite values encountered during numerical differentiation."""


class SchemeError(ValueError):
    """Requested differentiation scheme cannot handle the given inputs."""


FORWARD_MODE = "forward_mode"
RICHARDSON = "richardson_central"

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class Chart:
    """A single global coordinate chart.

    ``step_scale`` lets a chart shrink finite-difference steps near the
    boundary of its domain (e.g. near the simplex boundary); it defaults to 1.
    """

    dimension: int
    contains: Callable[[np.ndarray], bool]
    label: str
    step_scale: Optional[Callable[[np.ndarray], float]] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("chart dimension must be >= 1")

    def require(self, coords):
        coords = np.asarray(coords)
        if coords.shape != (self.dimension,):
            raise DomainError(
                f"expected {self.dimension} coordinates on chart {self.label!r}, "
                f"got shape {coords.shape}"
            )
        if coords.dtype != object and not self.contains(coords):
            raise DomainError(f"coordinates {coords} outside domain of chart {self.label!r}")
        return coords

    def local_step(self, coords) -> float:
        if self.step_scale is None:
            return 1.0
        return float(self.step_scale(np.asarray(coords)))


@dataclass(frozen=True)
class Point:
    coords: np.ndarray
    chart: Chart

    def __post_init__(self):
        object.__setattr__(self, "coords", self.chart.require(self.coords))

    @property
    def chart_label(self):
        return self.chart.label


@dataclass(frozen=True)
class ProductPoint:
    left: Point
    right: Point

    def __post_init__(self):
        if self.left.chart_label != self.right.chart_label:
            raise DomainError("product point factors must live on the same chart")

    @property
    def chart(self):
        return self.left.chart

    def side(self, which):
        if which == LEFT:
            return self.left
        if which == RIGHT:
            return self.right
        raise ValueError(f"side must be 'left' or 'right', got {which!r}")

    def replace(self, which, point):
        if which == LEFT:
            return ProductPoint(point, self.right)
        return ProductPoint(self.left, point)

    def is_diagonal(self, tol=0.0):
        return bool(np.max(np.abs(self.left.coords - self.right.coords)) <= tol)


def diagonal(p: Point) -> ProductPoint:
    """Diagonal immersion m -> (m, m)."""
    return ProductPoint(p, p)


class Frame:
    """Global frame of vector fields on a chart.

    ``vector_coeffs(p)`` returns the square matrix X with rows X[j] holding
    the coordinate components of the j-th field at p.  ``flow`` produces the
    curve used for differentiation along field j; the default is the
    straight line p + s*X_j(p), which has the exact tangent at s = 0 and,
    nested, reproduces iterated Lie derivatives exactly.  Frames on Lie
    groups may override ``flow`` or supply exact coefficient functions.
    """

    def __init__(self, chart: Chart, vector_coeffs, label="frame", flow=None,
                 affine_flow=True):
        self.chart = chart
        self._vector_coeffs = vector_coeffs
        self.label = label
        self._flow = flow
        # affine_flow marks frames whose default straight-line flow and
        # coefficients are polynomial in the coordinates, hence hyper-dual safe
        self.affine_flow = affine_flow and flow is None

    def vector_coeffs(self, p: Point) -> np.ndarray:
        X = self._vector_coeffs(p)
        return X

    def analytic_brackets(self, p: Point):
        """Optional closed-form bracket tensor c[l, j, k]; None -> numeric."""
        return None

    def coframe_coeffs(self, p: Point) -> np.ndarray:
        X = np.asarray(self.vector_coeffs(p), dtype=float)
        try:
            theta = np.linalg.inv(X.T)
        except np.linalg.LinAlgError as exc:
            raise FrameError(f"singular frame matrix on chart {self.chart.label!r}") from exc
        return theta

    def flow(self, p: Point, j: int, s):
        if self._flow is not None:
            return self._flow(p, j, s)
        X = self.vector_coeffs(p)
        row = np.asarray(X)[j]
        coords = np.array([c + s * r for c, r in zip(p.coords, row)], dtype=None)
        if isinstance(s, HyperDual) or p.coords.dtype == object:
            coords = np.array(coords, dtype=object)
        else:
            coords = np.asarray(coords, dtype=float)
        return Point(coords, p.chart)


def coordinate_frame(chart: Chart) -> Frame:
    eye = np.eye(chart.dimension)
    return Frame(chart, lambda p: eye, label=f"coordinate({chart.label})")


def eval_frame(frame: Frame, p: Point):
    """Return (X, Theta) with duality Theta @ X.T = identity."""
    X = np.asarray(frame.vector_coeffs(p), dtype=float)
    theta = frame.coframe_coeffs(p)
    return X, theta


@dataclass(frozen=True)
class DifferentiationConfig:
    scheme: str = RICHARDSON
    base_step: float = 1e-2
    relative_tolerance: float = 1e-6
    extrapolation_levels: int = 2

    def __post_init__(self):
        if self.scheme not in (FORWARD_MODE, RICHARDSON):
            raise ValueError(f"unknown differentiation scheme {self.scheme!r}")
        if not self.base_step > 0:
            raise ValueError("base_step must be positive")
        if not 0 < self.relative_tolerance < 1:
            raise ValueError("relative_tolerance must lie in (0, 1)")


def _check_finite(v):
    v = primal_value(v)
    if not math.isfinite(v):
        raise NumericError("non-finite function value during differentiation")
    return v


def _richardson(samples, levels):
    """Collapse a list of estimates D(h), D(h/2), ... with O(h^2) error terms."""
    est = list(samples)
    for k in range(1, levels + 1):
        w = 4.0**k
        est = [(w * est[i + 1] - est[i]) / (w - 1.0) for i in range(len(est) - 1)]
    return est[0]


def _central_first(phi, h0, levels):
    samples = []
    for i in range(levels + 1):
        h = h0 / (2.0**i)
        samples.append((_check_finite(phi(h)) - _check_finite(phi(-h))) / (2.0 * h))
    return _richardson(samples, levels)


def _central_mixed(phi2, h0, levels):
    samples = []
    for i in range(levels + 1):
        h = h0 / (2.0**i)
        m = (
            _check_finite(phi2(h, h))
            - _check_finite(phi2(h, -h))
            - _check_finite(phi2(-h, h))
            + _check_finite(phi2(-h, -h))
        ) / (4.0 * h * h)
        samples.append(m)
    return _richardson(samples, levels)


def _move(pp: ProductPoint, side, j, s, frame: Frame) -> ProductPoint:
    return pp.replace(side, frame.flow(pp.side(side), j, s))


def _step_for(pp: ProductPoint, cfg) -> float:
    chart = pp.chart
    scale = min(chart.local_step(pp.left.coords), chart.local_step(pp.right.coords))
    return cfg.base_step * scale


def _require_forward_capable(frame: Frame):
    if not frame.affine_flow:
        raise SchemeError(
            "forward_mode requires a frame with straight-line flows; "
            f"frame {frame.label!r} uses a custom flow (use richardson_central)"
        )


def lie_derivative(f, side, j, pp: ProductPoint, frame: Frame,
                   cfg: DifferentiationConfig) -> float:
    """First Lie derivative of a two-point function along a lifted frame field."""
    if cfg.scheme == FORWARD_MODE:
        _require_forward_capable(frame)
        s = HyperDual(0.0, 1.0, 0.0, 0.0)
        out = f.evaluate(_move(pp, side, j, s, frame))
        if not isinstance(out, HyperDual):
            raise SchemeError(f"{f.label!r} does not propagate hyper-dual values")
        _check_finite(out.f)
        return out.d1
    h0 = _step_for(pp, cfg)
    return _central_first(
        lambda s: f.evaluate(_move(pp, side, j, s, frame)), h0, cfg.extrapolation_levels
    )


def second_lie_derivative(f, outer, inner, pp: ProductPoint, frame: Frame,
                          cfg: DifferentiationConfig) -> float:
    """L_outer L_inner f at pp, with outer/inner given as (side, index) pairs.

    Realized as d^2/ds du f(flow_inner^u(flow_outer^s(pp))), which reproduces
    the iterated Lie derivative exactly (coefficient variation included).
    """
    (side1, j), (side2, k) = outer, inner
    if cfg.scheme == FORWARD_MODE:
        _require_forward_capable(frame)
        s = HyperDual(0.0, 1.0, 0.0, 0.0)
        u = HyperDual(0.0, 0.0, 1.0, 0.0)
        moved = _move(_move(pp, side1, j, s, frame), side2, k, u, frame)
        out = f.evaluate(moved)
        if not isinstance(out, HyperDual):
            raise SchemeError(f"{f.label!r} does not propagate hyper-dual values")
        _check_finite(out.f)
        return out.d12
    h0 = _step_for(pp, cfg)

    def phi2(s, u):
        return f.evaluate(_move(_move(pp, side1, j, s, frame), side2, k, u, frame))

    return _central_mixed(phi2, h0, cfg.extrapolation_levels)


def lie_bracket_coefficients(frame: Frame, j, k, p: Point,
                             cfg: Optional[DifferentiationConfig] = None) -> np.ndarray:
    """Coefficients c with [X_j, X_k] = c^l X_l at p.

    Uses [X, Y]^r = X^s d_s Y^r - Y^s d_s X^r with central differences on the
    coefficient functions, then contracts with the coframe.
    """
    cfg = cfg or DifferentiationConfig()
    chart = p.chart
    d = chart.dimension
    X = np.asarray(frame.vector_coeffs(p), dtype=float)
    h0 = cfg.base_step * chart.local_step(p.coords)

    def coeffs_at(coords):
        return np.asarray(frame.vector_coeffs(Point(coords, chart)), dtype=float)

    # dX[s, j, r] = d_s X_j^r
    dX = np.empty((d, d, d))
    for s in range(d):
        samples = []
        for i in range(cfg.extrapolation_levels + 1):
            h = h0 / (2.0**i)
            e = np.zeros(d)
            e[s] = h
            samples.append((coeffs_at(p.coords + e) - coeffs_at(p.coords - e)) / (2.0 * h))
        dX[s] = _richardson(samples, cfg.extrapolation_levels)

    bracket = np.einsum("s,sr->r", X[j], dX[:, k, :]) - np.einsum(
        "s,sr->r", X[k], dX[:, j, :]
    )
    theta = frame.coframe_coeffs(p)
    return theta @ bracket


def lie_bracket_tensor(frame: Frame, p: Point,
                       cfg: Optional[DifferentiationConfig] = None) -> np.ndarray:
    """All bracket coefficients c[l, j, k] at p, preferring closed forms.

    The numeric fallback shares one coefficient-Jacobian computation across
    every pair, unlike repeated ``lie_bracket_coefficients`` calls.
    """
    analytic = frame.analytic_brackets(p)
    if analytic is not None:
        return np.asarray(analytic, dtype=float)
    cfg = cfg or DifferentiationConfig()
    chart = p.chart
    d = chart.dimension
    X = np.asarray(frame.vector_coeffs(p), dtype=float)
    h0 = cfg.base_step * chart.local_step(p.coords)

    def coeffs_at(coords):
        return np.asarray(frame.vector_coeffs(Point(coords, chart)), dtype=float)

    dX = np.empty((d, d, d))
    for s in range(d):
        samples = []
        for i in range(cfg.extrapolation_levels + 1):
            h = h0 / (2.0**i)
            e = np.zeros(d)
            e[s] = h
            samples.append((coeffs_at(p.coords + e) - coeffs_at(p.coords - e)) / (2.0 * h))
        dX[s] = _richardson(samples, cfg.extrapolation_levels)

    # bracket[j, k, r] = X_j^s d_s X_k^r - X_k^s d_s X_j^r
    xd = np.einsum("js,skr->jkr", X, dX)
    bracket = xd - xd.transpose(1, 0, 2)
    theta = frame.coframe_coeffs(p)
    return np.einsum("lr,jkr->ljk", theta, bracket)


def directional_derivative(fn, j, p: Point, frame: Frame,
                           cfg: DifferentiationConfig) -> float:
    """Derivative of a scalar function of a single point along frame field j."""
    if cfg.scheme == FORWARD_MODE:
        _require_forward_capable(frame)
        s = HyperDual(0.0, 1.0, 0.0, 0.0)
        out = fn(frame.flow(p, j, s))
        if not isinstance(out, HyperDual):
            raise SchemeError("function does not propagate hyper-dual values")
        return out.d1
    h0 = cfg.base_step * p.chart.local_step(p.coords)
    return _central_first(lambda s: fn(frame.flow(p, j, s)), h0, cfg.extrapolation_levels)


class ProductFrame:
    """The lifted frame {X_j acting on the left factor, Y_j on the right}.

    Index convention: fields 0..d-1 are the left lifts, d..2d-1 the right
    lifts; coefficient matrices are block-diagonal in adapted coordinates.
    """

    def __init__(self, frame: Frame):
        self.base = frame
        self.d = frame.chart.dimension

    def side_index(self, a):
        if a < self.d:
            return LEFT, a
        return RIGHT, a - self.d

    def vector_coeffs(self, pp: ProductPoint) -> np.ndarray:
        d = self.d
        out = np.zeros((2 * d, 2 * d))
        out[:d, :d] = np.asarray(self.base.vector_coeffs(pp.left), dtype=float)
        out[d:, d:] = np.asarray(self.base.vector_coeffs(pp.right), dtype=float)
        return out

    def flow(self, pp: ProductPoint, a, s) -> ProductPoint:
        side, j = self.side_index(a)
        return _move(pp, side, j, s, self.base)

    def lie_derivative(self, f, a, pp, cfg):
        side, j = self.side_index(a)
        return lie_derivative(f, side, j, pp, self.base, cfg)

    def second_lie_derivative(self, f, a, b, pp, cfg):
        return second_lie_derivative(
            f, self.side_index(a), self.side_index(b), pp, self.base, cfg
        )


def lift_frame(frame: Frame) -> ProductFrame:
    return ProductFrame(frame)
