"""The open probability simplex: chart, difference frame and closed forms.

The chart uses the first N-1 probabilities as coordinates with
p^N = 1 - sum of the rest.  The frame fields are the differences
P_j = d/dp^j - d/dp^{j+1}; their coefficient matrix is constant, so all
mutual brackets vanish.  The dual coframe is obtained as the matrix inverse
of the coefficient matrix (duality is the defining property).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extraction import CovariantTensor2
from .geometry import Chart, DomainError, Frame, Point

PROB_FLOOR = 1e-9
SUM_TOL = 1e-12


@dataclass(frozen=True)
class SimplexPoint:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise DomainError("probability vector must have length >= 2")
        if np.any(p <= PROB_FLOOR):
            raise DomainError(f"probability entries must exceed the floor {PROB_FLOOR}")
        total = p.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"probabilities sum to {total}, not 1 within {SUM_TOL}")
        object.__setattr__(self, "probs", p / total)

    @property
    def n(self):
        return self.probs.size


def simplex_chart(n: int, floor: float = PROB_FLOOR) -> Chart:
    if n < 2:
        raise ValueError("simplex needs at least two outcomes")

    def contains(coords):
        if np.any(coords <= floor):
            return False
        return 1.0 - coords.sum() > floor

    def step_scale(coords):
        last = 1.0 - coords.sum()
        return min(1.0, 4.0 * min(float(coords.min()), float(last)))

    return Chart(n - 1, contains, f"simplex({n})", step_scale=step_scale)


def chart_coords(sp: SimplexPoint) -> np.ndarray:
    return sp.probs[:-1].copy()


def full_probs(coords):
    """Reconstruct the ambient probability vector; hyper-dual safe."""
    last = 1.0 - sum(coords)
    return list(coords) + [last]


def simplex_point(p: Point) -> SimplexPoint:
    return SimplexPoint(np.asarray(full_probs(p.coords), dtype=float))


def _p_coefficients(n: int) -> np.ndarray:
    # row j: components of P_j on the chart coordinates p^1..p^{N-1}
    x = np.zeros((n - 1, n - 1))
    for j in range(n - 1):
        x[j, j] = 1.0
        if j + 1 < n - 1:
            x[j, j + 1] = -1.0
    return x


def simplex_frame(n: int, chart: Chart | None = None) -> Frame:
    chart = chart or simplex_chart(n)
    x = _p_coefficients(n)
    return Frame(chart, lambda p: x, label=f"P-frame({n})")


def ambient_directions(n: int) -> np.ndarray:
    """Rows v_j = e_j - e_{j+1}, the ambient representation of the P fields."""
    v = np.zeros((n - 1, n))
    for j in range(n - 1):
        v[j, j] = 1.0
        v[j, j + 1] = -1.0
    return v


def fisher_rao_matrix(sp: SimplexPoint) -> np.ndarray:
    """Fisher-Rao evaluations G_jk = sum_r v_j^r v_k^r / p^r in the P frame."""
    v = ambient_directions(sp.n)
    return np.einsum("jr,kr,r->jk", v, v, 1.0 / sp.probs)


def fisher_rao_metric(sp: SimplexPoint) -> CovariantTensor2:
    chart = simplex_chart(sp.n)
    base = Point(chart_coords(sp), chart)
    return CovariantTensor2(fisher_rao_matrix(sp), f"P-frame({sp.n})", base)


def kl_metric_closed_form(sp: SimplexPoint) -> CovariantTensor2:
    """Tridiagonal closed form of the KL-extracted metric in the P frame.

    Built entry by entry from a direct case analysis (diagonal
    2(1/p^j + 1/p^{j+1}), off-diagonals -2/p at |j-k| = 1), independently of
    ``fisher_rao_matrix``; it equals exactly twice the Fisher-Rao matrix.
    """
    p = sp.probs
    m = sp.n - 1
    g = np.zeros((m, m))
    for j in range(m):
        g[j, j] = 2.0 * (1.0 / p[j] + 1.0 / p[j + 1])
        if j + 1 < m:
            g[j, j + 1] = -2.0 / p[j + 1]  # case j+1 = k
            g[j + 1, j] = -2.0 / p[j + 1]  # case k+1 = j, entry -2/p^j with j=k+1
    chart = simplex_chart(sp.n)
    base = Point(chart_coords(sp), chart)
    return CovariantTensor2(g, f"P-frame({sp.n})", base)
