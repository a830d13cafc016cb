"""The unfolded quantum manifold SU(H) x open simplex.

Generators of su(N) in the generalized Gell-Mann normalization
Tr(tau_a tau_b) = -delta_ab, structure constants, exponential-coordinate
charts with exact left-invariant frame coefficients (via the inverse
differential of the exponential), the unfolding map (U, p) -> U diag(p) U+,
and the closed-form blocks of the Umegaki-extracted metric.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .extraction import CovariantTensor2, extract_divergence_metric
from .geometry import Chart, DifferentiationConfig, DomainError, Frame, Point
from .simplex import (
    SimplexPoint,
    chart_coords,
    fisher_rao_matrix,
    full_probs,
    simplex_chart,
    simplex_frame,
)

UNITARY_TOL = 1e-10
EIG_FLOOR = 1e-12
DISTINCT_GAP = 1e-6


@dataclass(frozen=True)
class GellMannBasis:
    """Anti-Hermitian traceless generators with Tr(tau_a tau_b) = -delta_ab.

    Ordering: all lambda_{j,mu} (j < mu, lexicographic), then all sigma_{j,mu},
    then the Cartan elements e_j.  The printed Cartan matrices are Hermitian
    diagonal; the factor i makes them members of su(N) with the same
    normalization as the off-diagonal generators.
    """

    n: int
    generators: np.ndarray  # (N^2 - 1, N, N) complex
    labels: tuple

    @property
    def dim(self):
        return self.n * self.n - 1

    def cartan_slice(self):
        off = self.n * (self.n - 1) // 2
        return slice(2 * off, self.dim)


def gell_mann_basis(n: int) -> GellMannBasis:
    if n < 2:
        raise ValueError("need Hilbert dimension >= 2")
    gens = []
    labels = []
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for j in range(n):
        for mu in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, mu] = 1.0
            m[mu, j] = 1.0
            gens.append(1j * inv_sqrt2 * m)
            labels.append(f"lambda_{j + 1}{mu + 1}")
    for j in range(n):
        for mu in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, mu] = 1.0
            m[mu, j] = -1.0
            gens.append(-inv_sqrt2 * m)
            labels.append(f"sigma_{j + 1}{mu + 1}")
    for j in range(1, n):
        alpha = 1.0 / np.sqrt(j * (j + 1))
        diag = np.zeros(n, dtype=complex)
        diag[:j] = -1.0
        diag[j] = j
        gens.append(1j * alpha * np.diag(diag))
        labels.append(f"e_{j}")
    return GellMannBasis(n, np.array(gens), tuple(labels))


def structure_constants(basis: GellMannBasis) -> np.ndarray:
    """c[a, b, c] with [tau_b, tau_c] = sum_a c[a, b, c] tau_a."""
    t = basis.generators
    comm = np.einsum("bij,cjk->bcik", t, t) - np.einsum("cij,bjk->bcik", t, t)
    # expansion coefficient via the trace inner product Tr(tau_a tau_b) = -delta
    c = -np.einsum("bcik,aki->abc", comm, t)
    c = np.real_if_close(c, tol=1e6)
    return np.real(c)


@dataclass(frozen=True)
class UnfoldedQuantumPoint:
    u: np.ndarray
    p: SimplexPoint

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        n = self.p.n
        if u.shape != (n, n):
            raise DomainError(f"unitary must be {n}x{n} to match the probability vector")
        if np.max(np.abs(u.conj().T @ u - np.eye(n))) > UNITARY_TOL:
            raise DomainError("matrix is not unitary within tolerance")
        if abs(np.linalg.det(u) - 1.0) > UNITARY_TOL:
            raise DomainError("unitary must have determinant 1 (special unitary)")
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise DomainError("density matrix must be Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise DomainError("density matrix must have unit trace")
        if np.min(np.linalg.eigvalsh(m)) <= 0:
            raise DomainError("density matrix must be positive definite (faithful)")
        object.__setattr__(self, "matrix", m)


def unfold(pt: UnfoldedQuantumPoint) -> DensityMatrix:
    rho0 = np.diag(pt.p.probs).astype(complex)
    return DensityMatrix(pt.u @ rho0 @ pt.u.conj().T)


def matrix_log_pd(h: np.ndarray, floor: float = EIG_FLOOR) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise DomainError("matrix logarithm requires a Hermitian input")
    w, v = np.linalg.eigh(h)
    if np.min(w) <= floor:
        raise DomainError(f"eigenvalue {np.min(w)} at or below floor {floor}")
    return (v * np.log(w)) @ v.conj().T


def expm_antihermitian(a: np.ndarray) -> np.ndarray:
    """exp of an anti-Hermitian matrix via the spectral decomposition."""
    w, v = np.linalg.eigh(-1j * np.asarray(a, dtype=complex))
    return (v * np.exp(1j * w)) @ v.conj().T


def _phi_dexpinv(m: np.ndarray) -> np.ndarray:
    """phi(ad) with phi(z) = z / (1 - exp(-z)); coefficients of left-invariant
    fields in exponential coordinates.

    The ad matrix is real antisymmetric in an orthonormal basis (totally
    antisymmetric structure constants), so i*ad is Hermitian and the spectral
    calculus applies exactly.
    """
    w, v = np.linalg.eigh(1j * m)  # m = v diag(-i w) v+
    z = -1j * w.astype(complex)
    small = np.abs(z) < 1e-8
    fw = np.empty_like(z)
    zb = z[~small]
    fw[~small] = zb / (1.0 - np.exp(-zb))
    zs = z[small]
    fw[small] = 1.0 + zs / 2.0 + zs * zs / 12.0
    return np.real((v * fw) @ v.conj().T)


class SuFrame(Frame):
    """Left-invariant frame in exponential coordinates around a base unitary."""

    def __init__(self, chart, basis: GellMannBasis, u0: np.ndarray):
        self.basis = basis
        self.u0 = np.asarray(u0, dtype=complex)
        c = structure_constants(basis)
        # ad matrix of sum_a t^a tau_a in the tau basis: M[r, b] = sum_a t^a c[r, a, b]
        self._ad = c
        self._cache = {}
        super().__init__(chart, self._coeffs, label=f"su({basis.n})-left", affine_flow=False)
        self.affine_flow = False

    def _coeffs(self, p: Point):
        t = np.asarray(p.coords, dtype=float)
        key = t.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        m = np.einsum("a,rab->rb", t, self._ad)
        phi = _phi_dexpinv(m)
        # field j has coordinate components phi[:, j]
        x = phi.T
        if len(self._cache) > 20000:
            self._cache.clear()
        self._cache[key] = x
        return x

    def analytic_brackets(self, p: Point):
        # left-invariant fields: [X_j, X_k] = c^l_{jk} X_l with constant c
        return self._ad

    def unitary_at(self, p: Point) -> np.ndarray:
        a = np.einsum("a,aij->ij", np.asarray(p.coords, dtype=float), self.basis.generators)
        return self.u0 @ expm_antihermitian(a)


def su_chart_at(u0: np.ndarray, basis: GellMannBasis, radius: float = 1.0):
    """Exponential-coordinate chart t -> U0 exp(sum t^a tau_a) with its frame."""
    dim = basis.dim

    def contains(coords):
        return float(np.linalg.norm(coords)) < radius

    chart = Chart(dim, contains, f"su({basis.n})@exp")
    frame = SuFrame(chart, basis, u0)
    return chart, frame


class ProductQuantumFrame(Frame):
    """Block frame on SU(H) x simplex: left-invariant fields then P fields."""

    def __init__(self, chart, basis: GellMannBasis, u0: np.ndarray):
        self.basis = basis
        self.nq = basis.dim
        n = basis.n
        _, self.su = su_chart_at(u0, basis)
        self.simplex = simplex_frame(n)
        super().__init__(chart, self._coeffs, label=f"su({n})xP({n})", affine_flow=False)
        self.affine_flow = False

    def _split(self, p: Point):
        t = np.asarray(p.coords[: self.nq], dtype=float)
        pc = np.asarray(p.coords[self.nq:], dtype=float)
        return t, pc

    def _su_point(self, t):
        return Point(t, self.su.chart)

    def _coeffs(self, p: Point):
        t, pc = self._split(p)
        d = self.chart.dimension
        out = np.zeros((d, d))
        out[: self.nq, : self.nq] = self.su.vector_coeffs(self._su_point(t))
        sp = Point(pc, self.simplex.chart)
        out[self.nq:, self.nq:] = np.asarray(self.simplex.vector_coeffs(sp), dtype=float)
        return out

    def analytic_brackets(self, p: Point):
        d = self.chart.dimension
        c = np.zeros((d, d, d))
        c[: self.nq, : self.nq, : self.nq] = self.su.analytic_brackets(None)
        return c

    def flow(self, p: Point, j: int, s):
        coords = np.array(p.coords, dtype=float, copy=True)
        if j < self.nq:
            t = coords[: self.nq]
            x = self.su.vector_coeffs(self._su_point(t))
            coords[: self.nq] = t + s * x[j]
        else:
            sp = Point(coords[self.nq:], self.simplex.chart)
            x = np.asarray(self.simplex.vector_coeffs(sp), dtype=float)
            coords[self.nq:] = coords[self.nq:] + s * x[j - self.nq]
        return Point(coords, self.chart)

    def unitary_at(self, p: Point) -> np.ndarray:
        t, _ = self._split(p)
        return self.su.unitary_at(self._su_point(t))


def product_chart(n: int, basis: Optional[GellMannBasis] = None,
                  u0: Optional[np.ndarray] = None):
    """Chart + frame on SU(H) x open simplex, centered at u0 (default identity)."""
    basis = basis or gell_mann_basis(n)
    u0 = np.eye(n, dtype=complex) if u0 is None else np.asarray(u0, dtype=complex)
    nq = basis.dim
    sx = simplex_chart(n)

    def contains(coords):
        if float(np.linalg.norm(coords[:nq])) >= 1.0:
            return False
        return sx.contains(coords[nq:])

    def step_scale(coords):
        return sx.local_step(coords[nq:])

    chart = Chart(nq + (n - 1), contains, f"su({n})xsimplex({n})", step_scale=step_scale)
    frame = ProductQuantumFrame(chart, basis, u0)
    return chart, frame


def product_point(frame: ProductQuantumFrame, p: SimplexPoint,
                  t: Optional[np.ndarray] = None) -> Point:
    t = np.zeros(frame.nq) if t is None else np.asarray(t, dtype=float)
    return Point(np.concatenate([t, chart_coords(p)]), frame.chart)


def require_distinct(p: SimplexPoint, gap: float = DISTINCT_GAP):
    s = np.sort(p.probs)
    if np.min(np.diff(s)) <= gap:
        raise DomainError(
            "probability entries must be pairwise distinct (unfolding is not a "
            f"submersion otherwise); minimal gap below {gap}"
        )


def umegaki_metric_closed_form(p: SimplexPoint, basis: GellMannBasis) -> CovariantTensor2:
    """Block-diagonal closed form of the Umegaki-extracted metric.

    Quantum block G_ab = -2 Tr([rho0, tau_a] [tau_b, ln rho0]); classical block
    equals twice the Fisher-Rao matrix; cross blocks vanish identically.
    """
    require_distinct(p)
    n = basis.n
    rho0 = np.diag(p.probs).astype(complex)
    ln_rho0 = np.diag(np.log(p.probs)).astype(complex)
    t = basis.generators
    comm_rho = rho0 @ t - t @ rho0  # [rho0, tau_a], batched over a
    comm_log = t @ ln_rho0 - ln_rho0 @ t  # [tau_b, ln rho0]
    q = -2.0 * np.real(np.einsum("aij,bji->ab", comm_rho, comm_log))

    nq = basis.dim
    d = nq + (n - 1)
    g = np.zeros((d, d))
    g[:nq, :nq] = q
    g[nq:, nq:] = 2.0 * fisher_rao_matrix(p)
    return CovariantTensor2(g, f"su({n})xP({n})", p)


def umegaki_two_point(frame: ProductQuantumFrame):
    """Pullback of the Umegaki relative entropy to the product chart.

    S = Tr(rho0 ln rho0) - Tr(U rho0 U+ V ln(sigma0) V+) with diagonal
    rho0, sigma0 built from the simplex coordinates of each factor.
    """
    from .divergences import TwoPointFunction

    nq = frame.nq

    def evaluate(pp):
        xl = np.asarray(pp.left.coords, dtype=float)
        xr = np.asarray(pp.right.coords, dtype=float)
        pl = np.asarray(full_probs(xl[nq:]), dtype=float)
        pr = np.asarray(full_probs(xr[nq:]), dtype=float)
        u = frame.unitary_at(pp.left)
        v = frame.unitary_at(pp.right)
        rho = (u * pl) @ u.conj().T
        ln_sigma = (v * np.log(pr)) @ v.conj().T
        return float(np.sum(pl * np.log(pl)) - np.trace(rho @ ln_sigma).real)

    return TwoPointFunction(evaluate, "umegaki_pullback", frame.chart.label)


def verify_quantum_pipeline(n: int, n_points: int, cfg: DifferentiationConfig,
                            seed: int = 0, min_prob: float = 0.05,
                            min_gap: float = 0.05) -> dict:
    """End-to-end check of the extracted Umegaki metric against closed forms."""
    from .sampling import random_simplex_point, random_special_unitary

    rng = np.random.default_rng(seed)
    basis = gell_mann_basis(n)
    nq = basis.dim
    report = {
        "n": n,
        "points": n_points,
        "seed": seed,
        "cross_block_max": 0.0,
        "classical_rel_max": 0.0,
        "quantum_rel_max": 0.0,
        "quantum_offdiag_max": 0.0,
        "cartan_max": 0.0,
        "min_eigenvalue": np.inf,
        "omega_pullback_max": 0.0,
    }
    for _ in range(n_points):
        sp = random_simplex_point(rng, n, min_prob=min_prob, min_gap=min_gap)
        u = random_special_unitary(rng, n)
        _, frame = product_chart(n, basis, u)
        base = product_point(frame, sp)
        f = umegaki_two_point(frame)
        got = extract_divergence_metric(f, base, frame, cfg).components
        want = umegaki_metric_closed_form(sp, basis).components
        scale = np.max(np.abs(want))

        cross = max(np.max(np.abs(got[:nq, nq:])), np.max(np.abs(got[nq:, :nq])))
        report["cross_block_max"] = max(report["cross_block_max"], cross)

        cls = np.max(np.abs(got[nq:, nq:] - want[nq:, nq:])) / np.max(
            np.abs(want[nq:, nq:])
        )
        report["classical_rel_max"] = max(report["classical_rel_max"], cls)

        qgot, qwant = got[:nq, :nq], want[:nq, :nq]
        qscale = np.max(np.abs(qwant))
        report["quantum_rel_max"] = max(
            report["quantum_rel_max"], np.max(np.abs(qgot - qwant)) / qscale
        )
        off = qgot - np.diag(np.diag(qgot))
        report["quantum_offdiag_max"] = max(report["quantum_offdiag_max"], np.max(np.abs(off)))
        cartan = np.max(np.abs(np.diag(qgot)[basis.cartan_slice()]))
        report["cartan_max"] = max(report["cartan_max"], cartan)

        report["min_eigenvalue"] = min(
            report["min_eigenvalue"], float(np.min(np.linalg.eigvalsh(got)) / scale)
        )
    return report
