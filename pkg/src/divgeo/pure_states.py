"""Pure-state geometry on punctured Hilbert space.

The Hermitian tensor h, the complex structure on H_0, the Kaehler potential
F = ln <psi|psi> with its derived two-form / metric pair, and the amplitude
coordinates psi_p = sum e^{i theta_j} sqrt(p_j) |e_j> that recover the
Fisher-Rao metric on the simplex.

Real chart convention: a state psi in C^N is the real vector
(q_1..q_N, p_1..p_N) with <e_j, psi> = q_j + i p_j; multiplication by i is
(a, b) -> (-b, a) on these coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import HyperDual
from .geometry import (
    FORWARD_MODE,
    DifferentiationConfig,
    DomainError,
    _central_mixed,
    _richardson,
)
from .simplex import PROB_FLOOR, SimplexPoint

NORM_FLOOR = 1e-9


@dataclass(frozen=True)
class HilbertPoint:
    psi: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.psi, dtype=complex)
        if v.ndim != 1 or v.size < 1:
            raise DomainError("state must be a nonempty complex vector")
        if np.linalg.norm(v) <= NORM_FLOOR:
            raise DomainError("state vector too close to the puncture at 0")
        object.__setattr__(self, "psi", v)

    @property
    def n(self):
        return self.psi.size


def real_coords(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.concatenate([psi.real, psi.imag])


def complex_vector(coords) -> np.ndarray:
    coords = np.asarray(coords, dtype=float)
    n = coords.size // 2
    return coords[:n] + 1j * coords[n:]


def complex_structure_H0(v: np.ndarray) -> np.ndarray:
    """Multiplication by i on real coordinates: (a, b) -> (-b, a)."""
    v = np.asarray(v)
    n = v.size // 2
    return np.concatenate([-v[n:], v[:n]])


def _j_matrix(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = -np.eye(n)
    j[n:, :n] = np.eye(n)
    return j


def hermitian_tensor_h(psi, u, v) -> complex:
    """h(psi; u, v) = <u,v>/<psi,psi> - <u,psi><psi,v>/<psi,psi>^2.

    Inner products are conjugate-linear in the first slot.
    """
    psi = np.asarray(psi, dtype=complex)
    if np.linalg.norm(psi) <= NORM_FLOOR:
        raise DomainError("state vector too close to the puncture at 0")
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    norm2 = np.vdot(psi, psi).real
    return complex(np.vdot(u, v) / norm2 - np.vdot(u, psi) * np.vdot(psi, v) / norm2**2)


def hermitian_h_matrices(psi):
    """(Re h, Im h) evaluated on all pairs of real coordinate directions."""
    psi = np.asarray(psi, dtype=complex)
    n = psi.size
    dirs = [np.eye(n, dtype=complex)[k] for k in range(n)]
    dirs += [1j * np.eye(n, dtype=complex)[k] for k in range(n)]
    h = np.array([[hermitian_tensor_h(psi, a, b) for b in dirs] for a in dirs])
    return h.real, h.imag


def kahler_potential(coords):
    """F = ln <psi|psi> as a function of the real chart; hyper-dual safe."""
    acc = coords[0] * coords[0]
    for c in coords[1:]:
        acc = acc + c * c
    return acc.log() if isinstance(acc, HyperDual) else float(np.log(acc))


def _hessian(coords: np.ndarray, cfg: DifferentiationConfig) -> np.ndarray:
    d = coords.size
    h = np.empty((d, d))
    if cfg.scheme == FORWARD_MODE:
        s = HyperDual(0.0, 1.0, 0.0, 0.0)
        u = HyperDual(0.0, 0.0, 1.0, 0.0)
        for a in range(d):
            for b in range(a, d):
                z = list(coords)
                z[a] = z[a] + s
                z[b] = z[b] + u
                h[a, b] = h[b, a] = kahler_potential(z).d12
        return h
    h0 = cfg.base_step * max(1.0, float(np.linalg.norm(coords)))
    for a in range(d):
        for b in range(a, d):

            def phi2(s, t, a=a, b=b):
                z = np.array(coords, dtype=float)
                z[a] += s
                z[b] += t
                return kahler_potential(z)

            h[a, b] = h[b, a] = _central_mixed(phi2, h0, cfg.extrapolation_levels)
    return h


def kahler_from_potential(point: HilbertPoint, cfg: DifferentiationConfig):
    """Two-form and metric derived from F = ln <psi|psi>.

    omega = -1/4 d(dF o J) evaluated on coordinate directions, which equals
    Im h; the companion metric g(X, Y) = omega(X, J(Y)) equals Re h.  The
    sign of the normalization is fixed by positive-semidefiniteness of g.
    """
    coords = real_coords(point.psi)
    hess = _hessian(coords, cfg)
    j = _j_matrix(point.n)
    # d(dF o J)(e_a, e_b) = Hess(e_a, J e_b) - Hess(e_b, J e_a)
    hj = hess @ j
    omega = -0.25 * (hj - hj.T)
    g = omega @ j
    return omega, g


@dataclass(frozen=True)
class AmplitudeCoordinates:
    p: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        if p.shape != theta.shape or p.ndim != 1:
            raise DomainError("p and theta must be real vectors of equal length")
        if np.any(p <= PROB_FLOOR):
            raise DomainError(f"probabilities must exceed the floor {PROB_FLOOR}")
        if abs(p.sum() - 1.0) > 1e-12:
            raise DomainError("probabilities must sum to 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "theta", theta)


def amplitude_embedding(ac: AmplitudeCoordinates) -> HilbertPoint:
    """psi_p = sum_j e^{i theta_j} sqrt(p_j) |e_j>; always a unit vector."""
    return HilbertPoint(np.exp(1j * ac.theta) * np.sqrt(ac.p))


def _embedding_pushforward(ac: AmplitudeCoordinates, dp, dtheta,
                           cfg: DifferentiationConfig) -> np.ndarray:
    """Tangent of t -> embedding(p + t dp, theta + t dtheta) at t = 0.

    Finite-difference oracle: differentiates the curve componentwise with the
    same Richardson scheme used elsewhere, independent of any closed form.
    """
    dp = np.asarray(dp, dtype=float)
    dtheta = np.asarray(dtheta, dtype=float)
    if abs(dp.sum()) > 1e-12:
        raise DomainError("simplex tangents must have components summing to 0")
    h0 = cfg.base_step * min(1.0, 4.0 * float(np.min(ac.p)))

    def curve(t):
        return amplitude_embedding(
            AmplitudeCoordinates(ac.p + t * dp, ac.theta + t * dtheta)
        ).psi

    samples = []
    for i in range(cfg.extrapolation_levels + 1):
        h = h0 / (2.0**i)
        samples.append((curve(h) - curve(-h)) / (2.0 * h))
    return _richardson(samples, cfg.extrapolation_levels)


def verify_fisher_rao_recovery(sp: SimplexPoint, cfg: DifferentiationConfig,
                               theta=None) -> dict:
    """Check the (p, theta)-coordinate decomposition of h at one simplex point.

    Pushes dtheta = 0 simplex tangents and pure-phase tangents through the
    amplitude embedding numerically and compares h against the Fisher-Rao
    quarter, the phase covariance, and the mixed covariance term.
    """
    from .simplex import ambient_directions, fisher_rao_matrix

    n = sp.n
    theta = np.zeros(n) if theta is None else np.asarray(theta, dtype=float)
    ac = AmplitudeCoordinates(sp.probs, theta)
    psi = amplitude_embedding(ac).psi
    v = ambient_directions(n)
    zero = np.zeros(n)
    eye = np.eye(n)

    u_p = [_embedding_pushforward(ac, v[j], zero, cfg) for j in range(n - 1)]
    u_t = [_embedding_pushforward(ac, zero, eye[r], cfg) for r in range(n)]

    fr = fisher_rao_matrix(sp)
    scale = 0.25 * np.max(np.abs(fr))
    pp_err = 0.0
    for j in range(n - 1):
        for k in range(n - 1):
            got = hermitian_tensor_h(psi, u_p[j], u_p[k]).real
            pp_err = max(pp_err, abs(got - 0.25 * fr[j, k]) / scale)

    # phase block: Re h(theta_r, theta_s) = p_r delta_rs - p_r p_s
    cov = np.diag(sp.probs) - np.outer(sp.probs, sp.probs)
    tt_err = 0.0
    for r in range(n):
        for s in range(n):
            got = hermitian_tensor_h(psi, u_t[r], u_t[s]).real
            tt_err = max(tt_err, abs(got - cov[r, s]))

    # mixed block: Im h(dp_j, dtheta_s) = cov(dln p_j, dtheta_s) / 2
    mixed_err = 0.0
    dlnp = v / sp.probs  # rows: d ln p along tangent v_j, componentwise
    for j in range(n - 1):
        expect_row = sp.probs * dlnp[j]  # <dln p_j dtheta_s> = p_s (v_j / p)_s
        for s in range(n):
            got = hermitian_tensor_h(psi, u_p[j], u_t[s]).imag
            mixed_err = max(mixed_err, abs(got - 0.5 * expect_row[s]))

    # a constant phase shift is the degenerate direction i psi
    const_phase = _embedding_pushforward(ac, zero, np.ones(n), cfg)
    const_err = abs(hermitian_tensor_h(psi, const_phase, const_phase).real)

    return {
        "n": n,
        "fisher_rao_rel_max": pp_err,
        "phase_cov_abs_max": tt_err,
        "mixed_cov_abs_max": mixed_err,
        "constant_phase_abs": const_err,
    }
