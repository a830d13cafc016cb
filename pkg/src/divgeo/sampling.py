"""Seeded random points on the supported manifolds."""
from __future__ import annotations

import numpy as np

from .simplex import PROB_FLOOR, SimplexPoint

MAX_REJECTS = 10_000


def random_simplex_point(rng: np.random.Generator, n: int,
                         min_prob: float = 1e-3,
                         min_gap: float = 0.0) -> SimplexPoint:
    """Dirichlet(1) sample, rejected until floor / pairwise-gap constraints hold."""
    if min_prob <= PROB_FLOOR:
        raise ValueError(f"min_prob must exceed the domain floor {PROB_FLOOR}")
    for _ in range(MAX_REJECTS):
        p = rng.dirichlet(np.ones(n))
        if np.min(p) <= min_prob:
            continue
        if min_gap > 0.0 and np.min(np.diff(np.sort(p))) <= min_gap:
            continue
        return SimplexPoint(p)
    raise RuntimeError("rejection sampling failed; constraints too tight")


def random_special_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish SU(n): QR of a complex Gaussian, phases normalized, det fixed."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    det = np.linalg.det(q)
    return q * det ** (-1.0 / n)


def random_unit_state(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def random_euclidean(rng: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    return scale * rng.standard_normal(d)
