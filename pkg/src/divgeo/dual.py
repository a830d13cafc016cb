"""Scalar hyper-dual arithmetic for exact first and mixed second derivatives.

A ``HyperDual`` carries a value together with two independent first-order
perturbations and their cross term, so a single function evaluation yields
f, df/ds, df/du and d2f/dsdu without truncation error.
"""
from __future__ import annotations

import math


class HyperDual:
    __slots__ = ("f", "d1", "d2", "d12")

    def __init__(self, f, d1=0.0, d2=0.0, d12=0.0):
        self.f = float(f)
        self.d1 = float(d1)
        self.d2 = float(d2)
        self.d12 = float(d12)

    @staticmethod
    def _coerce(x):
        return x if isinstance(x, HyperDual) else HyperDual(x)

    # chain rule for a scalar function g with derivatives g1 = g', g2 = g''
    def _chain(self, g0, g1, g2):
        return HyperDual(
            g0,
            g1 * self.d1,
            g1 * self.d2,
            g1 * self.d12 + g2 * self.d1 * self.d2,
        )

    def __add__(self, other):
        o = HyperDual._coerce(other)
        return HyperDual(self.f + o.f, self.d1 + o.d1, self.d2 + o.d2, self.d12 + o.d12)

    __radd__ = __add__

    def __sub__(self, other):
        o = HyperDual._coerce(other)
        return HyperDual(self.f - o.f, self.d1 - o.d1, self.d2 - o.d2, self.d12 - o.d12)

    def __rsub__(self, other):
        o = HyperDual._coerce(other)
        return o.__sub__(self)

    def __mul__(self, other):
        o = HyperDual._coerce(other)
        return HyperDual(
            self.f * o.f,
            self.d1 * o.f + self.f * o.d1,
            self.d2 * o.f + self.f * o.d2,
            self.d12 * o.f + self.d1 * o.d2 + self.d2 * o.d1 + self.f * o.d12,
        )

    __rmul__ = __mul__

    def _reciprocal(self):
        if self.f == 0.0:
            raise ZeroDivisionError("hyper-dual division by zero")
        inv = 1.0 / self.f
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        o = HyperDual._coerce(other)
        return self * o._reciprocal()

    def __rtruediv__(self, other):
        o = HyperDual._coerce(other)
        return o * self._reciprocal()

    def __neg__(self):
        return HyperDual(-self.f, -self.d1, -self.d2, -self.d12)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, (int, float)):
            raise TypeError("exponent must be a plain number")
        g0 = self.f**n
        g1 = n * self.f ** (n - 1)
        g2 = n * (n - 1) * self.f ** (n - 2) if n != 1 else 0.0
        return self._chain(g0, g1, g2)

    # comparisons act on the primal value so domain predicates keep working
    def __lt__(self, other):
        return self.f < HyperDual._coerce(other).f

    def __le__(self, other):
        return self.f <= HyperDual._coerce(other).f

    def __gt__(self, other):
        return self.f > HyperDual._coerce(other).f

    def __ge__(self, other):
        return self.f >= HyperDual._coerce(other).f

    def log(self):
        if self.f <= 0.0:
            raise ValueError("log of non-positive hyper-dual value")
        return self._chain(math.log(self.f), 1.0 / self.f, -1.0 / (self.f * self.f))

    def exp(self):
        e = math.exp(self.f)
        return self._chain(e, e, e)

    def sqrt(self):
        r = math.sqrt(self.f)
        return self._chain(r, 0.5 / r, -0.25 / (r * self.f))

    def __repr__(self):
        return f"HyperDual({self.f}, {self.d1}, {self.d2}, {self.d12})"


def log(x):
    return x.log() if isinstance(x, HyperDual) else math.log(x)


def exp(x):
    return x.exp() if isinstance(x, HyperDual) else math.exp(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, HyperDual) else math.sqrt(x)


def value(x):
    """Primal value of a float or HyperDual."""
    return x.f if isinstance(x, HyperDual) else float(x)
