import math

import numpy as np
import pytest

from divgeo.dual import HyperDual, exp, log, sqrt, value


def hd(f=0.3):
    return HyperDual(f, 1.0, 0.0, 0.0)


def mixed(fn, x, y):
    """d2 fn / dx dy via hyper-dual seeding."""
    return fn(HyperDual(x, 1.0, 0.0, 0.0), HyperDual(y, 0.0, 1.0, 0.0)).d12


def test_arithmetic_primal():
    a = HyperDual(2.0, 1.0, 0.5, 0.25)
    b = HyperDual(3.0, -1.0, 2.0, 0.0)
    assert (a + b).f == 5.0
    assert (a - b).f == -1.0
    assert (a * b).f == 6.0
    assert (a / b).f == pytest.approx(2.0 / 3.0)
    assert (-a).f == -2.0
    assert (2.0 + a).f == 4.0
    assert (1.0 / a).f == 0.5


def test_product_rule_cross_term():
    # f(x, y) = x * y has d2f/dxdy = 1
    assert mixed(lambda x, y: x * y, 1.7, -0.4) == 1.0
    # f = x^2 y^3
    x0, y0 = 1.3, 0.7
    got = mixed(lambda x, y: x * x * y * y * y, x0, y0)
    assert got == pytest.approx(6.0 * x0 * y0**2, rel=1e-14)


def test_division_and_pow():
    x0, y0 = 0.9, 1.4
    got = mixed(lambda x, y: x / y, x0, y0)
    assert got == pytest.approx(-1.0 / y0**2, rel=1e-14)
    got = mixed(lambda x, y: (x * y) ** 3, x0, y0)
    # d2/dxdy (xy)^3 = 9 x^2 y^2
    assert got == pytest.approx(9.0 * x0**2 * y0**2, rel=1e-13)


def test_log_exp_sqrt_chain():
    x0, y0 = 0.8, 0.3
    got = mixed(lambda x, y: log(x * y + 1.0), x0, y0)
    d = x0 * y0 + 1.0
    assert got == pytest.approx(1.0 / d - x0 * y0 / d**2, rel=1e-13)
    got = mixed(lambda x, y: exp(x * y), x0, y0)
    assert got == pytest.approx(math.exp(x0 * y0) * (1.0 + x0 * y0), rel=1e-13)
    got = mixed(lambda x, y: sqrt(x + y), x0, y0)
    assert got == pytest.approx(-0.25 * (x0 + y0) ** -1.5, rel=1e-13)


def test_first_derivatives():
    out = HyperDual(0.5, 1.0, 0.0, 0.0).log()
    assert out.d1 == pytest.approx(2.0)
    assert out.d2 == 0.0


def test_comparisons_use_primal():
    assert hd(0.3) > 0.1
    assert hd(0.3) < 0.5
    assert hd(0.3) >= 0.3
    assert hd(0.3) <= 0.3


def test_domain_errors():
    with pytest.raises(ValueError):
        HyperDual(-1.0, 1.0, 0.0, 0.0).log()
    with pytest.raises(ZeroDivisionError):
        1.0 / HyperDual(0.0)


def test_value_dispatch():
    assert value(1.5) == 1.5
    assert value(HyperDual(1.5, 2.0, 3.0, 4.0)) == 1.5
    assert log(math.e) == pytest.approx(1.0)
    assert exp(0.0) == 1.0
    assert sqrt(4.0) == 2.0


def test_against_finite_differences():
    rng = np.random.default_rng(0)

    def fn(x, y):
        return log(x * y + 2.0) * (x + y * y) + exp(x * 0.1) / y

    for _ in range(5):
        x0, y0 = rng.uniform(0.5, 1.5, size=2)
        got = mixed(fn, x0, y0)
        h = 1e-4
        fd = (
            fn(x0 + h, y0 + h) - fn(x0 + h, y0 - h)
            - fn(x0 - h, y0 + h) + fn(x0 - h, y0 - h)
        ) / (4 * h * h)
        assert got == pytest.approx(fd, rel=1e-6)
