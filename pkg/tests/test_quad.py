import math

import numpy as np
import pytest

from rho_hankel import quad, special
from rho_hankel.quad import (DivergenceError, TestFnError, fourier_num, gaussian_window, integrate_adaptive,
                             integrate_tail, mellin_num, mollifier_bump)


def test_adaptive_examples():
    assert integrate_adaptive(lambda x: x * x, 0, 1, 1e-12).value == pytest.approx(1 / 3, abs=1e-12)
    assert integrate_adaptive(np.sin, 0, math.pi, 1e-12).value == pytest.approx(2, abs=1e-12)


def test_bump_integral_against_richardson_trapezoid():
    bump = mollifier_bump(1, 3)
    got = integrate_adaptive(bump.eval, 1, 3, 1e-13).value.real

    def trap(n):
        x = np.linspace(1, 3, n + 1)
        y = bump.eval(x)
        return (2 / n) * (y.sum() - 0.5 * (y[0] + y[-1]))

    # the trapezoid rule is spectrally accurate for a flat-ended bump; two levels agree
    a, b = trap(2000), trap(4000)
    assert abs(a - b) < 1e-13
    assert abs(got - b) < 1e-10


def test_tail_examples():
    assert integrate_tail(lambda x: np.exp(-x), 0.0, 1e-12).value == pytest.approx(1, abs=1e-12)
    assert integrate_tail(lambda x: x ** -2.0, 1.0, 1e-10, ("power", 2)).value == pytest.approx(1, abs=1e-10)
    k0 = integrate_tail(lambda t: np.exp(-np.cosh(np.minimum(t, 700.0))), 0.0, 1e-12).value.real
    assert k0 == pytest.approx(special.bessel_k(0, 1.0), abs=1e-11)


def test_fourier_zero_frequency_and_gaussian():
    bump = mollifier_bump(1, 2)
    total = integrate_adaptive(bump.eval, 1, 2, 1e-13).value.real
    assert fourier_num(bump, 0.0).real == pytest.approx(total, abs=1e-12)
    g = gaussian_window(0.0, 1.0)
    for xi in (0.0, 0.5, 1.3):
        assert abs(fourier_num(g, xi) - math.exp(-math.pi * xi * xi)) < 1e-8


def test_fourier_high_frequency_against_fine_grid():
    bump = mollifier_bump(1, 2)
    x = np.linspace(1, 2, 200001)
    y = bump.eval(x) * np.exp(2j * math.pi * 40 * x)
    oracle = (x[1] - x[0]) * (y.sum() - 0.5 * (y[0] + y[-1]))
    got = fourier_num(bump, 40.0)
    assert abs(got) <= 1e-6
    assert abs(got - oracle) < 1e-10


def test_fourier_inversion():
    bump = mollifier_bump(1, 2)
    panels = quad.fourier_panels(bump)
    xi = np.linspace(-50, 50, 5001)
    vals = panels.integrate_oscillatory(2 * math.pi * xi)
    for x0 in (1.2, 1.4, 1.5, 1.7, 1.8):
        back = np.sum(vals * np.exp(-2j * math.pi * xi * x0)) * (xi[1] - xi[0])
        assert abs(back - bump.eval(np.array([x0]))[0]) < 1e-7


def test_plancherel():
    for phi in (gaussian_window(0.0, 1.0), mollifier_bump(1, 2)):
        a, b = phi.support
        lhs = integrate_adaptive(lambda x: phi.eval(x) ** 2, a, b, 1e-13).value.real
        panels = quad.fourier_panels(phi)
        # |F phi|^2 is even for real phi; the trapezoid rule on [0, 40] is spectrally accurate here
        xi = np.linspace(0, 40, 2001)
        w = np.abs(panels.integrate_oscillatory(2 * math.pi * xi)) ** 2
        rhs = 2 * (xi[1] - xi[0]) * (w.sum() - 0.5 * w[0])
        assert abs(lhs - rhs) < 1e-6


def test_mellin_examples():
    bump = mollifier_bump(1, 2)
    even = quad.TestFn(lambda x: bump.eval(np.abs(x)), lambda x: np.sign(x) * bump.eval_d1(np.abs(x)),
                       lambda x: bump.eval_d2(np.abs(x)), (-2, 2), ("Even",), validate=False)
    direct = integrate_adaptive(lambda x: 2 * bump.eval(x) / x, 1, 2, 1e-13).value.real
    assert mellin_num(even, "even", 0.0).real == pytest.approx(direct, abs=1e-10)
    g = gaussian_window(0.0, 1.0)
    assert mellin_num(g, "even", 1.0).real == pytest.approx(1.0, abs=1e-8)
    assert abs(mellin_num(g, "odd", 1.0)) < 1e-10
    with pytest.raises(DivergenceError):
        mellin_num(g, "even", 0.0)


def test_linearity():
    a, b = mollifier_bump(1, 2), gaussian_window(1.5, 0.1)
    comb = quad.TestFn(lambda x: 2 * a.eval(x) - 3 * b.eval(x), lambda x: 2 * a.eval_d1(x) - 3 * b.eval_d1(x),
                       lambda x: 2 * a.eval_d2(x) - 3 * b.eval_d2(x), (0.8, 2.2), ("Comb",), validate=False)
    for xi in (0.0, 3.0, 17.0):
        lhs = fourier_num(comb, xi)
        rhs = 2 * fourier_num(a, xi) - 3 * fourier_num(b, xi)
        assert abs(lhs - rhs) < 1e-10


def test_testfn_derivative_validation():
    bump = mollifier_bump(1, 2)
    with pytest.raises(TestFnError):
        quad.TestFn(bump.eval, bump.eval_d2, bump.eval_d2, (1, 2), ("Broken",))
    with pytest.raises(TestFnError):
        gaussian_window(0, -1)
