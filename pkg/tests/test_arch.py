import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rho_hankel import special
from rho_hankel.arch import (
    ArchParams, StripError, basic_arch, consistency_constant,
    deriv_commutation_residual, height_t, hankel_fourier, hankel_kernel, isometry_residual,
    kernel_arch, kernel_oscillatory_oracle, kernel_value, mellin_basic_check, ode_residual,
    sobolev_norm,
)
from rho_hankel.quad import TestFn, gaussian_window, mollifier_bump


# ---- height and basic function ---------------------------------------------------

def test_height_t_examples():
    assert height_t(0.0) == 1.0
    assert height_t(1.0) == pytest.approx(2 ** -0.5, rel=1e-15)
    assert height_t(3.0) == pytest.approx(10 ** -0.5, rel=1e-15)


def test_basic_closed_form_examples():
    p = ArchParams(0.3)
    assert basic_arch(1.0, p) == pytest.approx(2 * special.bessel_k(0.2, 2 * math.pi), rel=1e-14)
    assert 0 < basic_arch(10.0, p) <= 1e-8
    with pytest.raises(ValueError):
        basic_arch(0.0, p)


def test_basic_closed_form_vs_mpmath():
    with mpmath.workdps(25):
        for s in (0.1, 0.3, 0.5):
            for x in (0.05, 0.7, 3.0):
                want = 2 * mpmath.power(x, 0.5 - s) * mpmath.besselk(0.5 - s, 2 * mpmath.pi * x)
                assert basic_arch(x, ArchParams(s)) == pytest.approx(float(want), rel=1e-12)


def test_quadrature_route_matches_closed_form():
    # the defining integral equals the closed form exactly: the ratio is flat at 1
    p = ArchParams(0.3)
    ratios = [basic_arch(x, p, "quadrature") / basic_arch(x, p) for x in (0.5, 1.0, 2.0, 4.0)]
    assert max(ratios) - min(ratios) <= 1e-6
    assert ratios[0] == pytest.approx(1.0, abs=1e-9)
    # both quadrature branches meet at |x| = 1
    near = [basic_arch(x, p, "quadrature") for x in (0.999999, 1.0)]
    assert near[0] == pytest.approx(near[1], rel=1e-5)
    # against the bare Bessel expression the constant is 2
    assert consistency_constant(p)["constant"] == pytest.approx(2.0, rel=1e-9)


def test_quadrature_route_rejects_boundary():
    with pytest.raises(StripError):
        basic_arch(1.0, ArchParams(0.5), "quadrature")


def test_arch_params_validation():
    with pytest.raises(ValueError):
        ArchParams(0.6)
    with pytest.raises(ValueError):
        ArchParams(0.3 + 0.1j)
    with pytest.raises(ValueError):
        ArchParams(0.3, tol=0.0)


# ---- kernel ----------------------------------------------------------------------

def test_kernel_negative_half_integer_closed_form():
    kv = kernel_arch(-1.0, ArchParams(0.25))
    assert kv.regime == "negative_arg"
    want = 2 * math.sqrt(2) * math.sqrt(1 / 8) * math.exp(-4 * math.pi)
    assert kv.value == pytest.approx(want, rel=1e-13)


def test_kernel_classical():
    kv = kernel_arch(1.0, ArchParams(0.5))
    z = 4 * math.pi
    assert kv.value == pytest.approx(-2 * math.pi * float(mpmath.bessely(0, z)), rel=1e-12)
    assert kernel_value(-1.0, 0.5) == pytest.approx(4 * float(mpmath.besselk(0, z)), rel=1e-12)


def test_kernel_vs_mpmath_grid():
    for s in (0.2, 0.3, 0.45):
        for a in (-2.0, -0.3, 0.01, 0.4, 3.0):
            z = 4 * mpmath.pi * mpmath.sqrt(abs(a))
            if a > 0:
                want = -2 * mpmath.pi * a ** (0.5 - s) * (mpmath.cospi(s) * mpmath.besselj(1 - 2 * s, z)
                                                         + mpmath.sinpi(s) * mpmath.bessely(1 - 2 * s, z))
            else:
                want = 4 * abs(a) ** (0.5 - s) * mpmath.sinpi(s) * mpmath.besselk(1 - 2 * s, z)
            assert kernel_value(a, s) == pytest.approx(float(want), rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("a,s", [(1.0, 0.3), (0.5, 0.45), (2.0, 0.2), (-1.0, 0.3), (0.3, 0.05)])
def test_kernel_vs_oscillatory_oracle(a, s):
    assert kernel_value(a, s) == pytest.approx(kernel_oscillatory_oracle(a, s), abs=1e-7)


def test_kernel_domain():
    with pytest.raises(ValueError):
        kernel_arch(0.0, ArchParams(0.3))


# ---- Hankel transform ------------------------------------------------------------

def test_kernel_route_classical_fine_grid():
    bump = mollifier_bump(1.0, 2.0)
    got = hankel_kernel(bump, 1.0, ArchParams(0.5))
    y = np.linspace(1.0, 2.0, 400001)
    f = bump.eval(y) * kernel_value(y, 0.5)
    want = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(y)))
    assert got == pytest.approx(want, abs=1e-8)


def test_kernel_route_negative_support_uses_k_branch():
    bump = mollifier_bump(-2.0, -1.0)
    assert hankel_kernel(bump, 1.0, ArchParams(0.25)) > 0


def test_zero_input_and_linearity():
    p = ArchParams(0.3)
    a, b = mollifier_bump(1.0, 3.0), mollifier_bump(0.5, 2.0)
    zero = a.scaled(0.0)
    assert hankel_kernel(zero, 1.5, p) == 0.0
    combo = TestFn(lambda x: 2 * a.eval(x) - 3 * b.eval(x), lambda x: 2 * a.eval_d1(x) - 3 * b.eval_d1(x),
                   lambda x: 2 * a.eval_d2(x) - 3 * b.eval_d2(x), (0.5, 3.0), ("combo",))
    lhs = hankel_fourier(combo, 1.5, p)
    rhs = 2 * hankel_fourier(a, 1.5, p) - 3 * hankel_fourier(b, 1.5, p)
    assert lhs == pytest.approx(rhs, abs=1e-8)


@pytest.mark.slow
def test_dual_routes_agree_example():
    bump = mollifier_bump(1.0, 3.0)
    p = ArchParams(0.3)
    assert hankel_fourier(bump, 2.0, p) == pytest.approx(hankel_kernel(bump, 2.0, p), abs=1e-5)


def test_kernel_route_large_x_observation():
    # not below 1e-6 at x = 50: the transform decays like a power, slowly
    v = hankel_kernel(mollifier_bump(1.0, 3.0), 50.0, ArchParams(0.3))
    assert 1e-6 < abs(v) < 1e-2


# ---- differential identities -----------------------------------------------------

@pytest.mark.parametrize("x,s", [(1.0, 0.3), (0.5, 0.5), (2.0, 0.45)])
def test_ode(x, s):
    p = ArchParams(s)
    assert ode_residual(x, p) <= 1e-6 * max(1.0, basic_arch(x, p))


def test_ode_stencil_order():
    p = ArchParams(0.3)
    coarse, fine = ode_residual(1.0, p, 4e-2), ode_residual(1.0, p, 2e-2)
    # fourth-order stencil: halving h divides the error by about 16
    assert 8 < coarse / fine < 24


def test_derivative_commutation():
    p = ArchParams(0.3)
    assert deriv_commutation_residual(gaussian_window(1.0, 0.2), 1.0, p) <= 1e-4
    assert deriv_commutation_residual(mollifier_bump(1.0, 3.0), 1.5, p) <= 1e-4


def test_mellin_basic():
    assert mellin_basic_check(ArchParams(0.3), 0.8)["residual"] <= 1e-7
    assert mellin_basic_check(ArchParams(0.5), 1.0)["residual"] <= 1e-7
    with pytest.raises(StripError):
        mellin_basic_check(ArchParams(0.3), 0.0)


def test_sobolev_plancherel_and_isometry():
    bump = mollifier_bump(1.0, 3.0)
    y = np.linspace(1.0, 3.0, 200001)
    f = bump.eval(y) ** 2
    l2 = math.sqrt(float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(y))))
    assert sobolev_norm(bump, 0.0) == pytest.approx(l2, rel=1e-6)
    assert sobolev_norm(bump.scaled(0.0), 0.4) == 0.0
    assert isometry_residual(bump, ArchParams(0.3))["residual"] <= 1e-6


@settings(max_examples=8, deadline=None)
@given(st.floats(0.05, 0.5), st.floats(0.3, 2.5))
def test_ode_property(s, x):
    p = ArchParams(s)
    assert ode_residual(x, p) <= 1e-6 * max(1.0, basic_arch(x, p))


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 0.45), st.floats(0.05, 1.5))
def test_mellin_property(s, mu):
    assert mellin_basic_check(ArchParams(s), mu)["residual"] <= 1e-7
