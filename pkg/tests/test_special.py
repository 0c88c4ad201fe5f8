import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rho_hankel import special
from rho_hankel.special import DomainError

mpmath.mp.dps = 20


def test_gamma_examples():
    assert abs(special.gamma_fn(0.5) - math.sqrt(math.pi)) < 1e-13
    assert abs(special.gamma_fn(5) - 24) < 1e-11


def test_gamma_complex_against_integral_oracle():
    z = 0.3 + 2j
    # Hankel-free oracle: Gamma(z) = Gamma(z+1)/z with the Euler integral for Gamma(z+1)
    oracle = mpmath.quad(lambda t: t ** z * mpmath.e ** (-t), [0, 1, 10, mpmath.inf]) / z
    assert abs(special.gamma_fn(z) - complex(oracle)) < 1e-10 * abs(complex(oracle))


def test_gamma_pole():
    with pytest.raises(DomainError):
        special.gamma_fn(-2)


@pytest.mark.parametrize("z", [0.3, 0.5 + 1j, 0.7 + 3j])
def test_gamma_reflection(z):
    lhs = special.gamma_fn(z) * special.gamma_fn(1 - z)
    rhs = math.pi / complex(mpmath.sin(mpmath.pi * z))
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_bessel_k_examples():
    assert abs(special.bessel_k(0.5, 2.0) - math.sqrt(math.pi / 4) * math.exp(-2)) < 1e-14
    assert abs(special.bessel_k(0.0, 1.0) - 0.4210244382407083) < 1e-12
    oracle = mpmath.quad(lambda t: mpmath.cosh(0.4 * t) * mpmath.e ** (-10 * mpmath.cosh(t)), [0, 1, 2, 6])
    assert abs(special.bessel_k(0.4, 10.0) - float(oracle)) < 1e-10 * float(oracle)


def test_bessel_k_domain():
    with pytest.raises(DomainError):
        special.bessel_k(0.3, 0.0)


@settings(max_examples=40, deadline=None)
@given(nu=st.floats(-1.9, 1.9), x=st.floats(1e-4, 50.0))
def test_bessel_k_relative_accuracy(nu, x):
    ref = float(mpmath.besselk(nu, x))
    assert abs(special.bessel_k(nu, x) - ref) <= 1e-10 * ref


def test_bessel_jy_half_integer_zeros():
    assert abs(special.bessel_j(0.5, math.pi)) < 1e-14
    assert abs(special.bessel_y(0.5, math.pi / 2)) < 1e-14


def test_bessel_j_integral_oracle():
    nu, x = 0.3, 7.5
    # Schlaefli: J_nu(x) = (1/pi) int_0^pi cos(nu t - x sin t) dt - sin(nu pi)/pi int_0^inf e^{-x sinh t - nu t} dt
    a = mpmath.quad(lambda t: mpmath.cos(nu * t - x * mpmath.sin(t)), [0, mpmath.pi]) / mpmath.pi
    b = mpmath.sin(nu * mpmath.pi) / mpmath.pi * mpmath.quad(lambda t: mpmath.e ** (-x * mpmath.sinh(t) - nu * t),
                                                             [0, 1, 3, 8])
    assert abs(special.bessel_j(nu, x) - float(a - b)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(nu=st.floats(-1.9, 1.9), x=st.floats(0.05, 200.0))
def test_bessel_jy_absolute_accuracy(nu, x):
    assert abs(special.bessel_j(nu, x) - float(mpmath.besselj(nu, x))) <= 1e-10
    assert abs(special.bessel_y(nu, x) - float(mpmath.bessely(nu, x))) <= 1e-10 * max(1.0, abs(float(mpmath.bessely(nu, x))))


@pytest.mark.parametrize("nu", [0.0, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 20.0])
def test_wronskian(nu, x):
    h = 1e-5
    dy = (special.bessel_y(nu, x + h) - special.bessel_y(nu, x - h)) / (2 * h)
    dj = (special.bessel_j(nu, x + h) - special.bessel_j(nu, x - h)) / (2 * h)
    w = special.bessel_j(nu, x) * dy - dj * special.bessel_y(nu, x)
    assert abs(w - 2 / (math.pi * x)) < 1e-6


@pytest.mark.parametrize("nu", [0.0, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 20.0])
def test_k_recurrence(nu, x):
    h = 1e-5 * x
    dk = (special.bessel_k(nu, x + h) - special.bessel_k(nu, x - h)) / (2 * h)
    lhs = special.bessel_k(nu - 1, x) + special.bessel_k(nu + 1, x)
    assert abs(lhs + 2 * dk) < 1e-6 * max(1.0, abs(lhs))


def test_half_integer_closed_forms():
    x = np.linspace(0.1, 20, 200)
    c = np.sqrt(2 / (np.pi * x))
    assert np.max(np.abs(special.bessel_j(0.5, x) - c * np.sin(x))) < 1e-12
    assert np.max(np.abs(special.bessel_y(0.5, x) + c * np.cos(x))) < 1e-12
    assert np.max(np.abs(special.bessel_k(0.5, x) / (np.sqrt(np.pi / (2 * x)) * np.exp(-x)) - 1)) < 1e-12


def test_zeta_examples():
    assert abs(special.riemann_zeta(2) - math.pi ** 2 / 6) < 1e-14
    with pytest.raises(DomainError):
        special.riemann_zeta(1.0)


def _eta_oracle(s):
    # alternating series with Borwein's acceleration, divided by (1 - 2^(1-s))
    n = 60
    d = [mpmath.mpf(0)] * (n + 1)
    acc = mpmath.mpf(0)
    for i in range(n + 1):
        acc += mpmath.factorial(n + i - 1) * 4 ** i / (mpmath.factorial(n - i) * mpmath.factorial(2 * i)) if i else mpmath.mpf(1) / n
        d[i] = n * acc
    tot = sum((-1) ** k * (d[k] - d[n]) / mpmath.mpf(k + 1) ** s for k in range(n))
    return complex(-tot / d[n] / (1 - mpmath.mpf(2) ** (1 - s)))


@pytest.mark.parametrize("s", [0.8, 0.3 + 5j, 2.5 - 20j, 0.55])
def test_zeta_against_eta_oracle(s):
    ref = _eta_oracle(mpmath.mpc(s))
    assert abs(special.riemann_zeta(s) - ref) <= 1e-11 * abs(ref)


def test_euler_gamma():
    g = special.euler_gamma()
    assert abs(g - 0.57721566490153286) < 1e-13
    assert g == special.euler_gamma()
    eps = 1e-4
    assert abs(special.riemann_zeta(1 + eps).real - 1 / eps - g) < 1e-3
