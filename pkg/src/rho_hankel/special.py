"""Gamma, real-order Bessel J/Y/K, Riemann zeta and Euler's constant.

Everything is vectorized over numpy arrays where that matters (the Bessel
functions feed kernel matrices of size ~10^6).  Orders are restricted to
|nu| < 2, which covers every kernel in the package.

Methods:
* J, Y: power series for x < 12, Hankel asymptotic expansion beyond.
  Y of non-integer order via the reflection formula; near-integer orders
  by polynomial interpolation in the order; Y_0 by its logarithmic series.
* K: trapezoid rule on the integral of cosh(nu t) exp(-x cosh t), with the
  t-scale adapted to x (double-exponential decay of the integrand makes the
  trapezoid rule spectrally accurate).
* Gamma: Stirling series after upward recurrence, reflection for Re z < 1/2.
* zeta: Euler-Maclaurin summation, valid as a continuation for Re s > -20.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

SERIES_CUTOFF = 12.0


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class AccuracyBudget:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_terms: int = 200

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.max_terms <= 0:
            raise ValueError("accuracy budget entries must be positive")


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (B_1 = -1/2 convention)."""
    a = [Fraction(0)] * (n + 1)
    b = []
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        b.append(a[0])
    val = b[n]
    return -val if n == 1 else val


# ---------------------------------------------------------------------------
# Gamma

_STIRLING = [float(bernoulli(2 * k) / (2 * k * (2 * k - 1))) for k in range(1, 12)]
_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def _loggamma_big(z: complex) -> complex:
    # Stirling series; |z| >= 15 keeps the truncation below 1e-17
    out = (z - 0.5) * cmath.log(z) - z + _LOG_SQRT_2PI
    zinv = 1 / z
    z2 = zinv * zinv
    p = zinv
    for c in _STIRLING:
        out += c * p
        p *= z2
    return out


def gamma_fn(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise DomainError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma_fn(1 - z))
    shift = max(0, int(math.ceil(15 - abs(z))))
    prod = complex(1.0)
    w = z
    for _ in range(shift):
        prod *= w
        w += 1
    return cmath.exp(_loggamma_big(w)) / prod


def rgamma_real(a: float) -> float:
    """1/Gamma(a) for real a, zero at the poles."""
    if a <= 0 and a == math.floor(a):
        return 0.0
    return 1.0 / gamma_fn(a).real


# ---------------------------------------------------------------------------
# Bessel J and Y


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("Bessel functions are evaluated for x > 0 only")
    return x


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not abs(nu) < 2:
        raise DomainError(f"order {nu} outside (-2, 2)")
    return nu


def _j_series(nu: float, x: np.ndarray) -> np.ndarray:
    # sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1)); nu not a negative integer
    h = 0.5 * x
    h2 = -h * h
    rg = rgamma_real(nu + 1)
    term = np.power(h, nu) * rg
    if rg == 0.0:
        # nu + 1 is a nonpositive integer only for nu = -1 which callers avoid
        raise DomainError("series called at a negative integer order")
    total = term.copy()
    for k in range(1, 80):
        term = term * h2 / (k * (k + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel_pq(nu: float, x: np.ndarray):
    mu = 4 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    best = np.full_like(x, np.inf)
    active = np.ones_like(x, dtype=bool)
    for k in range(1, 60):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8 * x)
        mag = np.abs(term)
        # stop each entry once its terms start growing (optimal truncation)
        active &= (mag < best) | (k <= 10)
        active &= mag > 1e-17
        best = np.minimum(best, mag)
        if not np.any(active):
            break
        contrib = np.where(active, term, 0.0)
        r = k % 4
        if r == 1:
            q += contrib
        elif r == 2:
            p -= contrib
        elif r == 3:
            q -= contrib
        else:
            p += contrib
    return p, q


def _jy_asym(nu: float, x: np.ndarray):
    p, q = _hankel_pq(nu, x)
    chi = x - (0.5 * nu + 0.25) * math.pi
    amp = np.sqrt(2 / (math.pi * x))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _split(x, small_fn, big_fn):
    out = np.empty_like(x)
    small = x < SERIES_CUTOFF
    if np.any(small):
        out[small] = small_fn(x[small])
    if np.any(~small):
        out[~small] = big_fn(x[~small])
    return out


def _is_int(nu: float) -> bool:
    return nu == math.floor(nu)


def bessel_j(nu: float, x):
    """J_nu(x) for real |nu| < 2 and x > 0; scalar in, scalar out."""
    nu = _check_nu(nu)
    xa = _check_x(x)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if nu < 0 and _is_int(nu):
        out = (-1) ** int(-nu) * bessel_j(-nu, xa)
    else:
        out = _split(xa, lambda v: _j_series(nu, v), lambda v: _jy_asym(nu, v)[0])
    return float(out[0]) if scalar else out


_EULER = 0.57721566490153286061


def _y0_series(x: np.ndarray) -> np.ndarray:
    h2 = 0.25 * x * x
    j0 = _j_series(0.0, x)
    term = np.ones_like(x)
    total = np.zeros_like(x)
    harmonic = 0.0
    for k in range(1, 80):
        term = term * h2 / (k * k)
        harmonic += 1.0 / k
        contrib = (-1) ** (k + 1) * harmonic * term
        total += contrib
        if np.all(np.abs(contrib) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return (2 / math.pi) * ((np.log(0.5 * x) + _EULER) * j0 + total)


def sinpi(a: float) -> float:
    """sin(pi a), exact at multiples of 1/2."""
    r = math.fmod(a, 2.0)
    if r == math.floor(r):
        return 0.0
    if 2 * r == math.floor(2 * r):
        return 1.0 if r in (0.5, -1.5) else -1.0
    return math.sin(math.pi * r)


def cospi(a: float) -> float:
    return sinpi(a + 0.5)


def _y_reflect(nu: float, x: np.ndarray) -> np.ndarray:
    return (_j_series(nu, x) * cospi(nu) - _j_series(-nu, x)) / sinpi(nu)


_NNODE = 12
_CHEB_NODES = np.cos((2 * np.arange(_NNODE) + 1) * math.pi / (2 * _NNODE))


def _y_series(nu: float, x: np.ndarray) -> np.ndarray:
    if nu == 0.0:
        return _y0_series(x)
    if abs(sinpi(nu)) >= 0.02:
        return _y_reflect(nu, x)
    # near-integer order: interpolate in nu from nodes safely off the integer
    n = round(nu)
    half = 0.03
    nodes = n + half * _CHEB_NODES
    vals = np.array([_y_reflect(v, x) for v in nodes])
    # barycentric Lagrange interpolation (first kind Chebyshev weights)
    w = np.array([(-1) ** j * math.sin((2 * j + 1) * math.pi / (2 * _NNODE)) for j in range(_NNODE)])
    d = nu - nodes
    coef = w / d
    return coef @ vals / coef.sum()


def bessel_y(nu: float, x):
    """Y_nu(x) for real |nu| < 2 and x > 0."""
    nu = _check_nu(nu)
    xa = _check_x(x)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if nu < 0 and _is_int(nu):
        out = (-1) ** int(-nu) * bessel_y(-nu, xa)
    else:
        out = _split(xa, lambda v: _y_series(nu, v), lambda v: _jy_asym(nu, v)[1])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Bessel K

def _tau_grid(tmax: float):
    tau = np.arange(0.0, tmax + 1e-12, 0.1)
    w = np.full(tau.size, 0.1)
    w[0] = 0.05
    return tau, w


_TAU, _TAU_W = _tau_grid(18.0)


def bessel_k(nu: float, x, scaled: bool = False):
    """K_nu(x) for real |nu| < 2, x > 0.  With scaled=True returns e^x K_nu(x)."""
    nu = _check_nu(nu)
    xa = _check_x(x)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.zeros_like(xa)
    # t-scale: the integrand is concentrated in |t| < ~1/sqrt(x) for large x
    for start in range(0, xa.size, 4096):
        chunk = xa[start:start + 4096]
        tau, tw = _TAU, _TAU_W
        xmin = float(chunk.min())
        if xmin < 1e-4:
            # small x: exp(-x cosh t) only dies once cosh t >> 1/x
            tau, tw = _tau_grid(min(math.log(160.0) - math.log(xmin) + 1.0, 700.0))
        w = 1.0 / np.sqrt(np.maximum(chunk, 1.0))
        t = np.outer(w, tau)
        expo = -chunk[:, None] * (np.cosh(t) - 1.0)
        vals = np.cosh(nu * t) * np.exp(expo)
        out[start:start + 4096] = w * (vals @ tw)
    if not scaled:
        with np.errstate(under="ignore"):
            out = out * np.exp(-xa)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# zeta and Euler's constant

_EM_COEF = [float(bernoulli(2 * k)) / math.factorial(2 * k) for k in range(1, 16)]


def riemann_zeta(s: complex) -> complex:
    """zeta(s) by Euler-Maclaurin summation (an analytic continuation)."""
    s = complex(s)
    if s == 1:
        raise DomainError("zeta has a pole at s = 1")
    n = 30 + int(abs(s.imag))
    head = [complex(k) ** (-s) for k in range(1, n)]
    tail = n ** (1 - s) / (s - 1) + 0.5 * n ** (-s)
    rising = s
    power = n ** (-s - 1)
    corr = []
    for k, c in enumerate(_EM_COEF, start=1):
        corr.append(c * rising * power)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power /= n * n
    parts = head + [tail] + corr
    return complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))


def zeta_real_place(s: complex) -> complex:
    """Archimedean local zeta factor pi^(-s/2) Gamma(s/2)."""
    s = complex(s)
    return cmath.exp(-0.5 * s * math.log(math.pi)) * gamma_fn(0.5 * s)


def euler_gamma() -> float:
    n = 100
    harmonic = math.fsum(1.0 / k for k in range(1, n + 1))
    corr = [-math.log(n), -0.5 / n]
    for k in range(1, 8):
        corr.append(float(bernoulli(2 * k)) / (2 * k * n ** (2 * k)))
    return math.fsum([harmonic] + corr)
