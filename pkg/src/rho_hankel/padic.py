"""Non-archimedean local computations over an unramified place.

Conventions: psi(x) = exp(2 pi i {x}_p), vol(O, dx) = 1 and the
multiplicative measure gives every valuation shell volume 1 - 1/q.  Radial
functions are stored by their value on each shell v(x) = k; T = q^(-mu) and
S = q^(-s) are the formal variables of exactq, and r = q^(2s-1) = q^(-1) S^(-2)
is the ratio of the basic function.

Exact transforms are computed on `GeoSeq`, a two-sided sequence that is
geometric (a finite sum of c * ratio^k) outside a finite window.  Every exact
identity in this module is therefore checked on all shells, not on a sample.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exactq import ONE, ZERO, Marked, RatFunc2, S, T, rf_equal

Number = Union[int, Fraction]


class UnsupportedInput(ValueError):
    pass


class StripError(ValueError):
    pass


class NonStabilization(RuntimeWarning):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class LocalField:
    q: int
    e: int = 0

    def __post_init__(self):
        if self.q < 2 or self.e < 0:
            raise ValueError("need q >= 2 and e >= 0")
        p = self.prime
        n = self.q
        while n % p == 0:
            n //= p
        if n != 1:
            raise ValueError(f"q = {self.q} is not a prime power")

    @property
    def prime(self) -> int:
        p = 2
        while self.q % p:
            p += 1
        return p

    @property
    def qinv(self) -> RatFunc2:
        return RatFunc2.const(Fraction(1, self.q))

    @property
    def ratio(self) -> RatFunc2:
        """r = q^(2s-1), the shell-to-shell ratio of the basic function."""
        return RatFunc2.monomial(0, -2, Fraction(1, self.q))

    @property
    def shell_volume(self) -> RatFunc2:
        return RatFunc2.const(1 - Fraction(1, self.q))

    def describe(self) -> str:
        return f"q={self.q}, e={self.e}"

    def require_unramified(self):
        if self.e != 0:
            raise UnsupportedInput("exact shell computations need e = 0")


# ---------------------------------------------------------------------------
# local factors

# substitutions T -> c * T^a * S^b used for the functional equation
def mu_one_minus(L: LocalField):
    return (Fraction(1, L.q), -1, 0)


MU_2S_MINUS = (1, -1, 2)          # mu -> 2s - mu
MU_TO_2S = (1, 0, 2)              # mu -> 2s


def mu_to_2_minus_2s(L: LocalField):
    return (Fraction(1, L.q * L.q), 0, -2)


def _zeta_plain(L: LocalField) -> RatFunc2:
    return ONE / (ONE - T)


def local_zeta(L: LocalField, variable: str = "mu"):
    """zeta_v = q^(e x / 2) / (1 - q^(-x)) in x = mu (T) or x = s (S).

    A plain RatFunc2 when e = 0, otherwise a Marked value carrying the half
    power of T (or S).
    """
    if variable not in ("mu", "s"):
        raise ValueError("variable must be 'mu' or 's'")
    base = ONE / (ONE - (T if variable == "mu" else S))
    if L.e == 0:
        return base
    if variable == "mu":
        return Marked(base, L.q, t_half=-L.e)
    return Marked(base, L.q, s_half=-L.e)


def gamma_factor(L: LocalField):
    """gamma(mu) = zeta(1 - mu) / zeta(mu)."""
    core = (ONE - T) / (ONE - L.qinv * T.inverse())
    if L.e == 0:
        return core
    # zeta(1-mu)/zeta(mu) picks up q^(e/2) * T^e
    return Marked(core, L.q, q_half=L.e, t_half=2 * L.e)


def gamma_at(L: LocalField, t_map) -> RatFunc2:
    return gamma_factor(L).substitute(t_map)


def basic_value(L: LocalField, k: int):
    """|D|^(s-1/2) * sum_{i=0}^{k+e} q^(i(2s-1)) as a function of S."""
    if k + L.e < 0:
        total = ZERO
    else:
        total = ONE
        term = ONE
        for _ in range(k + L.e):
            term = term * L.ratio
            total = total + term
    if L.e == 0:
        return total
    return Marked(total, L.q, q_half=L.e, s_half=2 * L.e)


def basic_tail_value(ratio: RatFunc2, k: int) -> RatFunc2:
    """G(k) = sum_{i=0}^k ratio^i, zero for k < 0."""
    if k < 0:
        return ZERO
    total, term = ONE, ONE
    for _ in range(k):
        term = term * ratio
        total = total + term
    return total


# ---------------------------------------------------------------------------
# two-sided piecewise geometric sequences


Tail = Tuple[Tuple[RatFunc2, RatFunc2], ...]   # ((coef, ratio), ...)


def _merge_tail(items: Iterable[Tuple[RatFunc2, RatFunc2]]) -> Tail:
    acc: Dict[RatFunc2, RatFunc2] = {}
    order: List[RatFunc2] = []
    for c, rho in items:
        if rho not in acc:
            acc[rho] = ZERO
            order.append(rho)
        acc[rho] = acc[rho] + c
    out = [(acc[rho], rho) for rho in order if not acc[rho].is_zero()]
    out.sort(key=lambda cr: cr[1].to_text())
    return tuple(out)


def _tail_eval(tail: Tail, k: int) -> RatFunc2:
    total = ZERO
    for c, rho in tail:
        total = total + c * rho ** k
    return total


def _geo_from(ratio: RatFunc2, start: int) -> RatFunc2:
    """Formal sum_{k >= start} ratio^k."""
    if ratio == ONE:
        raise ArithmeticError("formal geometric series with ratio 1")
    return ratio ** start / (ONE - ratio)


def _geo_range(ratio: RatFunc2, a: int, b: int) -> RatFunc2:
    """sum_{k=a}^{b} ratio^k (empty when b < a)."""
    if b < a:
        return ZERO
    if ratio == ONE:
        return RatFunc2.const(b - a + 1)
    return (ratio ** a - ratio ** (b + 1)) / (ONE - ratio)


class GeoSeq:
    """Sequence f: Z -> Q(T, S) equal to `mid` on [lo, hi], to the exponential
    polynomial `left` for k < lo and to `right` for k > hi.
    """

    __slots__ = ("lo", "hi", "mid", "left", "right")

    def __init__(self, lo: int, hi: int, mid: Sequence[RatFunc2], left: Iterable = (), right: Iterable = ()):
        mid = [RatFunc2.coerce(v) for v in mid]
        if hi < lo - 1:
            raise ValueError("window bounds out of order")
        if len(mid) != max(hi - lo + 1, 0):
            raise ValueError("window length does not match its bounds")
        self.lo, self.hi = lo, hi
        self.mid = mid
        self.left = _merge_tail(left)
        self.right = _merge_tail(right)

    @classmethod
    def zero(cls) -> "GeoSeq":
        return cls(0, -1, [])

    @classmethod
    def delta(cls, k: int, c=ONE) -> "GeoSeq":
        return cls(k, k, [c])

    def __call__(self, k: int) -> RatFunc2:
        if k < self.lo:
            return _tail_eval(self.left, k)
        if k > self.hi:
            return _tail_eval(self.right, k)
        return self.mid[k - self.lo]

    def _solid(self) -> "GeoSeq":
        # an empty window still marks where the left tail hands over to the right
        if self.lo > self.hi and (self.left or self.right):
            return GeoSeq(self.lo, self.lo, [self(self.lo)], self.left, self.right)
        return self

    def widen(self, lo: int, hi: int) -> "GeoSeq":
        lo, hi = min(lo, self.lo), max(hi, self.hi)
        if lo > hi:
            return self
        return GeoSeq(lo, hi, [self(k) for k in range(lo, hi + 1)], self.left, self.right)

    def __add__(self, other: "GeoSeq") -> "GeoSeq":
        a, b = self._solid(), other._solid()
        if a.lo > a.hi:
            lo, hi = b.lo, b.hi
        elif b.lo > b.hi:
            lo, hi = a.lo, a.hi
        else:
            lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
        mid = [self(k) + other(k) for k in range(lo, hi + 1)]
        return GeoSeq(lo, hi, mid, self.left + other.left, self.right + other.right)

    def scale(self, c) -> "GeoSeq":
        c = RatFunc2.coerce(c)
        return GeoSeq(self.lo, self.hi, [c * v for v in self.mid],
                      [(c * a, rho) for a, rho in self.left], [(c * a, rho) for a, rho in self.right])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def twist(self, rho: RatFunc2) -> "GeoSeq":
        """k -> rho^k f(k)."""
        return GeoSeq(self.lo, self.hi, [rho ** k * v for k, v in zip(range(self.lo, self.hi + 1), self.mid)],
                      [(a, b * rho) for a, b in self.left], [(a, b * rho) for a, b in self.right])

    def shift(self, t: int) -> "GeoSeq":
        """k -> f(k + t)."""
        return GeoSeq(self.lo - t, self.hi - t, self.mid,
                      [(a * b ** t, b) for a, b in self.left], [(a * b ** t, b) for a, b in self.right])

    def reflect(self) -> "GeoSeq":
        """k -> f(-k)."""
        return GeoSeq(-self.hi, -self.lo, self.mid[::-1],
                      [(a, b.inverse()) for a, b in self.right], [(a, b.inverse()) for a, b in self.left])

    def equals(self, other: "GeoSeq") -> bool:
        d = self - other
        if any(not v.is_zero() for v in d.mid):
            return False
        return not d.left and not d.right

    def mismatches(self, other: "GeoSeq", window: Tuple[int, int]) -> List[int]:
        return [k for k in range(window[0], window[1] + 1) if not (self(k) - other(k)).is_zero()]

    # sums over k >= start of f(k) * w^k, formal
    def weighted_sum_from(self, start: int, w: RatFunc2) -> RatFunc2:
        if self.left and start < self.lo:
            raise ArithmeticError("sum reaches a nonzero left tail")
        total = ZERO
        a = max(start, self.lo)
        for k in range(a, self.hi + 1):
            total = total + self(k) * w ** k
        b = max(start, self.hi + 1)
        for c, rho in self.right:
            total = total + c * _geo_from(rho * w, b)
        return total

    def describe(self, window: Optional[Tuple[int, int]] = None) -> Dict[str, object]:
        lo, hi = window or (self.lo, self.hi)
        return {
            "shells": {k: self(k).to_text() for k in range(lo, hi + 1)},
            "left_tail": [(c.to_text(), rho.to_text()) for c, rho in self.left],
            "right_tail": [(c.to_text(), rho.to_text()) for c, rho in self.right],
        }


def radial_fourier(f: GeoSeq, L: LocalField) -> GeoSeq:
    """Fourier transform of a radial function, indexed by v(xi).

    Ff(m) = (1 - 1/q) sum_{n >= -m} f(n) q^(-n) - q^m f(-m - 1).
    """
    q = Fraction(L.q)
    qq = RatFunc2.const(q)
    vol = L.shell_volume
    qinv = L.qinv
    lo, hi = f.lo, f.hi
    if lo > hi:
        f = f._solid() if (f.left or f.right) else f.widen(0, 0)
        lo, hi = f.lo, f.hi

    def right_sum(N: int) -> RatFunc2:
        # sum_{n >= N} of the right tail, N > hi
        total = ZERO
        for c, b in f.right:
            total = total + c * _geo_from(b * qinv, N)
        return total

    r_all = right_sum(hi + 1)
    left = []
    for c, b in f.right:
        # A(m) for m < -hi - 1 and B(m) for m < -hi - 1
        ratio = qq / b
        left.append((vol * c / (ONE - b * qinv), ratio))
        left.append((-c / b, ratio))
    right = []
    const = r_all
    for n in range(lo, hi + 1):
        const = const + f(n) * qinv ** n
    for c, a in f.left:
        if a * qinv == ONE:
            raise ArithmeticError("left tail ratio equals q")
        ratio = qq / a
        right.append((vol * c / (ONE - a * qinv), ratio))
        const = const - c * (a * qinv) ** lo / (ONE - a * qinv)
        right.append((-c / a, ratio))
    right.append((vol * const, ONE))
    mlo, mhi = -hi - 1, -lo
    mid = []
    for m in range(mlo, mhi + 1):
        A = r_all
        for n in range(-m, hi + 1):
            A = A + f(n) * qinv ** n
        B = qq ** m * f(-m - 1)
        mid.append(vol * A - B)
    return GeoSeq(mlo, mhi, mid, left, right)


def correlate(u: GeoSeq, w: GeoSeq) -> GeoSeq:
    """C(j) = sum_k u(k) w(j + k) for u, w vanishing to the left."""
    if u.left or w.left:
        raise ArithmeticError("correlate needs sequences that vanish on the left")
    if u.lo > u.hi:
        return GeoSeq.zero()
    if w.lo > w.hi:
        if not w.right:
            return GeoSeq.zero()
        w = w._solid()

    def w_sum(beta: RatFunc2, M: int) -> RatFunc2:
        return w.weighted_sum_from(M, beta)

    jlo, jhi = w.lo - u.hi, w.hi - u.lo
    right = []
    for d, delta in w.right:
        right.append((d * u.weighted_sum_from(u.lo, delta), delta))
    left = []
    for c, beta in u.right:
        left.append((c * w_sum(beta, w.lo), beta.inverse()))
    mid = []
    for j in range(jlo, jhi + 1):
        total = ZERO
        k0 = max(u.lo, w.lo - j)
        for k in range(k0, u.hi + 1):
            total = total + u(k) * w(j + k)
        k1 = max(u.hi + 1, w.lo - j)
        for c, beta in u.right:
            total = total + c * beta ** (-j) * w_sum(beta, j + k1)
        mid.append(total)
    return GeoSeq(jlo, jhi, mid, left, right)


# ---------------------------------------------------------------------------
# radial functions


class ShellFn:
    """Radial f with f(k) = shells[k] + [k >= 0] (const + tail * G(k)).

    G(k) = sum_{i=0}^k ratio^i; with the default ratio r this is the basic
    function, and ratio 1 gives the unnormalized divisor-count version.  The
    constant part stands for a compactly supported piece that is constant
    near 0.  Values are canonical: shells with zero
    value are dropped, so equal functions have equal fields.

    `numeric_shells` holds extra shell values computed numerically at the
    parameter `numeric_s` (used when no exact formula is available).
    """

    __slots__ = ("field", "shells", "const_coeff", "tail_coeff", "tail_ratio", "numeric_shells", "numeric_s")

    def __init__(self, L: LocalField, shells: Optional[Dict[int, object]] = None, tail_coeff=ZERO,
                 const_coeff=ZERO, tail_ratio: Optional[RatFunc2] = None,
                 numeric_shells: Optional[Dict[int, complex]] = None, numeric_s: Optional[complex] = None):
        L.require_unramified()
        self.field = L
        self.tail_ratio = L.ratio if tail_ratio is None else RatFunc2.coerce(tail_ratio)
        self.tail_coeff = RatFunc2.coerce(tail_coeff)
        self.const_coeff = RatFunc2.coerce(const_coeff)
        clean = {}
        for k, v in (shells or {}).items():
            v = RatFunc2.coerce(v)
            if not v.is_zero():
                clean[int(k)] = v
        self.shells = dict(sorted(clean.items()))
        self.numeric_shells = dict(sorted((numeric_shells or {}).items()))
        self.numeric_s = numeric_s
        if self.numeric_shells and numeric_s is None:
            raise ValueError("numeric shells need the parameter they were computed at")

    # constructors
    @classmethod
    def basic(cls, L: LocalField) -> "ShellFn":
        return cls(L, tail_coeff=ONE)

    @classmethod
    def divisor_count(cls, L: LocalField) -> "ShellFn":
        """x -> v(x) + 1 on O: the basic function at s = 1/2 (ratio 1)."""
        return cls(L, tail_coeff=ONE, tail_ratio=ONE)

    @classmethod
    def indicator_shell(cls, L: LocalField, k: int, c=ONE) -> "ShellFn":
        return cls(L, {k: c})

    @classmethod
    def units(cls, L: LocalField) -> "ShellFn":
        return cls.indicator_shell(L, 0)

    @classmethod
    def indicator_ball(cls, L: LocalField, k: int = 0) -> "ShellFn":
        """Indicator of p^k O."""
        if k >= 0:
            return cls(L, {i: -1 for i in range(k)}, const_coeff=ONE)
        return cls(L, {i: 1 for i in range(k, 0)}, const_coeff=ONE)

    # structure
    @property
    def is_numeric(self) -> bool:
        return bool(self.numeric_shells)

    @property
    def has_tail(self) -> bool:
        return not (self.tail_coeff.is_zero() and self.const_coeff.is_zero())

    @property
    def tail_start(self) -> int:
        """First shell from which f agrees with const + tail * G."""
        if not self.has_tail:
            return max(self.shells, default=-1) + 1
        ks = [k for k in self.shells if k >= 0]
        return max(ks) + 1 if ks else 0

    def value(self, k: int) -> RatFunc2:
        if k in self.numeric_shells:
            raise ValueError(f"shell {k} is only known numerically")
        v = self.shells.get(k, ZERO)
        if k >= 0 and self.has_tail:
            v = v + self.const_coeff + self.tail_coeff * basic_tail_value(self.tail_ratio, k)
        return v

    def eval_numeric(self, k: int, s: complex) -> complex:
        if k in self.numeric_shells:
            if self.numeric_s is None or abs(complex(s) - complex(self.numeric_s)) > 1e-14:
                raise ValueError("numeric shells were computed at a different s")
            return self.numeric_shells[k]
        return self.value(k).evaluate(self.field.q, s, 0.0)

    def support_window(self) -> Tuple[int, int]:
        ks = list(self.shells) + list(self.numeric_shells)
        lo = min(ks + [0]) if (ks or self.has_tail) else 0
        hi = max(ks + [0])
        return lo, hi

    def to_geoseq(self) -> GeoSeq:
        if self.is_numeric:
            raise UnsupportedInput("numeric shells have no exact sequence form")
        rho = self.tail_ratio
        if self.has_tail and rho == ONE and not self.tail_coeff.is_zero():
            raise UnsupportedInput("ratio-1 tails are not geometric")
        lo, hi = self.support_window()
        mid = [self.value(k) for k in range(lo, hi + 1)]
        right = []
        if self.has_tail:
            c, d = self.tail_coeff, self.const_coeff
            if not c.is_zero():
                right.append((c / (ONE - rho), ONE))
                right.append((-c * rho / (ONE - rho), rho))
            right.append((d, ONE))
        return GeoSeq(lo, hi, mid, (), right)

    @classmethod
    def from_geoseq(cls, L: LocalField, g: GeoSeq) -> "ShellFn":
        """Inverse of to_geoseq; the tail must be a + b r^k and the left side zero."""
        if g.left:
            raise UnsupportedInput("sequence does not vanish for large |x|")
        r = L.ratio
        A, B = ZERO, ZERO
        for c, rho in g.right:
            if rho == r:
                A = A + c
            elif rho == ONE:
                B = B + c
            else:
                raise UnsupportedInput(f"tail ratio {rho.to_text()} is outside the basic-function span")
        # A r^k + B = (A/r + B) - A (1 - r)/r * G(k)
        tail = -A * (ONE - r) / r
        const = A / r + B
        out = cls(L, tail_coeff=tail, const_coeff=const)
        shells = {}
        lo = min(g.lo, 0)
        for k in range(lo, max(g.hi, -1) + 1):
            v = g(k) - (out.value(k) if k >= 0 else ZERO)
            if not v.is_zero():
                shells[k] = v
        return cls(L, shells, tail_coeff=tail, const_coeff=const)

    # algebra
    def _same(self, other: "ShellFn"):
        if self.field != other.field or self.tail_ratio != other.tail_ratio:
            raise ValueError("incompatible shell functions")
        if self.is_numeric or other.is_numeric:
            raise UnsupportedInput("exact arithmetic on numeric shell data")

    def __add__(self, other: "ShellFn") -> "ShellFn":
        self._same(other)
        shells = dict(self.shells)
        for k, v in other.shells.items():
            shells[k] = shells.get(k, ZERO) + v
        return ShellFn(self.field, shells, self.tail_coeff + other.tail_coeff,
                       self.const_coeff + other.const_coeff, self.tail_ratio)

    def scale(self, c) -> "ShellFn":
        c = RatFunc2.coerce(c)
        return ShellFn(self.field, {k: c * v for k, v in self.shells.items()}, c * self.tail_coeff,
                       c * self.const_coeff, self.tail_ratio)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShellFn):
            return NotImplemented
        return (self.field == other.field and self.tail_ratio == other.tail_ratio
                and self.shells == other.shells and self.tail_coeff == other.tail_coeff
                and self.const_coeff == other.const_coeff and self.numeric_shells == other.numeric_shells)

    def __hash__(self):
        return hash((self.field, tuple(self.shells.items()), self.tail_coeff, self.const_coeff))

    def is_compact(self) -> bool:
        return not self.has_tail

    def to_dict(self) -> Dict[str, object]:
        out = {
            "field": self.field.describe(),
            "shells": {str(k): v.to_text() for k, v in self.shells.items()},
            "const": self.const_coeff.to_text(),
            "tail": self.tail_coeff.to_text(),
            "tail_ratio": self.tail_ratio.to_text(),
        }
        if self.numeric_shells:
            out["numeric_shells"] = {str(k): [v.real, v.imag] for k, v in self.numeric_shells.items()}
            out["numeric_s"] = [complex(self.numeric_s).real, complex(self.numeric_s).imag]
        return out

    def __repr__(self):
        return f"ShellFn({self.to_dict()})"


@dataclass(frozen=True)
class CosetFn:
    """coefficient * indicator of a(1 + p^depth O) with v(a) = center_valuation."""

    center_valuation: int
    depth: int = 1
    coefficient: RatFunc2 = field(default_factory=lambda: ONE)
    residue: int = 1

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("coset depth must be at least 1")


@dataclass(frozen=True)
class EpsPoly:
    """P(eps) = sum_i coefficients[i] * eps^i."""

    coefficients: Tuple[RatFunc2, ...]

    def __post_init__(self):
        if not self.coefficients or self.coefficients[-1].is_zero():
            raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def as_rf(self, var: RatFunc2 = T) -> RatFunc2:
        total = ZERO
        for i, c in enumerate(self.coefficients):
            total = total + c * var ** i
        return total

    def apply(self, f: ShellFn) -> ShellFn:
        out = ShellFn(f.field, tail_ratio=f.tail_ratio)
        g = f
        for i, c in enumerate(self.coefficients):
            if i:
                g = epsilon_shift(g)
            if not c.is_zero():
                out = out + g.scale(c)
        return out

    def to_text(self) -> str:
        return " + ".join(f"[{c.to_text()}]*eps^{i}" for i, c in enumerate(self.coefficients))


# ---------------------------------------------------------------------------
# Mellin transform, epsilon shift, Bernstein polynomial


def mellin_padic(f: ShellFn, L: Optional[LocalField] = None) -> RatFunc2:
    """M(f)(mu) = sum_k f(k) vol(shell) T^k, exactly."""
    L = L or f.field
    if L != f.field:
        raise ValueError("shell function belongs to another field")
    if f.is_numeric:
        raise UnsupportedInput("Mellin of numeric shell data is not exact")
    total = ZERO
    for k, v in f.shells.items():
        total = total + v * T ** k
    if f.has_tail:
        # sum_{k>=0} G(k) T^k = 1/((1-T)(1-rho T)); sum_{k>=0} T^k = 1/(1-T)
        total = total + f.tail_coeff / ((ONE - T) * (ONE - f.tail_ratio * T))
        total = total + f.const_coeff / (ONE - T)
    return L.shell_volume * total


def epsilon_shift(f: ShellFn) -> ShellFn:
    """(eps f)(x) = f(x / p): shell k takes the old value of shell k - 1."""
    if f.is_numeric:
        raise UnsupportedInput("shift of numeric shell data")
    rho = f.tail_ratio
    shells = {k + 1: v for k, v in f.shells.items()}
    if not f.has_tail:
        return ShellFn(f.field, shells, tail_ratio=rho)
    c, d = f.tail_coeff, f.const_coeff
    # for k >= 1: d + c G(k-1) = (d - c/rho) + (c/rho) G(k); shell 0 gets f(-1) = 0
    new_c = c / rho
    new_d = d - c / rho
    shells[0] = shells.get(0, ZERO) - (new_d + new_c)
    return ShellFn(f.field, shells, new_c, new_d, rho)


def _t_polynomial(rf: RatFunc2) -> List[RatFunc2]:
    """Coefficients (in S) of the denominator of rf as a polynomial in T."""
    coeffs: Dict[int, RatFunc2] = {}
    for (i, j), c in rf.den.items():
        coeffs[i] = coeffs.get(i, ZERO) + RatFunc2.monomial(0, j, c)
    lo = min(coeffs)
    deg = max(coeffs) - lo
    return [coeffs.get(lo + i, ZERO) for i in range(deg + 1)]


def bernstein_poly(f: ShellFn) -> EpsPoly:
    """Minimal P with P(eps) f compactly supported in F^x.

    eps multiplies the Mellin transform by T, so P(T) M(f) must be a Laurent
    polynomial in T: P is the T-part of the reduced denominator of M(f),
    normalized to constant term 1.
    """
    M = mellin_padic(f)
    poly = _t_polynomial(M)
    lead = poly[0]
    return EpsPoly(tuple(c / lead for c in poly))


def compactifies(P: EpsPoly, f: ShellFn, shells: int = 30) -> bool:
    """Apply P and check the result vanishes on shells beyond its support,
    both structurally and on `shells` explicit shells."""
    g = P.apply(f)
    if g.has_tail:
        return False
    hi = max(g.shells, default=0)
    return all(g.value(k).is_zero() for k in range(hi + 1, hi + 1 + shells))


# ---------------------------------------------------------------------------
# kernel: exact formulas


def kernel_padic_smallx(L: LocalField, k: int):
    """K(x) for v(x) = k > 2e: |x/w|^(1-2s) gamma(2-2s) + gamma(2s) |w|^(1-2s)."""
    if k <= 2 * L.e:
        raise UnsupportedInput(f"valuation {k} is outside the small-|x| regime (need > {2 * L.e})")
    r = L.ratio
    g22 = gamma_factor(L).substitute(mu_to_2_minus_2s(L)) if L.e == 0 else None
    g2s = gamma_factor(L).substitute(MU_TO_2S) if L.e == 0 else None
    if L.e == 0:
        return r ** k * g22 + g2s
    # |w| = q^-e: both terms carry the q^(e/2) marker of the gamma factor
    gm = gamma_factor(L)
    core = gm.rf
    a = core.substitute(mu_to_2_minus_2s(L)) * RatFunc2.monomial(0, -2 * L.e, Fraction(1, L.q * L.q) ** L.e)
    b = core.substitute(MU_TO_2S) * RatFunc2.monomial(0, 2 * L.e)
    return Marked(r ** (k - L.e) * a + r ** L.e * b, L.q, q_half=L.e)


def _ramanujan(L: LocalField, t: int) -> Fraction:
    """Average of psi(c u) over units u, for v(c) = t."""
    if t >= 0:
        return Fraction(1)
    if t == -1:
        return Fraction(-1, L.q - 1)
    return Fraction(0)


def kernel_unit_average(L: LocalField, j: int) -> RatFunc2:
    """Average of K(x u) over units u, v(x) = j, in closed form.

    The w- and u-averages in the kernel integral factor into two Ramanujan
    sums, so the result is exact for every j (including |x| >= 1 where the
    small-|x| formula does not apply).
    """
    L.require_unramified()
    r = L.ratio
    total = ZERO
    for k in range(-1, j + 2):
        c = _ramanujan(L, k) * _ramanujan(L, j - k)
        if c:
            total = total + r ** k * c
    return L.shell_volume * total


def unit_transform_seq(L: LocalField, method: str = "closed_form") -> GeoSeq:
    """H(1_{O^x}) as a sequence in v(x).

    method "closed_form": the small-|x| closed form on j >= 0 and unit averages on
    j = -1, -2.  method "average": unit averages for the window, with the
    tail read off from them.
    """
    vol = L.shell_volume
    if method == "closed_form":
        g22 = gamma_at(L, mu_to_2_minus_2s(L))
        g2s = gamma_at(L, MU_TO_2S)
        right = [(vol * g22, L.ratio), (vol * g2s, ONE)]
        mid = [vol * kernel_unit_average(L, -2), vol * kernel_unit_average(L, -1)]
        return GeoSeq(-2, -1, mid, (), right)
    if method == "average":
        vals = [vol * kernel_unit_average(L, j) for j in range(-2, 2)]
        # j >= 0: a r^j + b fitted from j = 0, 1
        r = L.ratio
        a = (vals[3] - vals[2]) / (r - ONE)
        b = vals[2] - a
        return GeoSeq(-2, -1, vals[:2], (), [(a, r), (b, ONE)])
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Hankel transform


def hankel_exact_seq(f: ShellFn) -> GeoSeq:
    """H f(j) = sum_k f(k) q^(-2ks) h(j + k) with h = H(1_{O^x}).

    A shell of valuation k is a dilate of O^x, and dilation by p^k turns into
    the factor |p^k|^(2s) and a shift of the argument.
    """
    L = f.field
    h = unit_transform_seq(L, "closed_form")
    u = f.to_geoseq().twist(RatFunc2.monomial(0, 2))
    return correlate(u, h)


def hankel_fourier_seq(f: ShellFn) -> GeoSeq:
    """H f = F(|y|^(2s-2) (F f)(1/y)), composed exactly on sequences."""
    L = f.field
    Ff = radial_fourier(f.to_geoseq(), L)
    # |y|^(2s-2) at v(y) = n is q^(2n) S^(2n)
    g = Ff.reflect().twist(RatFunc2.monomial(0, 2, L.q * L.q))
    return radial_fourier(g, L)


def _coset_shell_numeric(L: LocalField, j: int, residue: int, s: complex, max_modulus: int) -> complex:
    """H(1_{1+pO})(p^j b) for odd p at j in {-1, -2}.

    The y-average over 1 + pO of psi(-c/y) is psi(-c) when v(c) >= -1 and 0
    otherwise, leaving one twisted exponential sum per w-shell.
    """
    p = L.prime
    total = 0j
    for k in range(-2, j + 2):
        m = max(1, -k, k - j)
        if p ** m > max_modulus:
            raise NonStabilization("coset shell sum exceeds the modulus cap")
        # phase (-p^k w - b p^(j-k) / w), v(b p^(j-k)) = j - k >= -1
        mod = p ** m
        A = (-(p ** (k + m))) % mod
        B = (-residue * p ** (j - k + m)) % mod
        total += (1 - 1 / p) * p ** (-k * (1 - 2 * s)) * _unit_exp_sum(p, m, A, B)
    return total / p


def hankel_padic(f: Union[ShellFn, CosetFn], L: Optional[LocalField] = None,
                 s: Optional[complex] = None) -> ShellFn:
    """Hankel transform of a radial function or of a depth-1 coset indicator."""
    if isinstance(f, ShellFn):
        if f.is_numeric:
            raise UnsupportedInput("Hankel transform of numeric shell data")
        return ShellFn.from_geoseq(f.field, hankel_exact_seq(f))
    if L is None:
        raise ValueError("coset input needs its LocalField")
    L.require_unramified()
    if f.depth > 1:
        raise UnsupportedInput("only depth-1 cosets are supported in exact mode")
    v = f.center_valuation
    dil = RatFunc2.monomial(0, 2 * v) * f.coefficient
    if L.q == 2:
        # 1 + 2O is the whole unit group
        return hankel_padic(ShellFn.indicator_shell(L, v), L).scale(f.coefficient)
    if L.q != L.prime:
        raise UnsupportedInput("coset transforms are implemented for prime q")
    # exact where the kernel depends only on |xy| (j >= 0), numeric at j = -1, -2
    g22 = gamma_at(L, mu_to_2_minus_2s(L))
    g2s = gamma_at(L, MU_TO_2S)
    qinv = L.qinv
    r = L.ratio
    A, B = qinv * g22, qinv * g2s
    tail = -A * (ONE - r) / r
    const = A / r + B
    base = ShellFn(L, tail_coeff=tail, const_coeff=const)
    numeric = {}
    if s is not None:
        for j in (-1, -2):
            val = _coset_shell_numeric(L, j, f.residue, complex(s), 10 ** 7)
            numeric[j - v] = val * dil.evaluate(L.q, s, 0.0)
    out = ShellFn.from_geoseq(L, base.to_geoseq().shift(v)).scale(dil)
    return ShellFn(L, out.shells, out.tail_coeff, out.const_coeff, numeric_shells=numeric,
                   numeric_s=s if numeric else None)


def eigenfunction_check(L: LocalField, window: Tuple[int, int] = (-8, 16)) -> Dict[str, object]:
    """Compute H(basic) exactly by both routes and compare with basic."""
    basic = ShellFn.basic(L)
    target = basic.to_geoseq()
    direct = hankel_exact_seq(basic)
    fourier = hankel_fourier_seq(basic)
    return {
        "field": L.describe(),
        "holds_all_shells": direct.equals(target),
        "routes_agree": direct.equals(fourier),
        "fourier_route_holds": fourier.equals(target),
        "mismatched_shells": direct.mismatches(target, window),
        "window": window,
    }


def local_fe_sides(f: ShellFn) -> Tuple[RatFunc2, RatFunc2]:
    """(M(H f)(mu), gamma(1-mu) gamma(2s-mu) M(f)(2s-mu)) as exact functions."""
    L = f.field
    lhs = mellin_padic(hankel_padic(f))
    rhs = (gamma_at(L, mu_one_minus(L)) * gamma_at(L, MU_2S_MINUS)
           * mellin_padic(f).substitute(MU_2S_MINUS))
    return lhs, rhs


def local_fe_check(f: ShellFn, L: Optional[LocalField], mu: complex, s: complex) -> float:
    """|M(H f)(mu) - gamma(1-mu) gamma(2s-mu) M(f)(2s-mu)| at a point."""
    L = L or f.field
    mu, s = complex(mu), complex(s)
    if s.real > 0.5:
        raise StripError("need Re(s) <= 1/2")
    if not (2 * s.real - 1 < mu.real < 0.5):
        raise StripError(f"mu = {mu} is outside the strip 2Re(s)-1 < Re(mu) < 1/2")
    if f.is_compact() and not f.shells:
        return 0.0
    lhs, rhs = local_fe_sides(f)
    return abs(lhs.evaluate(L.q, s, mu) - rhs.evaluate(L.q, s, mu))


# ---------------------------------------------------------------------------
# kernel: numeric shell sums


def _modpow(base: np.ndarray, exp: int, mod: int) -> np.ndarray:
    out = np.ones_like(base)
    b = base % mod
    while exp:
        if exp & 1:
            out = (out * b) % mod
        b = (b * b) % mod
        exp >>= 1
    return out


def _unit_exp_sum(p: int, m: int, A: int, B: int) -> complex:
    """Average over units u mod p^m of exp(2 pi i (A u + B u^-1) / p^m)."""
    mod = p ** m
    if A % mod == 0 and B % mod == 0:
        return 1.0 + 0j
    u = np.arange(mod, dtype=np.int64)
    u = u[u % p != 0]
    phi = mod - mod // p
    inv = _modpow(u, phi - 1, mod)
    n = (A * u + B * inv) % mod
    counts = np.bincount(n, minlength=mod)
    nz = np.nonzero(counts)[0]
    phases = np.exp(2j * np.pi * nz / mod)
    return complex(np.sum(counts[nz] * phases) / u.size)


@dataclass
class KernelSum:
    value: complex
    partial: Dict[int, complex]
    shell_terms: Dict[int, complex]
    skipped: List[int]


def kernel_padic_shells(L: LocalField, x: Tuple[int, int], s: complex, shell_range: Optional[int] = None,
                        max_modulus: int = 2 ** 21) -> KernelSum:
    """Shell-by-shell evaluation of the kernel at x = p^n a.

    On the shell v(w) = k the phase -w - x/w is constant modulo Z_p on cosets
    of 1 + p^m O with m = max(1, -k, k - n), so each shell integral is a finite
    sum of p^m-th roots of unity.  Returns the symmetric partial sums.
    """
    if L.e != 0 or L.q != L.prime:
        raise UnsupportedInput("numeric kernel needs q prime and e = 0")
    n, a = x
    p = L.prime
    if a % p == 0:
        raise ValueError("unit residue must be prime to p")
    s = complex(s)
    R = shell_range if shell_range is not None else abs(n) + 4
    vol = 1 - 1 / p
    terms: Dict[int, complex] = {}
    skipped = []
    for k in range(-R, R + 1):
        m = max(1, -k, k - n)
        if p ** m > max_modulus:
            skipped.append(k)
            continue
        mod = p ** m
        A = (-(p ** (k + m))) % mod
        B = (-a * p ** (n - k + m)) % mod
        E = _unit_exp_sum(p, m, A, B)
        terms[k] = vol * cmath.exp(-k * (1 - 2 * s) * math.log(p)) * E
    partial = {}
    for R1 in range(0, R + 1):
        partial[R1] = sum(v for k, v in terms.items() if abs(k) <= R1)
    return KernelSum(partial[R], partial, terms, skipped)


def kernel_padic_numeric(L: LocalField, x: Tuple[int, int], s: complex, shell_range: Optional[int] = None,
                         tol: float = 1e-10) -> complex:
    """Principal value of the kernel at x = p^n a by exact shell character sums."""
    res = kernel_padic_shells(L, x, s, shell_range)
    R = max(res.partial)
    if R >= 2 and abs(res.partial[R] - res.partial[R - 2]) > tol * max(1.0, abs(res.value)):
        import warnings
        warnings.warn(NonStabilization(f"partial sums still moving at range {R}"))
    if res.skipped:
        import warnings
        warnings.warn(NonStabilization(f"shells {res.skipped} skipped (modulus cap)"))
    return res.value
