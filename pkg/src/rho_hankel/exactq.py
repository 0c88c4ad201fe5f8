"""Exact Laurent-rational functions in two variables T = q^(-mu), S = q^(-s).

Coefficients are exact rationals (gmpy2 `mpq` internally, exposed as
`fractions.Fraction`).  A `RatFunc2` is always kept in a
canonical form, so two values are equal exactly when their representations
are equal:

* every monomial factor lives in the numerator,
* the denominator is a polynomial divisible by neither T nor S,
* numerator and denominator share no common factor,
* the denominator's lowest term (total degree, then lexicographic) is +1.

GCDs are computed by viewing polynomials as elements of Q[S][T] and running
a primitive pseudo-remainder sequence.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from gmpy2 import gcd, lcm, mpq, mpz

Number = Union[int, Fraction]
Monomial = Tuple[int, int]

_Q0 = mpq(0)


def _q(c) -> mpq:
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


POLE_TOL = 1e-12


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at (or next to) a pole."""


# ---------------------------------------------------------------------------
# univariate polynomials over Q, little-endian coefficient lists


def _utrim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _uadd(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    return _utrim(out)


def _usub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _utrim(out)


def _umul(a, b):
    if not a or not b:
        return []
    out = [_Q0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _utrim(out)


def _udivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [_Q0] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        d = len(a) - len(b)
        q[d] = c
        for i, y in enumerate(b):
            a[i + d] -= c * y
        _utrim(a)
    return _utrim(q), a


def _uexact_div(a, b):
    q, r = _udivmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def _uint_primitive(a) -> list:
    """Integer multiple of a with coprime integer coefficients."""
    den = mpz(1)
    for c in a:
        den = lcm(den, mpq(c).denominator)
    ints = [mpz(c * den) for c in a]
    g = mpz(0)
    for c in ints:
        g = gcd(g, c)
    return [c // g for c in ints] if g > 1 else ints


def _ugcd(a, b):
    """Monic gcd over Q, via a primitive PRS over Z (Euclid over Q swells the
    rational coefficients badly beyond degree ~10)."""
    a = _uint_primitive(_utrim(list(a)))
    b = _uint_primitive(_utrim(list(b)))
    if len(a) < len(b):
        a, b = b, a
    while b:
        lb = b[-1]
        while len(a) >= len(b) and a:
            la = a[-1]
            d = len(a) - len(b)
            a = [x * lb for x in a]
            for i, y in enumerate(b):
                a[i + d] -= la * y
            _utrim(a)
        a, b = b, (_uint_primitive(a) if a else [])
    if not a:
        return []
    lead = mpq(a[-1])
    return [mpq(c) / lead for c in a]


# ---------------------------------------------------------------------------
# bivariate polynomials in Q[S][T]: list indexed by T-degree of univariate
# polynomials in S


def _bdeg(a) -> int:
    return len(a) - 1


def _btrim(a):
    while a and not a[-1]:
        a.pop()
    return a


def _bcontent(a):
    g: list = []
    for c in a:
        if c:
            g = _ugcd(g, c) if g else _ugcd(c, [])
            if len(g) == 1:
                break
    return g


def _bscale_div(a, c):
    return [_uexact_div(x, c) if x else [] for x in a]


def _bscale_mul(a, c):
    return [_umul(x, c) for x in a]


def _bprem(a, b):
    a = [list(x) for x in a]
    lb = b[-1]
    db = _bdeg(b)
    while a and _bdeg(a) >= db:
        la = a[-1]
        d = _bdeg(a) - db
        a = [_umul(x, lb) for x in a]
        for i, y in enumerate(b):
            a[i + d] = _usub(a[i + d], _umul(la, y))
        _btrim(a)
    return a


def _bprimitive(a):
    if not a:
        return a
    c = _bcontent(a)
    a = _bscale_div(a, c)
    # fix the sign/scale: leading coefficient of the leading S-poly is 1
    lead = a[-1][-1]
    return [[x / lead for x in poly] for poly in a]


def _bgcd(a, b):
    if not a:
        return _bprimitive(b) if b else []
    if not b:
        return _bprimitive(a)
    ca, cb = _bcontent(a), _bcontent(b)
    c = _ugcd(ca, cb)
    a, b = _bprimitive(a), _bprimitive(b)
    if _bdeg(a) < _bdeg(b):
        a, b = b, a
    while b:
        r = _bprem(a, b)
        a, b = b, _bprimitive(r)
    g = _bprimitive(a)
    return _bscale_mul(g, c)


def _bexact_div(a, b):
    """Quotient a / b in Q[S][T]; raises if b does not divide a."""
    a = [list(x) for x in a]
    db = _bdeg(b)
    lb = b[-1]
    q = [[] for _ in range(max(_bdeg(a) - db + 1, 0))]
    while a and _bdeg(a) >= db:
        c = _uexact_div(a[-1], lb)
        d = _bdeg(a) - db
        q[d] = c
        for i, y in enumerate(b):
            a[i + d] = _usub(a[i + d], _umul(c, y))
        _btrim(a)
    if a:
        raise ArithmeticError("inexact bivariate division")
    return q


# ---------------------------------------------------------------------------


class LaurentPoly2:
    """Finite sum of c * T^i * S^j with rational c and integer (i, j)."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Dict[Monomial, Number]] = None):
        clean: Dict[Monomial, mpq] = {}
        if terms:
            for (i, j), c in terms.items():
                c = _q(c)
                if c != 0:
                    clean[(int(i), int(j))] = clean.get((int(i), int(j)), 0) + c
                    if clean[(int(i), int(j))] == 0:
                        del clean[(int(i), int(j))]
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def const(cls, c: Number) -> "LaurentPoly2":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c: Number = 1) -> "LaurentPoly2":
        return cls({(i, j): c})

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return {k: Fraction(int(c.numerator), int(c.denominator)) for k, c in self._terms.items()}

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly2(out)

    def __neg__(self) -> "LaurentPoly2":
        return LaurentPoly2({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        if not isinstance(other, LaurentPoly2):
            other = _q(other)
            return LaurentPoly2({k: c * other for k, c in self._terms.items()})
        out: Dict[Monomial, mpq] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0) + c1 * c2
        return LaurentPoly2(out)

    def shift(self, di: int, dj: int) -> "LaurentPoly2":
        return LaurentPoly2({(i + di, j + dj): c for (i, j), c in self._terms.items()})

    def min_exponents(self) -> Monomial:
        if not self._terms:
            return (0, 0)
        return (min(i for i, _ in self._terms), min(j for _, j in self._terms))

    def lowest_term(self) -> Tuple[Monomial, mpq]:
        k = min(self._terms, key=lambda m: (m[0] + m[1], m))
        return k, self._terms[k]

    def substitute(self, t_map: Tuple[Number, int, int], s_map: Tuple[Number, int, int] = (1, 0, 1)) -> "LaurentPoly2":
        """Monomial substitution T -> a*T^b*S^c, S -> a'*T^b'*S^c'."""
        ta, tb, tc = _q(t_map[0]), t_map[1], t_map[2]
        sa, sb, sc = _q(s_map[0]), s_map[1], s_map[2]
        out: Dict[Monomial, mpq] = {}
        for (i, j), c in self._terms.items():
            k = (tb * i + sb * j, tc * i + sc * j)
            out[k] = out.get(k, 0) + c * ta ** i * sa ** j
        return LaurentPoly2(out)

    def evaluate(self, T: complex, S: complex) -> complex:
        re_parts, im_parts = [], []
        for (i, j), c in self._terms.items():
            v = float(c) * T ** i * S ** j
            re_parts.append(v.real)
            im_parts.append(v.imag)
        return complex(math.fsum(re_parts), math.fsum(im_parts))

    # conversion to/from Q[S][T] (requires nonnegative exponents)
    def _to_biv(self):
        if not self._terms:
            return []
        dt = max(i for i, _ in self._terms)
        out = [[] for _ in range(dt + 1)]
        for (i, j), c in self._terms.items():
            poly = out[i]
            while len(poly) <= j:
                poly.append(_Q0)
            poly[j] = c
        return [_utrim(p) for p in out]

    @classmethod
    def _from_biv(cls, a) -> "LaurentPoly2":
        return cls({(i, j): c for i, poly in enumerate(a) for j, c in enumerate(poly) if c != 0})

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*T^{i}*S^{j}" for (i, j), c in self._terms.items())

    def __repr__(self):
        return f"LaurentPoly2({self.to_text()})"


_TERM_RE = re.compile(r"^\s*([-+]?\d+(?:/\d+)?)\*T\^(-?\d+)\*S\^(-?\d+)\s*$")


def _parse_poly(text: str) -> LaurentPoly2:
    text = text.strip()
    if text == "0":
        return LaurentPoly2()
    terms: Dict[Monomial, mpq] = {}
    for chunk in text.split(" + "):
        m = _TERM_RE.match(chunk)
        if not m:
            raise ValueError(f"bad monomial {chunk!r}")
        key = (int(m.group(2)), int(m.group(3)))
        terms[key] = terms.get(key, _Q0) + mpq(m.group(1))
    return LaurentPoly2(terms)


class RatFunc2:
    """Canonical quotient num / den of Laurent polynomials in T and S."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly2, den: Optional[LaurentPoly2] = None, _canonical: bool = False):
        if den is None:
            den = LaurentPoly2.const(1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den

    # constructors -----------------------------------------------------------
    @classmethod
    def const(cls, c: Number) -> "RatFunc2":
        return cls(LaurentPoly2.const(c))

    @classmethod
    def monomial(cls, i: int = 0, j: int = 0, c: Number = 1) -> "RatFunc2":
        return cls(LaurentPoly2.monomial(i, j, c))

    @classmethod
    def coerce(cls, x) -> "RatFunc2":
        if isinstance(x, RatFunc2):
            return x
        if isinstance(x, LaurentPoly2):
            return cls(x)
        if isinstance(x, (int, Fraction)) or type(x) is type(_Q0):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFunc2")

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        other = RatFunc2.coerce(other)
        if self.den == other.den:
            return RatFunc2(self.num + other.num, self.den)
        g, da, db = _den_cofactors(self.den, other.den)
        return RatFunc2(self.num * db + other.num * da, self.den * db)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc2(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-RatFunc2.coerce(other))

    def __rsub__(self, other):
        return RatFunc2.coerce(other) - self

    def __mul__(self, other):
        other = RatFunc2.coerce(other)
        return RatFunc2(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc2":
        if self.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc2(self.den, self.num)

    def __truediv__(self, other):
        return self * RatFunc2.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFunc2.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RatFunc2.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        try:
            other = RatFunc2.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def substitute(self, t_map, s_map=(1, 0, 1)) -> "RatFunc2":
        return RatFunc2(self.num.substitute(t_map, s_map), self.den.substitute(t_map, s_map))

    def free_of_T(self) -> bool:
        return all(i == 0 for (i, _), _c in self.num.items()) and all(i == 0 for (i, _), _c in self.den.items())

    def evaluate(self, q: int, s: complex = 0.0, mu: complex = 0.0) -> complex:
        T = cmath.exp(-complex(mu) * math.log(q))
        S = cmath.exp(-complex(s) * math.log(q))
        return self.evaluate_ts(T, S)

    def evaluate_ts(self, T: complex, S: complex) -> complex:
        d = self.den.evaluate(T, S)
        if abs(d) < POLE_TOL:
            raise PoleError(f"pole of {self.to_text()} at T={T}, S={S}")
        return self.num.evaluate(T, S) / d

    def to_text(self) -> str:
        return f"({self.num.to_text()}) / ({self.den.to_text()})"

    @classmethod
    def from_text(cls, text: str) -> "RatFunc2":
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")") and ") / (" in text):
            raise ValueError(f"not a rational function text: {text!r}")
        num, den = text[1:-1].split(") / (", 1)
        return cls(_parse_poly(num), _parse_poly(den))

    def __repr__(self):
        return f"RatFunc2{self.to_text()}"


def _den_cofactors(a: LaurentPoly2, b: LaurentPoly2):
    """gcd g of two canonical denominators and the cofactors a/g, b/g."""
    if len(a._terms) == 1 or len(b._terms) == 1:
        return LaurentPoly2.const(1), a, b
    ab, bb = a._to_biv(), b._to_biv()
    g = _bgcd(ab, bb)
    if _bdeg(g) == 0 and len(g[0]) == 1:
        return LaurentPoly2.const(1), a, b
    return (LaurentPoly2._from_biv(g), LaurentPoly2._from_biv(_bexact_div(ab, g)),
            LaurentPoly2._from_biv(_bexact_div(bb, g)))


def _canonicalize(num: LaurentPoly2, den: LaurentPoly2) -> Tuple[LaurentPoly2, LaurentPoly2]:
    if num.is_zero():
        return LaurentPoly2(), LaurentPoly2.const(1)
    ni, nj = num.min_exponents()
    di, dj = den.min_exponents()
    n0 = num.shift(-ni, -nj)
    d0 = den.shift(-di, -dj)
    if len(d0._terms) > 1:
        nb, db = n0._to_biv(), d0._to_biv()
        g = _bgcd(nb, db)
        if _bdeg(g) > 0 or len(g[0]) > 1:
            n0 = LaurentPoly2._from_biv(_bexact_div(nb, g))
            d0 = LaurentPoly2._from_biv(_bexact_div(db, g))
            # the quotients may have picked up fresh monomial factors
            ei, ej = d0.min_exponents()
            d0 = d0.shift(-ei, -ej)
            n0 = n0.shift(-ei, -ej)
    _, lead = d0.lowest_term()
    inv = 1 / lead
    return (n0 * inv).shift(ni - di, nj - dj), d0 * inv


# ---------------------------------------------------------------------------
# convenience: the generators and a few shapes used everywhere

ONE = RatFunc2.const(1)
ZERO = RatFunc2.const(0)
T = RatFunc2.monomial(1, 0)
S = RatFunc2.monomial(0, 1)


def rf_arith(a: RatFunc2, b: RatFunc2, op: str) -> RatFunc2:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def rf_equal(a: RatFunc2, b: RatFunc2) -> bool:
    return (a - b).is_zero()


def rf_eval(f: RatFunc2, q: int, s: complex, mu: complex) -> complex:
    return f.evaluate(q, s, mu)


class Marked:
    """A RatFunc2 multiplied by q^(qh/2) * T^(th/2) * S^(sh/2).

    Only the parities of the half-exponents are stored; even parts are folded
    into the rational function (q is needed for that, hence it is carried).
    """

    __slots__ = ("rf", "q", "q_half", "t_half", "s_half")

    def __init__(self, rf: RatFunc2, q: int, q_half: int = 0, t_half: int = 0, s_half: int = 0):
        rf = RatFunc2.coerce(rf)
        fold = RatFunc2.const(Fraction(q) ** (q_half // 2)) * RatFunc2.monomial(t_half // 2, s_half // 2)
        self.rf = rf * fold
        self.q = q
        self.q_half = q_half % 2
        self.t_half = t_half % 2
        self.s_half = s_half % 2

    def _markers(self):
        return (self.q_half, self.t_half, self.s_half)

    def __mul__(self, other):
        if not isinstance(other, Marked):
            other = Marked(RatFunc2.coerce(other), self.q)
        if other.q != self.q:
            raise ValueError("mixed residue sizes")
        return Marked(self.rf * other.rf, self.q, self.q_half + other.q_half,
                      self.t_half + other.t_half, self.s_half + other.s_half)

    __rmul__ = __mul__

    def inverse(self) -> "Marked":
        return Marked(self.rf.inverse(), self.q, -self.q_half, -self.t_half, -self.s_half)

    def __truediv__(self, other):
        if not isinstance(other, Marked):
            other = Marked(RatFunc2.coerce(other), self.q)
        return self * other.inverse()

    def __add__(self, other):
        if not isinstance(other, Marked):
            other = Marked(RatFunc2.coerce(other), self.q)
        if other._markers() != self._markers() or other.q != self.q:
            raise ValueError("cannot add values with different half-power markers")
        return Marked(self.rf + other.rf, self.q, *self._markers())

    def __eq__(self, other):
        if not isinstance(other, Marked):
            other = Marked(RatFunc2.coerce(other), self.q)
        return self.q == other.q and self._markers() == other._markers() and self.rf == other.rf

    def __hash__(self):
        return hash((self.rf, self.q, self._markers()))

    def evaluate(self, s: complex = 0.0, mu: complex = 0.0) -> complex:
        lq = math.log(self.q)
        factor = cmath.exp(0.5 * lq * (self.q_half - self.t_half * complex(mu) - self.s_half * complex(s)))
        return self.rf.evaluate(self.q, s, mu) * factor

    def plain(self) -> RatFunc2:
        if self._markers() != (0, 0, 0):
            raise ValueError("value carries a half-power marker")
        return self.rf

    def to_text(self) -> str:
        marks = []
        for name, h in (("q", self.q_half), ("T", self.t_half), ("S", self.s_half)):
            if h:
                marks.append(f"{name}^(1/2)")
        suffix = (" * " + " * ".join(marks)) if marks else ""
        return self.rf.to_text() + suffix

    def __repr__(self):
        return f"Marked({self.to_text()}, q={self.q})"


def geometric_sum(ratio: RatFunc2, start: int, stop: Optional[int] = None) -> RatFunc2:
    """Sum of ratio^k for start <= k < stop (stop=None: formal infinite tail)."""
    if stop is None:
        return ratio ** start / (ONE - ratio)
    if stop <= start:
        return ZERO
    return (ratio ** start - ratio ** stop) / (ONE - ratio)


def product(items: Iterable[RatFunc2]) -> RatFunc2:
    out = ONE
    for x in items:
        out = out * x
    return out
