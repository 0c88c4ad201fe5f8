import pathlib
import warnings
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from rho_hankel.exactq import ONE, ZERO, RatFunc2, S, T, rf_equal
from rho_hankel.padic import (
    CosetFn, EpsPoly, LocalField, NonStabilization, ShellFn, StripError, UnsupportedInput,
    basic_value, bernstein_poly, compactifies, epsilon_shift, eigenfunction_check, gamma_factor,
    hankel_padic, kernel_padic_numeric, kernel_padic_shells, kernel_padic_smallx, local_fe_check,
    local_fe_sides, local_zeta, mellin_padic, mu_one_minus,
)

DATA = pathlib.Path(__file__).parent / "data"
FIELDS = [LocalField(q) for q in (2, 3, 5)]


def _golden(name: str) -> RatFunc2:
    return RatFunc2.from_text((DATA / name).read_text().strip())


# ---- zeta, gamma, basic values ------------------------------------------------

def test_local_zeta_examples():
    L = LocalField(2)
    z = local_zeta(L)
    assert rf_equal(z, ONE / (ONE - T))
    assert z.evaluate(2, 0.0, 1.0) == pytest.approx(2.0)


def test_local_zeta_ramified_carries_half_power():
    z = local_zeta(LocalField(3, 1))
    # 3^(mu/2) = T^(-1/2) is kept as a half-power marker on T
    assert z.t_half == 1
    # 3^(mu/2) / (1 - 3^-mu) at mu = 2
    assert complex(z.evaluate(0.0, 2.0)) == pytest.approx(3.0 / (1 - 1 / 9))


@pytest.mark.parametrize("L", FIELDS, ids=lambda L: f"q={L.q}")
def test_gamma_closed_form_and_reflection(L):
    g = gamma_factor(L)
    want = (ONE - T) / (ONE - RatFunc2.monomial(-1, 0, Fraction(1, L.q)))
    assert rf_equal(g, want)
    assert rf_equal(g * g.substitute(mu_one_minus(L)), ONE)
    assert rf_equal(g, _golden(f"gamma_q{L.q}.txt"))


def test_gamma_reflection_numeric_complex():
    g = gamma_factor(LocalField(2))
    s = 0.3 + 0.7j
    val = g.evaluate(2, 0.0, s) * g.evaluate(2, 0.0, 1 - s)
    assert abs(val - 1) <= 1e-12


def test_basic_value_examples():
    r = RatFunc2.monomial(0, -2, Fraction(1, 2))  # q^(2s-1) = S^-2 / q at q = 2
    assert rf_equal(basic_value(LocalField(2), 2), ONE + r + r * r)
    assert rf_equal(basic_value(LocalField(5), 0), ONE)
    assert basic_value(LocalField(2), -1).is_zero()


# ---- Mellin, shift, Bernstein --------------------------------------------------

@pytest.mark.parametrize("L", FIELDS, ids=lambda L: f"q={L.q}")
def test_mellin_basic(L):
    z1 = ONE / (ONE - L.qinv)
    m = mellin_padic(ShellFn.basic(L))
    assert rf_equal(z1 * m, ONE / ((ONE - T) * (ONE - L.ratio * T)))
    assert rf_equal(m, _golden(f"mellin_basic_q{L.q}.txt"))
    # the divisor-count function gives the squared display
    assert rf_equal(z1 * mellin_padic(ShellFn.divisor_count(L)), ONE / ((ONE - T) * (ONE - T)))


def test_mellin_units_and_partial_sum():
    L = LocalField(3)
    assert rf_equal(mellin_padic(ShellFn.units(L)), RatFunc2.const(Fraction(2, 3)))
    f = ShellFn(L, {1: ONE, 2: ONE, 3: ONE})
    direct = sum((Fraction(2, 3) * T ** k for k in (1, 2, 3)), ZERO)
    assert rf_equal(mellin_padic(f), direct)


def test_epsilon_shift_examples():
    L = LocalField(2)
    assert epsilon_shift(ShellFn.indicator_ball(L, 0)) == ShellFn.indicator_ball(L, 1)
    b = ShellFn.basic(L)
    eb = epsilon_shift(b)
    for k in range(-3, 12):
        assert rf_equal(eb.value(k), b.value(k - 1))
    twice = epsilon_shift(eb)
    for k in range(-3, 12):
        assert rf_equal(twice.value(k), b.value(k - 2))


@pytest.mark.parametrize("L", FIELDS, ids=lambda L: f"q={L.q}")
def test_bernstein_basic(L):
    b = ShellFn.basic(L)
    P = bernstein_poly(b)
    assert P.degree == 2
    assert compactifies(P, b, 30)
    image = P.apply(b)
    units = ShellFn.units(L)
    assert all(rf_equal(image.value(k), units.value(k)) for k in range(-5, 31))
    # minimality: each linear factor alone leaves a tail
    for root in (ONE, L.ratio):
        assert not compactifies(EpsPoly((ONE, -root)), b, 30)


def test_bernstein_compact_and_perturbed():
    L = LocalField(3)
    P = bernstein_poly(ShellFn(L, {0: ONE, 2: T}))
    assert P.degree == 0
    b = ShellFn.basic(L)
    assert bernstein_poly(b + ShellFn.units(L)) == bernstein_poly(b)


# ---- kernel ----------------------------------------------------------------------

def test_kernel_smallx_example():
    L = LocalField(2)
    k3 = kernel_padic_smallx(L, 3)
    g = gamma_factor(L)
    from rho_hankel.padic import MU_TO_2S, mu_to_2_minus_2s
    want = RatFunc2.monomial(0, -6, Fraction(1, 8)) * g.substitute(mu_to_2_minus_2s(L)) + g.substitute(MU_TO_2S)
    assert rf_equal(k3, want)
    assert rf_equal(k3, _golden("kernel_smallx_q2_k3.txt"))
    with pytest.raises(UnsupportedInput):
        kernel_padic_smallx(L, 0)


@pytest.mark.parametrize("s", [0.3, 0.45, 0.5])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_kernel_smallx_vs_shell_sums(k, s):
    L = LocalField(2)
    exact = complex(kernel_padic_smallx(L, k).evaluate(2, s))
    assert abs(kernel_padic_numeric(L, (k, 1), s) - exact) <= 1e-10


@pytest.mark.parametrize("q", [3, 5])
def test_kernel_unit_invariance(q):
    L = LocalField(q)
    for n in (1, 2, -1):
        vals = [kernel_padic_numeric(L, (n, a), 0.3) for a in (1, q - 1)]
        assert abs(vals[0] - vals[1]) <= 1e-12


def test_kernel_partial_sums_stabilize():
    L = LocalField(3)
    n = 2
    res = kernel_padic_shells(L, (n, 1), 0.3, shell_range=n + 8)
    for R in range(n + 4, n + 7):
        assert abs(res.partial[R + 2] - res.partial[R]) <= 1e-10


def test_kernel_large_x_vanishes():
    L = LocalField(2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonStabilization)
        assert abs(kernel_padic_numeric(L, (-6, 1), 0.3)) <= 1e-10


def test_kernel_on_critical_line_is_real_symmetric():
    L = LocalField(3)
    s = 0.5 + 2.0j
    a = kernel_padic_numeric(L, (2, 1), s)
    b = kernel_padic_numeric(L, (2, 1), s.conjugate())
    assert abs(a - b.conjugate()) <= 1e-12


# ---- Hankel transform ------------------------------------------------------------

@pytest.mark.parametrize("L", FIELDS, ids=lambda L: f"q={L.q}")
def test_eigenfunction_holds(L):
    res = eigenfunction_check(L)
    assert res["holds_all_shells"] and res["routes_agree"]
    assert hankel_padic(ShellFn.basic(L)) == ShellFn.basic(L)


@pytest.mark.parametrize("L", FIELDS, ids=lambda L: f"q={L.q}")
def test_hankel_involution_on_units(L):
    u = ShellFn.units(L)
    assert hankel_padic(hankel_padic(u)) == u


def test_coset_deep_shells_q2():
    L = LocalField(2)
    from rho_hankel.padic import MU_TO_2S, gamma_at, mu_to_2_minus_2s
    h = hankel_padic(CosetFn(0), L)
    g22, g2s = gamma_at(L, mu_to_2_minus_2s(L)), gamma_at(L, MU_TO_2S)
    for k in range(1, 8):
        want = L.qinv * (L.ratio ** k * g22 + g2s)
        assert rf_equal(h.value(k), want)
    assert hankel_padic(h) == ShellFn.units(L)


def test_local_fe_units_point_and_basic_formal():
    L = LocalField(2)
    assert local_fe_check(ShellFn.units(L), L, 0.2, 0.3) <= 1e-9
    lhs, rhs = local_fe_sides(ShellFn.basic(L))
    assert rf_equal(lhs, rhs)
    assert local_fe_check(ShellFn(L), L, 0.2, 0.3) == 0.0
    with pytest.raises(StripError):
        local_fe_check(ShellFn.units(L), L, 0.6, 0.3)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(-3, 6),
       st.floats(0.05, 0.5), st.floats(-0.85, 0.45))
def test_local_fe_on_shell_indicators(q, k, s, mu):
    L = LocalField(q)
    # stay inside the strip and away from the poles at mu = 0 and mu = 2s
    assume(2 * s - 1 + 0.05 < mu < 0.45 and abs(mu) > 0.05 and abs(mu - 2 * s) > 0.05)
    f = ShellFn.indicator_shell(L, k)
    assert local_fe_check(f, L, mu, s) <= 1e-9 * max(1.0, q ** (2 * abs(k)))
