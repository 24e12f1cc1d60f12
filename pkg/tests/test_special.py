import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from primecf import (
    DivergenceError,
    DomainError,
    PoleError,
    constant_H,
    constant_M,
    e1,
    ei,
    ein,
    euler_gamma,
    li,
    mertens_G,
    mertens_Hfun,
    mertens_table,
    power_sum,
    prime_zeta,
    ri_gram,
    ri_mobius_truncated,
    zeta,
)

from conftest import mp

TOL30 = mpmath.mpf(10) ** -30


def rel(a, b):
    return abs(a - b) / abs(b)


# Ein / Ei / E1 / li --------------------------------------------------------------

def test_ein_examples(ctx):
    assert ein(0, ctx) == 0
    assert abs(ein(1, ctx) - mpmath.mpf("0.796599599297053")) < 1e-14
    assert abs(ein(-1, ctx) - mpmath.mpf("-1.317902151454404")) < 1e-14


def test_ein_oracle(ctx, oracle):
    for key, value in oracle["ein"].items():
        assert rel(ein(mp(key), ctx), mp(value)) < TOL30


def test_ein_complex(ctx):
    z = mpmath.mpc(1, 2)
    expected = mpmath.quad(lambda t: (1 - mpmath.exp(-z * t)) / t, [0, 1])
    assert abs(ein(z, ctx) - expected) < mpmath.mpf(10) ** -25


def test_ei_oracle(ctx, oracle):
    for key, value in oracle["ei"].items():
        assert rel(ei(mp(key), ctx), mp(value)) < TOL30, key


def test_ei_sign_convention_against_quadrature(ctx):
    # principal value: Ei(x) = -PV int_{-x}^inf e^{-t}/t dt
    for x in (mpmath.mpf("0.7"), mpmath.mpf(3)):
        pv = mpmath.quad(lambda t: (mpmath.exp(t) - 1) / t, [0, x]) + mpmath.euler + mpmath.log(x)
        assert rel(ei(x, ctx), pv) < mpmath.mpf(10) ** -25
        assert rel(ei(x, ctx), mpmath.euler + mpmath.log(x) - ein(-x, ctx)) < TOL30


def test_ei_examples(ctx):
    assert abs(ei(1, ctx) - mpmath.mpf("1.895117816355936")) < 1e-14
    assert abs(e1(1, ctx) - mpmath.mpf("0.219383934395520")) < 1e-14
    x = mpmath.mpf("1e-25")
    assert abs(ei(x, ctx) - (mpmath.euler + mpmath.log(x))) < mpmath.mpf(10) ** -24


def test_ei_pole(ctx):
    with pytest.raises(PoleError):
        ei(0, ctx)


def test_e1_oracle(ctx, oracle):
    for key, value in oracle["e1"].items():
        assert rel(e1(mp(key), ctx), mp(value)) < TOL30


@pytest.mark.parametrize("x", ["0.5", "1", "2", "5"])
def test_e1_ei_round_trip(ctx, x):
    assert abs(e1(mp(x), ctx) + ei(-mp(x), ctx)) < TOL30


def test_li_examples(ctx, oracle):
    assert rel(li(mpmath.e, ctx), ei(1, ctx)) < TOL30
    assert rel(li(mpmath.e, ctx), mp(oracle["li_e"])) < TOL30
    assert abs(li(2, ctx) - mpmath.mpf("1.045163780117492")) < 1e-14
    assert li(1 + mpmath.mpf("1e-20"), ctx) < -40


def test_li_oracle(ctx, oracle):
    for key, value in oracle["li"].items():
        assert rel(li(mp(key), ctx), mp(value)) < TOL30, key


def test_li_domain(ctx):
    with pytest.raises(PoleError):
        li(1, ctx)
    with pytest.raises(DomainError):
        li(0, ctx)
    with pytest.raises(DomainError):
        li(-3, ctx)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1.01, max_value=1e30))
def test_li_increasing(x):
    assert li(x * 1.001) > li(x)


# Ri and R ------------------------------------------------------------------------

def test_ri_examples(ctx):
    assert ri_gram(1, ctx) == 1
    ri_e = ri_gram(mpmath.e, ctx)
    direct = 1 + mpmath.nsum(lambda k: 1 / (k * mpmath.factorial(k) * mpmath.zeta(k + 1)), [1, mpmath.inf])
    assert ri_e > 1 and rel(ri_e, direct) < mpmath.mpf(10) ** -28


def test_ri_oracle(ctx, oracle):
    for key, value in oracle["riemannr"].items():
        assert rel(ri_gram(mp(key), ctx), mp(value)) < TOL30, key


def test_ri_at_2_against_long_mobius_sum(ctx):
    # 50-term Moebius sum vs Gram series, within the (log log x)^2 slack
    diff = abs(ri_gram(2, ctx) - ri_mobius_truncated(2, ctx, terms=50))
    slack = 5 * max(mpmath.log(mpmath.log(mpmath.mpf(2))) ** 2, 1)
    assert diff < slack


def test_r_truncation_examples(ctx):
    x = mpmath.exp(mpmath.mpf("0.5"))
    assert ri_mobius_truncated(x, ctx) == li(x, ctx)
    # n <= log 100 = 4.6 and mu(4) = 0
    expected = li(100, ctx) - li(10, ctx) / 2 - li(mpmath.cbrt(100), ctx) / 3
    assert abs(ri_mobius_truncated(100, ctx) - expected) < mpmath.mpf(10) ** -28
    with pytest.raises(DomainError):
        ri_mobius_truncated(1, ctx)


@pytest.mark.parametrize("x", [10**3, 10**4, 10**5, 10**6, 10**7, 10**8])
def test_ri_minus_r_bounded(ctx, x):
    lll = math.log(math.log(x)) ** 2
    assert abs(ri_gram(x, ctx) - ri_mobius_truncated(x, ctx)) <= 5 * lll


@pytest.mark.parametrize("x", [1e3, 1e8, 1e12, 1e20])
def test_gram_term_count(ctx, x):
    _, k = ri_gram(x, ctx, full_output=True)
    assert k <= 10 * math.log(x)


# zeta and prime zeta -------------------------------------------------------------

def test_zeta_examples(ctx):
    assert rel(zeta(2, ctx), mpmath.pi ** 2 / 6) < TOL30
    assert rel(zeta(4, ctx), mpmath.pi ** 4 / 90) < TOL30
    assert abs(zeta(3, ctx) - mpmath.mpf("1.202056903159594")) < 1e-14


def test_zeta_oracle(ctx, oracle):
    for key, value in oracle["zeta"].items():
        assert rel(zeta(mp(key), ctx), mp(value)) < TOL30


@pytest.mark.parametrize("s", [1, 0.5, -2])
def test_zeta_domain(ctx, s):
    with pytest.raises(DomainError):
        zeta(s, ctx)


def test_prime_zeta_oracle(ctx, oracle):
    for key, value in oracle["primezeta"].items():
        assert rel(prime_zeta(mp(key), ctx), mp(value)) < TOL30, key


def test_prime_zeta_examples(ctx):
    assert abs(prime_zeta(2, ctx) - 2 * mpmath.mpf("0.2261237100205")) < 1e-12
    assert abs(prime_zeta(80, ctx) / mpmath.mpf(2) ** -80 - 1) < 1e-9
    with pytest.raises(DomainError):
        prime_zeta(1, ctx)


def test_prime_zeta_against_sieve(sieve_1e6, ctx):
    partial = power_sum(10**6, -2, sieve_1e6, ctx)
    tail = mpmath.mpf(1) / (10**6 * math.log(10**6))  # sum_{p > X} p^-2 < 1/(X log X) roughly
    gap = prime_zeta(2, ctx) - partial
    assert 0 < gap < 1.2 * tail
    assert abs(gap - tail) < 1e-7


# constants and G, H --------------------------------------------------------------

def test_constants(ctx, oracle):
    assert abs(constant_M(ctx) - mpmath.mpf("0.2614972128476427837554")) < 1e-22
    assert abs(constant_H(ctx) - (mp(oracle["euler"]) - mp(oracle["mertens"]))) < TOL30
    assert abs(constant_M(ctx) + constant_H(ctx) - euler_gamma(ctx)) < TOL30
    assert abs(constant_M(ctx) - mp(oracle["mertens"])) < TOL30
    assert abs(euler_gamma(ctx) - mp(oracle["euler"])) < TOL30


def test_displayed_h_is_off_in_its_last_digit(ctx):
    # the 10-digit display 0.3157184519 differs from gamma - M by 1.5e-10
    h = constant_H(ctx)
    assert abs(h - mpmath.mpf("0.3157184519")) < 2e-10
    assert mpmath.nstr(h, 10) == "0.3157184521"


def test_mertens_g_examples(ctx):
    assert abs(mertens_G(0, 400, ctx) - constant_M(ctx)) < TOL30
    assert abs(mertens_G(1, 400, ctx) - euler_gamma(ctx)) < mpmath.mpf(10) ** -28
    assert abs(mertens_Hfun(0, 400, ctx) - mpmath.mpf("0.2261237100205")) < 1e-13


@pytest.mark.parametrize("s", ["-2", "-1", "-0.5", "0", "0.5", "1", "1.5"])
def test_g_equals_m_plus_s_h(ctx, s):
    s = mp(s)
    lhs = mertens_G(s, 200, ctx) - constant_M(ctx) - s * mertens_Hfun(s, 199, ctx)
    assert abs(lhs) < TOL30


@pytest.mark.parametrize("s", [2, 2.5, -2.01])
def test_g_divergence(ctx, s):
    with pytest.raises(DivergenceError):
        mertens_G(s, 10, ctx)
    with pytest.raises(DivergenceError):
        mertens_Hfun(s, 10, ctx)


def test_mertens_table(ctx):
    table = mertens_table(60, ctx)
    assert table.base == constant_M(ctx)
    for n in range(1, 11):
        assert rel(table.coeff_G(n), prime_zeta(n + 1, ctx) / (n + 1)) < TOL30
        assert rel(table.coeff_H(n), prime_zeta(n + 2, ctx) / (n + 2)) < TOL30
    coeffs = table.coefficients[1:]
    assert all(c > 0 for c in coeffs)
    assert all(a > b for a, b in zip(coeffs, coeffs[1:]))
    assert abs(coeffs[-1] / coeffs[-2] - mpmath.mpf(1) / 2) < 0.02
