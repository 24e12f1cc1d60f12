"""Extended-precision Ein, Ei, E1, li, Riemann's R, zeta, prime zeta and the
Mertens-type constants.

Series are summed at ``ctx.working_digits`` plus whatever extra digits the
expected cancellation needs.  A series stops once its terms are decreasing
and the current term is below ``ctx.eps`` relative to the running sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .exceptions import DivergenceError, DomainError, PoleError
from .precision import PrecisionContext, resolve
from .sieve import mobius

LOG10_2 = math.log10(2)
LOG10_E = math.log10(math.e)


def _cancellation_digits(magnitude) -> int:
    """Digits lost summing an alternating series whose terms peak near e**magnitude."""
    return int(float(magnitude) * LOG10_E) + 3


def ein(z, ctx: PrecisionContext | None = None):
    """Ein(z) = sum_{k>=1} (-1)**(k+1) z**k / (k k!), entire in z."""
    ctx = resolve(ctx)
    z = mpmath.mpmathify(z)
    if z == 0:
        return z * 0
    with ctx.workdps(_cancellation_digits(abs(z))):
        total = 0
        term = mpmath.mpf(1)
        k = 0
        while True:
            k += 1
            term *= z / k
            contrib = term / k
            total = total + contrib if k % 2 else total - contrib
            if k > abs(z) and abs(contrib) <= ctx.eps * abs(total):
                break
    with ctx.workdps():
        return +total


def _asymptotic_threshold(ctx: PrecisionContext) -> float:
    # smallest term of the asymptotic series is about sqrt(2 pi x) e**-x
    return ctx.working_digits / LOG10_E + 10


def _ei_asymptotic(x, ctx: PrecisionContext):
    total = mpmath.mpf(1)
    term = mpmath.mpf(1)
    k = 0
    while True:
        k += 1
        nxt = term * k / x
        if abs(nxt) >= abs(term) or abs(nxt) <= ctx.eps:
            break
        term = nxt
        total += term
    return mpmath.exp(x) / x * total


def ei(x, ctx: PrecisionContext | None = None):
    """Exponential integral Ei(x) for real x != 0 (principal value for x > 0).

    Uses gamma + log|x| + sum x**k/(k k!) for moderate |x| and the
    asymptotic series e**x/x * sum k!/x**k once |x| is large enough for it
    to reach full precision.
    """
    ctx = resolve(ctx)
    x = mpmath.mpf(x)
    if x == 0:
        raise PoleError("Ei has a logarithmic pole at 0")
    if abs(x) > _asymptotic_threshold(ctx):
        with ctx.workdps(5):
            value = _ei_asymptotic(x, ctx)
        with ctx.workdps():
            return +value
    # for x < 0 terms peak near e**|x| while the result is near e**x/|x|
    extra = 2 * _cancellation_digits(-x) if x < 0 else 2
    with ctx.workdps(extra):
        floor = ctx.eps * mpmath.exp(x) / (1 - x) if x < 0 else 0
        total = 0
        term = mpmath.mpf(1)
        k = 0
        while True:
            k += 1
            term *= x / k
            contrib = term / k
            total += contrib
            if k > abs(x) and abs(contrib) <= (floor if x < 0 else ctx.eps * abs(total)):
                break
        value = mpmath.euler + mpmath.log(abs(x)) + total
    with ctx.workdps():
        return +value


def e1(x, ctx: PrecisionContext | None = None):
    """E1(x) = -Ei(-x); for x < 0 this is the real principal-value branch."""
    return -ei(-mpmath.mpf(x), ctx)


def li(x, ctx: PrecisionContext | None = None):
    """Logarithmic integral li(x) = Ei(log x); for x > 1 this is the
    gamma + log log x + sum (log x)**k/(k k!) series."""
    ctx = resolve(ctx)
    x = mpmath.mpf(x)
    if x <= 0:
        raise DomainError(f"li needs x > 0, got {x}")
    if x == 1:
        raise PoleError("li has a logarithmic pole at 1")
    with ctx.workdps(5):
        lx = mpmath.log(x)
    return ei(lx, ctx)


@lru_cache(maxsize=4096)
def _zeta_cached(s: str, dps: int):
    with mpmath.workdps(dps):
        return mpmath.zeta(mpmath.mpf(s))


def zeta(s, ctx: PrecisionContext | None = None, extra_digits: int = 0):
    """Riemann zeta for real s > 1 (the only range used here)."""
    ctx = resolve(ctx)
    s = mpmath.mpf(s)
    if s <= 1:
        raise DomainError(f"zeta is only implemented for real s > 1, got {s}")
    dps = ctx.working_digits + extra_digits
    with mpmath.workdps(dps):
        key = mpmath.nstr(s, dps + 5)
    return _zeta_cached(key, dps)


def ri_gram(x, ctx: PrecisionContext | None = None, full_output: bool = False):
    """Riemann's Ri(x) by the Gram series 1 + sum (log x)**k / (k k! zeta(k+1)).

    With ``full_output`` returns ``(value, terms_used)``.
    """
    ctx = resolve(ctx)
    x = mpmath.mpf(x)
    if x <= 0:
        raise DomainError(f"Ri needs x > 0, got {x}")
    with ctx.workdps(5):
        lx = mpmath.log(x)
    extra = _cancellation_digits(-lx) if lx < 0 else 2
    with ctx.workdps(extra):
        total = mpmath.mpf(1)
        term = mpmath.mpf(1)
        k = 0
        while lx != 0:
            k += 1
            term *= lx / k
            contrib = term / (k * zeta(k + 1, ctx, extra))
            total += contrib
            if k > abs(lx) and abs(contrib) <= ctx.eps * abs(total):
                break
    with ctx.workdps():
        value = +total
    return (value, k) if full_output else value


def ri_mobius_truncated(x, ctx: PrecisionContext | None = None, terms: int | None = None):
    """R(x) = sum over n <= log x of mu(n)/n * li(x**(1/n)); the n = 1 term is always kept.

    ``terms`` overrides the cutoff log x with a fixed number of terms.
    """
    ctx = resolve(ctx)
    x = mpmath.mpf(x)
    if x <= 1:
        raise DomainError(f"R needs x > 1, got {x}")
    with ctx.workdps(5):
        lx = mpmath.log(x)
        top = int(terms) if terms is not None else max(1, int(mpmath.floor(lx)))
        total = mpmath.mpf(0)
        for n in range(1, top + 1):
            mu = mobius(n)
            if mu:
                total += mpmath.mpf(mu) / n * li(mpmath.exp(lx / n), ctx)
    with ctx.workdps():
        return +total


def prime_zeta(s, ctx: PrecisionContext | None = None):
    """P(s) = sum over primes of p**-s, via sum_n mu(n)/n log zeta(n s).

    Precision is raised by about s*log10(2) digits so that P(s) ~ 2**-s keeps
    full relative accuracy for large s.
    """
    ctx = resolve(ctx)
    s = mpmath.mpf(s)
    if s <= 1:
        raise DomainError(f"prime zeta needs s > 1, got {s}")
    extra = int(float(s) * LOG10_2) + 3
    with ctx.workdps(extra):
        cutoff = ctx.eps * mpmath.mpf(2) ** (-s)
        total = mpmath.mpf(0)
        n = 0
        while True:
            n += 1
            zm1 = zeta(n * s, ctx, extra) - 1
            if zm1 < cutoff:
                break
            mu = mobius(n)
            if mu:
                total += mu * mpmath.log1p(zm1) / n
    with ctx.workdps(extra):
        return +total


def euler_gamma(ctx: PrecisionContext | None = None):
    """Euler's constant from mpmath's own algorithm (independent of M + H)."""
    ctx = resolve(ctx)
    with ctx.workdps():
        return +mpmath.euler


@lru_cache(maxsize=32)
def _constant_H(ctx: PrecisionContext):
    with ctx.workdps():
        total = mpmath.mpf(0)
        n = 1
        while True:
            n += 1
            term = prime_zeta(n, ctx) / n
            total += term
            if term <= ctx.eps * total:
                break
        return total


def constant_H(ctx: PrecisionContext | None = None):
    """H = sum_{n>=2} P(n)/n = -sum_p (1/p + log(1 - 1/p))."""
    return _constant_H(resolve(ctx))


def constant_M(ctx: PrecisionContext | None = None):
    """Meissel-Mertens constant, as gamma - H."""
    ctx = resolve(ctx)
    with ctx.workdps():
        return euler_gamma(ctx) - constant_H(ctx)


@dataclass(frozen=True)
class MertensFunctionTable:
    """Maclaurin data of G(s) = M + sum_{n>=1} P(n+1)/(n+1) s**n.

    ``coefficients[0]`` is M and ``coefficients[n]`` is P(n+1)/(n+1); the
    H(s) coefficients are the same sequence shifted by one.
    """

    coefficients: tuple
    ctx: PrecisionContext

    @property
    def base(self):
        return self.coefficients[0]

    def __len__(self) -> int:
        return len(self.coefficients)

    def coeff_G(self, n: int):
        return self.coefficients[n]

    def coeff_H(self, n: int):
        return self.coefficients[n + 1]


@lru_cache(maxsize=None)
def _g_coefficient(n: int, ctx: PrecisionContext):
    if n == 0:
        return constant_M(ctx)
    p = prime_zeta(n + 1, ctx)
    with mpmath.workdps(ctx.working_digits + int((n + 1) * LOG10_2) + 3):
        return p / (n + 1)


def mertens_table(size: int, ctx: PrecisionContext | None = None) -> MertensFunctionTable:
    """Coefficients of G(s) for powers 0 .. size-1 (built once per size and precision)."""
    if size < 1:
        raise ValueError("size must be >= 1")
    ctx = resolve(ctx)
    return MertensFunctionTable(tuple(_g_coefficient(n, ctx) for n in range(int(size))), ctx)


def _check_disk(s):
    s = mpmath.mpf(s)
    if abs(s) > 2 or s == 2:
        raise DivergenceError(f"Maclaurin series diverges at s = {s} (need |s| <= 2, s != 2)")
    return s


def mertens_G(s, terms: int = 400, ctx: PrecisionContext | None = None):
    """G(s) from the first ``terms`` Maclaurin terms (the constant M counts as one)."""
    ctx = resolve(ctx)
    s = _check_disk(s)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    table = mertens_table(terms, ctx)
    with ctx.workdps():
        return mpmath.polyval(list(reversed(table.coefficients[:terms])), s)


def mertens_Hfun(s, terms: int = 400, ctx: PrecisionContext | None = None):
    """H(s) = sum_{n=0}^{terms-1} P(n+2)/(n+2) s**n."""
    ctx = resolve(ctx)
    s = _check_disk(s)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    table = mertens_table(terms + 1, ctx)
    with ctx.workdps():
        return mpmath.polyval(list(reversed(table.coefficients[1 : terms + 1])), s)
