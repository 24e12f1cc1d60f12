"""Continued fractions with exact convergents, plus the named coefficient families.

A fraction is stored in the form

    a_1 / (b_1 + s a_2 / (b_2 + s a_3 / (b_3 + ...)))

where ``s`` is the connective (+1 or -1) and every a_k, b_k is a polynomial
in a single variable ``t``.  For J-forms ``t`` is the expansion variable
itself; S-forms with numerators ``c_k / x`` use ``t = 1/x`` so that the
coefficient streams stay exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable

import mpmath

from .exceptions import DomainError, ExactnessError, SingularityError
from .precision import PrecisionContext, resolve

_EXACT = (int, Fraction)


class Poly:
    """Polynomial in one variable, coefficients stored lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def const(cls, c):
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, _EXACT) for c in self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly.const(other)
        n = max(len(self), len(other))
        return Poly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        if not self or not other:
            return Poly()
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, int):
            scalar = Fraction(scalar)
        return Poly(c / scalar for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return self.format("x")

    def format(self, var: str = "x") -> str:
        """Human-readable form, highest power first, e.g. ``6*x^2 + 6*x + 1``."""
        out = ""
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not out:
                out = body if c > 0 else f"-{body}"
            else:
                out += f" + {body}" if c > 0 else f" - {body}"
        return out or "0"


def _content(polys) -> Fraction:
    """Positive rational gcd of all coefficients."""
    nums, dens = [], []
    for p in polys:
        for c in p:
            c = Fraction(c)
            if c:
                nums.append(abs(c.numerator))
                dens.append(c.denominator)
    if not nums:
        return Fraction(1)
    g = reduce(math.gcd, nums)
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), dens)
    return Fraction(g, lcm)


@dataclass(frozen=True)
class Convergent:
    """Exact rational-function approximant numerator(t) / denominator(t)."""

    numerator: Poly
    denominator: Poly
    depth: int
    variable: str = "x"

    def __call__(self, x):
        t = self._t(x)
        den = self.denominator(t)
        if den == 0:
            raise SingularityError(f"convergent denominator vanishes at {x}")
        return self.numerator(t) / den

    def _t(self, x):
        if self.variable.startswith("1/"):
            if isinstance(x, int):
                x = Fraction(x)
            return 1 / x
        return x

    def primitive(self) -> "Convergent":
        """Divide both polynomials by their joint content; leading denominator coefficient positive."""
        c = _content([self.numerator, self.denominator])
        if self.denominator.coeffs[-1] < 0:
            c = -c
        return Convergent(self.numerator / c, self.denominator / c, self.depth, self.variable)

    def normalized(self) -> "Convergent":
        """Scale so the denominator has constant term 1."""
        c0 = self.denominator[0]
        if c0 == 0:
            raise SingularityError("denominator has zero constant term")
        return Convergent(self.numerator / c0, self.denominator / c0, self.depth, self.variable)

    def series_at_infinity(self, n_terms: int) -> list:
        """Coefficients mu_k with numerator/denominator = sum_k mu_k t**-(k+1) as t -> infinity."""
        num, den = self.numerator, self.denominator
        if not den:
            raise SingularityError("zero denominator")
        d = den.degree
        # in w = 1/t: N(t)/D(t) = w**(d - deg N) * Nr(w) / Dr(w) with reversed coefficient lists
        shift = d - num.degree if num else n_terms + 1
        nr = list(reversed(num.coeffs))
        dr = list(reversed(den.coeffs))
        series = []
        n_total = n_terms + 1
        for k in range(n_total):
            acc = Fraction(nr[k]) if k < len(nr) else Fraction(0)
            for j in range(1, min(k, len(dr) - 1) + 1):
                acc -= dr[j] * series[k - j]
            series.append(acc / dr[0])
        # power of w for series[k] is shift + k; mu_k multiplies w**(k+1)
        out = []
        for k in range(n_terms):
            idx = k + 1 - shift
            out.append(series[idx] if 0 <= idx < len(series) else Fraction(0))
        return out


@dataclass(frozen=True)
class ContinuedFraction:
    """Coefficient stream k -> (a_k, b_k), k >= 1, with a form tag.

    ``leading_term`` names a prefactor (e.g. ``x^(1/n)``) the caller applies;
    it is not part of the stream.
    """

    name: str
    form: str
    connective: int
    variable: str
    coeff_fn: Callable[[int], tuple]
    leading_term: str | None = None
    max_depth: int | None = None
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.form not in ("S", "J"):
            raise ValueError(f"form must be 'S' or 'J', got {self.form!r}")
        if self.connective not in (1, -1):
            raise ValueError("connective must be +1 or -1")

    def coefficients(self, k: int) -> tuple[Poly, Poly]:
        """(a_k, b_k) as polynomials in the stream variable; memoized."""
        if k < 1:
            raise DomainError(f"depth index must be >= 1, got {k}")
        if self.max_depth is not None and k > self.max_depth:
            raise DomainError(f"{self.name} only has {self.max_depth} levels")
        hit = self._memo.get(k)
        if hit is None:
            a, b = self.coeff_fn(k)
            hit = (a if isinstance(a, Poly) else Poly.const(a),
                   b if isinstance(b, Poly) else Poly.const(b))
            self._memo[k] = hit
        return hit

    def partial_numerators(self, n: int) -> list[Poly]:
        return [self.coefficients(k)[0] for k in range(1, n + 1)]

    def partial_denominators(self, n: int) -> list[Poly]:
        return [self.coefficients(k)[1] for k in range(1, n + 1)]

    def stream_variable(self, x):
        return 1 / x if self.variable.startswith("1/") else x

    @classmethod
    def from_lists(cls, numerators, denominators, *, name="custom", form="J",
                   connective=1, variable="x"):
        """Finite fraction from explicit coefficient lists (scalars or Poly)."""
        numerators, denominators = list(numerators), list(denominators)
        if len(numerators) != len(denominators):
            raise ValueError("need as many numerators as denominators")
        return cls(name, form, connective, variable,
                   lambda k: (numerators[k - 1], denominators[k - 1]),
                   max_depth=len(numerators))


def eval_backward(cf: ContinuedFraction, depth: int, x, ctx: PrecisionContext | None = None):
    """Value of the depth-truncated fraction at x by backward recurrence."""
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    ctx = resolve(ctx)
    with ctx.workdps():
        t = cf.stream_variable(mpmath.mpmathify(x))
        tail = None
        for k in range(depth, 0, -1):
            a, b = cf.coefficients(k)
            if tail is None:
                tail = b(t)
            else:
                nxt_a = cf.coefficients(k + 1)[0](t)
                tail = b(t) + cf.connective * nxt_a / tail
            if tail == 0:
                raise SingularityError(f"zero denominator at level {k} (x = {x})")
        return cf.coefficients(1)[0](t) / tail


def convergents(cf: ContinuedFraction, n: int) -> list[Convergent]:
    """First n convergents, computed exactly by the three-term recurrence

    A_k = b_k A_{k-1} + s_k a_k A_{k-2} (and likewise B_k), s_1 = 1.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    a_prev, a_cur = Poly.const(1), Poly()
    b_prev, b_cur = Poly(), Poly.const(1)
    out = []
    for k in range(1, n + 1):
        a_k, b_k = cf.coefficients(k)
        if not (a_k.is_exact and b_k.is_exact):
            raise ExactnessError(f"{cf.name}: level {k} has inexact coefficients")
        sign = 1 if k == 1 else cf.connective
        a_prev, a_cur = a_cur, b_k * a_cur + (a_k * sign) * a_prev
        b_prev, b_cur = b_cur, b_k * b_cur + (a_k * sign) * b_prev
        out.append(Convergent(a_cur, b_cur, k, cf.variable))
    return out


# Named families ---------------------------------------------------------------

_T = Poly([0, 1])  # the stream variable itself


def family_prime_S(n: int) -> ContinuedFraction:
    """S-form for pi(x)/x-type functions: (x^(1/n)/u)/(1 -) (n/u)/(1 -) (n/u)/(1 -) (2n/u)/(1 -) ...
    in t = 1/u, u = log x."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")

    def coeff(k):
        c = 1 if k == 1 else (k // 2) * n
        return _T * c, Poly.const(1)

    return ContinuedFraction(f"prime-S(n={n})", "S", -1, "1/u", coeff, leading_term=f"x^(1/{n})")


def family_prime_J(n: int) -> ContinuedFraction:
    """J-form: x^(1/n) * 1/(u - n -) n^2/(u - 3n -) (2n)^2/(u - 5n -) ..., u = log x."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")

    def coeff(k):
        a = 1 if k == 1 else ((k - 1) * n) ** 2
        return Poly.const(a), Poly([-(2 * k - 1) * n, 1])

    return ContinuedFraction(f"prime-J(n={n})", "J", -1, "u", coeff, leading_term=f"x^(1/{n})")


def family_log_S() -> ContinuedFraction:
    """log(1 + 1/x) = (1/x)/(1 +) (1/x)/(2 +) (1/x)/(3 +) (4/x)/(4 +) (4/x)/(5 +) (9/x)/(6 +) ..."""

    def coeff(k):
        c = 1 if k == 1 else (k // 2) ** 2
        return _T * c, Poly.const(k)

    return ContinuedFraction("log-S", "S", 1, "1/x", coeff)


def family_log_S_alt() -> ContinuedFraction:
    """Same limit: numerators (1,1,1,2,2,3,3,...)/x over denominators 1,2,3,2,5,2,7,2,9,..."""

    def coeff(k):
        c = 1 if k == 1 else k // 2
        return _T * c, Poly.const(k if k % 2 else 2)

    return ContinuedFraction("log-S-alt", "S", 1, "1/x", coeff)


def family_log_J() -> ContinuedFraction:
    """log(1 + 1/x) = 2/(2x+1 -) 1/(6x+3 -) 4/(10x+5 -) 9/(14x+7 -) ..."""

    def coeff(k):
        a = 2 if k == 1 else (k - 1) ** 2
        return Poly.const(a), Poly([2 * k - 1, 2 * (2 * k - 1)])

    return ContinuedFraction("log-J", "J", -1, "x", coeff)


def family_uniform_sym() -> ContinuedFraction:
    """log((z+1)/(z-1)) = 2/(z -) 1/(3z -) 4/(5z -) 9/(7z -) ..."""

    def coeff(k):
        a = 2 if k == 1 else (k - 1) ** 2
        return Poly.const(a), Poly([0, 2 * k - 1])

    return ContinuedFraction("uniform-sym", "J", -1, "z", coeff)


def family_uniform_sym_monic() -> ContinuedFraction:
    """Monic-denominator version: 2/(z -) (1/3)/(z -) (4/15)/(z -) (9/35)/(z -) ..."""

    def coeff(k):
        m = k - 1
        a = Fraction(2) if k == 1 else Fraction(m * m, 4 * m * m - 1)
        return Poly.const(a), _T

    return ContinuedFraction("uniform-sym-monic", "J", -1, "z", coeff)


FAMILIES = {
    "prime-s": family_prime_S,
    "prime-j": family_prime_J,
    "log-s": family_log_S,
    "log-s-alt": family_log_S_alt,
    "log-j": family_log_J,
    "uniform-sym": family_uniform_sym,
}


# Legendre structure -----------------------------------------------------------

def legendre_shifted(n: int) -> Poly:
    """P_n(2x+1) = sum_k C(n,k) C(n+k,k) x^k, integer coefficients."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return Poly(math.comb(n, k) * math.comb(n + k, k) for k in range(n + 1))


def legendre_error_constant(n: int) -> Fraction:
    """c_n with log(1+1/x) - w_n(x) ~ c_n / x^(2n+1)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n == 0:
        return Fraction(1)
    return Fraction(1, (2 * n + 2) * math.comb(2 * n + 1, n) * math.comb(2 * n - 1, n))


def legendre_numerator(n: int) -> Poly:
    """Numerator R_n(x) = sum_{k=1}^n a_{n,k} x^(k-1) of w_n = R_n / P_n(2x+1)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    coeffs = []
    for k in range(1, n + 1):
        a = sum(Fraction((-1) ** (j - k), j - k + 1) * math.comb(n, j) * math.comb(n + j, j)
                for j in range(k, n + 1))
        coeffs.append(a)
    return Poly(coeffs)
