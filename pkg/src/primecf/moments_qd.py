"""Moments, Stieltjes transforms and the qd algorithm.

Conventions.  For a measure mu with moments m_n the expansion variable is z
and w = 1/z.  The S-coefficients c_k (c_0 kept outside the fraction) satisfy

    z S(z) = c_0 + c_1 w / (1 + c_2 w / (1 + c_3 w / (1 + ...)))

and their even contraction gives the J-form

    z S(z) = a_0 + b_1 / (z + a_1 + b_2 / (z + a_2 + b_3 / (z + a_3 + ...)))

with a_0 = c_0, b_1 = c_1, a_1 = c_2 and, for k >= 2,
b_k = -c_{2k-2} c_{2k-1}, a_k = c_{2k-1} + c_{2k}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import mpmath
import numpy as np
from sklearn.base import BaseEstimator

from .contfrac import ContinuedFraction, Poly, eval_backward
from .exceptions import DomainError, IllConditionedError, OnSupportError, SingularityError
from .precision import PrecisionContext, resolve
from .special import ei


@dataclass(frozen=True)
class ExpDensityInterval:
    """Measure e^{-u} du on [s, t]."""

    s: float
    t: float

    def __post_init__(self):
        if not self.s < self.t:
            raise DomainError(f"need s < t, got s={self.s}, t={self.t}")

    @property
    def support(self):
        return self.s, self.t


@dataclass(frozen=True)
class UniformInterval:
    """Lebesgue measure du on [a, b] (not normalized)."""

    a: object
    b: object

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"need a < b, got a={self.a}, b={self.b}")

    @property
    def support(self):
        return self.a, self.b


MeasureSpec = Union[ExpDensityInterval, UniformInterval]


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpmathify(v)


def hankel_determinant(values: Sequence, k: int):
    """det[(m_{i+j})_{0<=i,j<=k}] in the current mpmath precision."""
    if 2 * k >= len(values):
        raise DomainError(f"need at least {2 * k + 1} moments for a size-{k + 1} Hankel matrix")
    mat = mpmath.matrix(k + 1, k + 1)
    for i in range(k + 1):
        for j in range(k + 1):
            mat[i, j] = _mp(values[i + j])
    return mpmath.det(mat)


@dataclass(frozen=True)
class MomentSequence:
    values: tuple
    measure: MeasureSpec
    provenance: str = "closed-form"

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def normalized_hankel(self, k: int):
        """Hankel determinant divided by |product of its diagonal|; lies in (0, 1] for a positive measure."""
        det = hankel_determinant(self.values, k)
        diag = abs(mpmath.fprod(_mp(self.values[2 * i]) for i in range(k + 1)))
        if diag == 0:
            return mpmath.mpf(0)
        return det / diag

    def check_hankel(self, k_max: int, ctx: PrecisionContext | None = None) -> None:
        """Raise IllConditionedError if any normalized Hankel determinant up to k_max is below tolerance."""
        ctx = resolve(ctx)
        with ctx.workdps():
            for k in range(k_max + 1):
                h = self.normalized_hankel(k)
                if not h > ctx.tolerance:
                    raise IllConditionedError(
                        f"Hankel determinant of order {k} is {mpmath.nstr(h, 5)} (not above tolerance)")


def _guard_digits(n: int) -> int:
    # the forward recurrence can multiply an early rounding error by up to n!
    return int(math.lgamma(n + 1) / math.log(10)) + 3


def moments(measure: MeasureSpec, N: int, ctx: PrecisionContext | None = None) -> MomentSequence:
    """Closed-form moments m_0..m_N.

    Exponential case: m_0 = e^{-s} - e^{-t}, m_n = n m_{n-1} + s^n e^{-s} - t^n e^{-t}.
    Uniform case: m_n = (b^{n+1} - a^{n+1}) / (n+1), exact when the endpoints are rational.
    """
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    ctx = resolve(ctx)
    if isinstance(measure, UniformInterval):
        a, b = measure.a, measure.b
        if all(isinstance(v, (int, Fraction)) for v in (a, b)):
            vals = tuple(Fraction(b ** (n + 1) - a ** (n + 1), n + 1) for n in range(N + 1))
        else:
            with ctx.workdps():
                a, b = _mp(a), _mp(b)
                vals = tuple((b ** (n + 1) - a ** (n + 1)) / (n + 1) for n in range(N + 1))
        return MomentSequence(vals, measure, "closed-form")
    with ctx.workdps(_guard_digits(N)):
        s, t = _mp(measure.s), _mp(measure.t)
        es, et = mpmath.exp(-s), mpmath.exp(-t)
        vals = [es - et]
        for n in range(1, N + 1):
            vals.append(n * vals[-1] + s ** n * es - t ** n * et)
    with ctx.workdps():
        return MomentSequence(tuple(+v for v in vals), measure, "closed-form")


def r_polynomial(n: int, lower: int = 0) -> Poly:
    """r_n(X) = sum_{k=lower}^n n!/k! X^k.  lower=0 gives the incomplete-gamma form."""
    return Poly([math.factorial(n) // math.factorial(k) if k >= lower else 0 for k in range(n + 1)])


def moments_via_r(measure: ExpDensityInterval, N: int, lower: int = 0,
                  ctx: PrecisionContext | None = None) -> MomentSequence:
    """m_n = e^{-s} r_n(s) - e^{-t} r_n(t) with a chosen lower summation index."""
    ctx = resolve(ctx)
    with ctx.workdps():
        s, t = _mp(measure.s), _mp(measure.t)
        vals = []
        for n in range(N + 1):
            r = r_polynomial(n, lower)
            vals.append(mpmath.exp(-s) * r(s) - mpmath.exp(-t) * r(t))
    return MomentSequence(tuple(vals), measure, f"closed-form(r_n from k={lower})")


def quadrature_moments(measure: MeasureSpec, N: int, ctx: PrecisionContext | None = None) -> MomentSequence:
    """Moments by adaptive Gauss-Legendre quadrature (oracle path)."""
    ctx = resolve(ctx)
    lo, hi = (_mp(v) for v in measure.support)
    weight = (lambda u: mpmath.exp(-u)) if isinstance(measure, ExpDensityInterval) else (lambda u: 1)
    with ctx.workdps():
        vals = tuple(mpmath.quad(lambda u, n=n: u ** n * weight(u), [lo, hi]) for n in range(N + 1))
    return MomentSequence(vals, measure, "quadrature")


# qd algorithm ----------------------------------------------------------------

@dataclass(frozen=True)
class QdTable:
    """Columns of the qd scheme for a sequence f_0, f_1, ...

    ``q[r][k]`` is q_{r+1}^{(k)} and ``e[r][k]`` is e_r^{(k)} (``e[0]`` is the zero column).
    """

    sequence: tuple
    q: tuple
    e: tuple

    def rhombus_residuals(self):
        """Largest violation of the two rhombus rules over interior entries."""
        worst = 0
        for r in range(1, len(self.e)):
            for k in range(len(self.e[r])):
                lhs = self.e[r][k] + self.q[r - 1][k]
                rhs = self.e[r - 1][k + 1] + self.q[r - 1][k + 1]
                worst = max(worst, abs(lhs - rhs))
        for r in range(1, len(self.q)):
            for k in range(len(self.q[r])):
                lhs = self.q[r][k] * self.e[r][k]
                rhs = self.q[r - 1][k + 1] * self.e[r][k + 1]
                worst = max(worst, abs(lhs - rhs))
        return worst

    def column0(self, count: int) -> list:
        """First ``count`` S-fraction coefficients d_1, d_2, ... of sum f_k w^k in the '+' convention."""
        out = [self.sequence[0]]
        r = 0
        while len(out) < count:
            if r < len(self.q) and self.q[r]:
                out.append(-self.q[r][0])
            else:
                break
            if len(out) < count and r + 1 < len(self.e) and self.e[r + 1]:
                out.append(-self.e[r + 1][0])
            r += 1
        if len(out) < count:
            raise DomainError(f"qd table too short for {count} coefficients")
        return out


def qd_table(sequence: Sequence, ctx: PrecisionContext | None = None) -> QdTable:
    """Run the qd recurrence on f_0..f_L.

    q_1^{(k)} = f_{k+1}/f_k, e_r^{(k)} = e_{r-1}^{(k+1)} + q_r^{(k+1)} - q_r^{(k)},
    q_{r+1}^{(k)} = q_r^{(k+1)} e_r^{(k+1)} / e_r^{(k)}.
    Works on Fractions exactly or on mpf at the current precision.
    """
    f = list(sequence)
    L = len(f) - 1
    if L < 1:
        raise DomainError("need at least two terms")

    def div(a, b, what):
        if b == 0:
            raise SingularityError(f"qd: zero divisor in {what}")
        return a / b

    q_cols = [[div(f[k + 1], f[k], "q_1") for k in range(L)]]
    e_cols = [[0] * (L + 1)]
    r = 1
    while True:
        q_prev = q_cols[-1]
        if len(q_prev) < 2:
            break
        e_prev = e_cols[-1]
        e_new = [e_prev[k + 1] + q_prev[k + 1] - q_prev[k] for k in range(len(q_prev) - 1)]
        e_cols.append(e_new)
        if len(e_new) < 2:
            break
        q_new = [div(q_prev[k + 1] * e_new[k + 1], e_new[k], f"q_{r + 1}") for k in range(len(e_new) - 1)]
        q_cols.append(q_new)
        r += 1
    return QdTable(tuple(f), tuple(tuple(c) for c in q_cols), tuple(tuple(c) for c in e_cols))


def depth_cap(ctx: PrecisionContext | None = None) -> int:
    return resolve(ctx).digits // 4


def _prepare(moment_seq, depth, ctx):
    ctx = resolve(ctx)
    if not isinstance(moment_seq, MomentSequence):
        moment_seq = MomentSequence(tuple(moment_seq), None, "user")
    vals = moment_seq.values
    if depth is None:
        depth = min(len(vals) - 1, depth_cap(ctx))
    if depth > depth_cap(ctx):
        raise IllConditionedError(
            f"depth {depth} exceeds the cap {depth_cap(ctx)} at {ctx.digits} digits; raise the precision")
    if depth > len(vals) - 1:
        raise DomainError(f"depth {depth} needs {depth + 1} moments, got {len(vals)}")
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if moment_seq.measure is not None or moment_seq.provenance == "user":
        moment_seq.check_hankel(depth // 2, ctx)
    return moment_seq, depth, ctx


def qd_scoefficients(moment_seq, depth: int | None = None, ctx: PrecisionContext | None = None) -> list:
    """c_0..c_depth with c_0 outside the fraction (see module docstring).

    The qd scheme runs on the shifted sequence m_1, m_2, ..., so c_k uses m_0..m_k.
    """
    moment_seq, depth, ctx = _prepare(moment_seq, depth, ctx)
    vals = moment_seq.values[: depth + 1]
    with ctx.workdps():
        if depth == 1:
            return [vals[0], vals[1]]
        table = qd_table(vals[1:], ctx)
        return [vals[0]] + table.column0(depth)


def s_fraction_coefficients(moment_seq, depth: int | None = None, ctx: PrecisionContext | None = None) -> list:
    """d_1..d_depth with S(z) = d_1 w / (1 + d_2 w / (1 + ...)), i.e. c_0 inside the fraction."""
    moment_seq, depth, ctx = _prepare(moment_seq, depth, ctx)
    vals = moment_seq.values[:depth]
    with ctx.workdps():
        if depth == 1:
            return [vals[0]]
        return qd_table(vals, ctx).column0(depth)


def normalize_denominators(numerators: Sequence, denominators: Sequence) -> list:
    """Equivalence transform taking unit denominators to ``denominators``.

    Level k is scaled by r_k, so numerator k becomes r_{k-1} r_k d_k (r_0 = 1).
    """
    out, prev = [], 1
    for d, r in zip(numerators, denominators):
        out.append(prev * r * d)
        prev = r
    return out


@dataclass(frozen=True)
class JacobiCoefficients:
    a0: object
    a: tuple
    b: tuple

    @property
    def depth(self) -> int:
        return len(self.a)


def contract_to_jacobi(c: Sequence, ctx: PrecisionContext | None = None) -> JacobiCoefficients:
    """Even contraction of c_0..c_{2m} into a_0 and (a_k, b_k), k = 1..m."""
    ctx = resolve(ctx)
    with ctx.workdps():
        return _contract(list(c))


def _contract(c: list) -> JacobiCoefficients:
    if len(c) < 3:
        raise DomainError("need c_0, c_1, c_2 for one J-level")
    m = (len(c) - 1) // 2
    for k, v in enumerate(c[1: 2 * m + 1], start=1):
        if v == 0:
            raise SingularityError(f"contraction degenerate: c_{k} = 0")
    a, b = [c[2]], [c[1]]
    for k in range(2, m + 1):
        b.append(-c[2 * k - 2] * c[2 * k - 1])
        a.append(c[2 * k - 1] + c[2 * k])
    return JacobiCoefficients(c[0], tuple(a), tuple(b))


def s_fraction(c: Sequence) -> ContinuedFraction:
    """z S(z) - c_0 as a fraction in t = 1/z (numerators c_k t, unit denominators)."""
    c = list(c)
    return ContinuedFraction.from_lists([Poly([0, v]) for v in c[1:]], [1] * (len(c) - 1),
                                        name="qd-S", form="S", connective=1, variable="1/z")


def jacobi_fraction(jac: JacobiCoefficients) -> ContinuedFraction:
    """z S(z) - a_0 as a fraction in z."""
    return ContinuedFraction.from_lists(list(jac.b), [Poly([ak, 1]) for ak in jac.a],
                                        name="qd-J", form="J", connective=1, variable="z")


def s_approximant(c: Sequence, depth: int, z, ctx: PrecisionContext | None = None):
    """c_0 plus the depth-truncated S-fraction at z; depth 0 is c_0 alone."""
    ctx = resolve(ctx)
    with ctx.workdps():
        if depth == 0:
            return +_mp(c[0])
        return _mp(c[0]) + eval_backward(s_fraction([_mp(v) for v in c[: depth + 1]]), depth, z, ctx)


def j_approximant(jac: JacobiCoefficients, depth: int, z, ctx: PrecisionContext | None = None):
    """a_0 plus the depth-truncated J-fraction at z; depth 0 is a_0 alone."""
    ctx = resolve(ctx)
    if depth > jac.depth:
        raise DomainError(f"only {jac.depth} J-levels available")
    with ctx.workdps():
        if depth == 0:
            return +_mp(jac.a0)
        mp_jac = JacobiCoefficients(_mp(jac.a0), tuple(map(_mp, jac.a)), tuple(map(_mp, jac.b)))
        return mp_jac.a0 + eval_backward(jacobi_fraction(mp_jac), depth, z, ctx)


# closed forms -----------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormCoefficients:
    c0: object
    c1: object
    c2: object
    c3: object
    b2: object


def _g_poly(s, t, literal: bool):
    # the printed polynomial lists s t^2 twice; symmetry in (s, t) requires s t^3 in one slot
    first = s * t ** 2 if literal else s * t ** 3
    return (s ** 3 * t + first - 2 * s ** 2 * t ** 2 + s ** 3 + t ** 3 - s ** 2 * t - s * t ** 2
            - s ** 2 - t ** 2 + 4 * s * t + 4 * s + 4 * t + 4)


def closed_form_coefficients(s, t, ctx: PrecisionContext | None = None, literal: bool = False) -> ClosedFormCoefficients:
    """Closed forms for c_0..c_3 and b_2 of the e^{-u} du measure on [s, t].

    ``literal=True`` evaluates the formulas exactly as printed.  The default
    applies three corrections found by comparison with the qd scheme: c_2 and
    c_3 change sign, g uses s t^3 in place of a repeated s t^2, and
    b_2 = -c_2 c_3.
    """
    ctx = resolve(ctx)
    if not s < t:
        raise DomainError(f"need s < t, got s={s}, t={t}")
    with ctx.workdps():
        s, t = _mp(s), _mp(t)
        es, et = mpmath.exp(-s), mpmath.exp(-t)
        A = es * (1 + s) - et * (1 + t)
        B = es * (2 + 2 * s + s ** 2) - et * (2 + 2 * t + t ** 2)
        if A == 0 or B == 0:
            raise SingularityError(f"closed forms degenerate at (s, t) = ({s}, {t})")
        num3 = (es ** 2 * (2 + 4 * s + s ** 2) + et ** 2 * (2 + 4 * t + t ** 2)
                - es * et * _g_poly(s, t, literal))
        sign = 1 if literal else -1
        c2 = sign * B / A
        c3 = sign * num3 / (A * B)
        b2 = c2 * c3 if literal else -c2 * c3
        return ClosedFormCoefficients(es - et, A, c2, c3, b2)


def stieltjes_exp_interval(z, s, t, ctx: PrecisionContext | None = None):
    """S(z) = integral over [s, t] of e^{-u}/(z - u) du = e^{-z} (Ei(z - s) - Ei(z - t)) for real z off [s, t]."""
    ctx = resolve(ctx)
    with ctx.workdps(5):
        z, s, t = _mp(z), _mp(s), _mp(t)
        if s <= z <= t:
            raise OnSupportError(f"z = {z} lies on the support [{s}, {t}]")
        value = mpmath.exp(-z) * (ei(z - s, ctx) - ei(z - t, ctx))
    with ctx.workdps():
        return +value


def stieltjes_via_li(z, s, t, ctx: PrecisionContext | None = None):
    """Same transform written as (li(e^{z-s}) - li(e^{z-t})) / e^z, using mpmath's li (independent path)."""
    ctx = resolve(ctx)
    with ctx.workdps(5):
        z, s, t = _mp(z), _mp(s), _mp(t)
        if s <= z <= t:
            raise OnSupportError(f"z = {z} lies on the support [{s}, {t}]")
        value = (mpmath.li(mpmath.exp(z - s)) - mpmath.li(mpmath.exp(z - t))) / mpmath.exp(z)
    with ctx.workdps():
        return +value


# estimator --------------------------------------------------------------------

class QDApproximant(BaseEstimator):
    """Fit continued-fraction coefficients to a moment sequence, predict z S(z).

    Parameters
    ----------
    depth : int or None
        Number of S-coefficients beyond c_0 (None uses all moments up to the precision cap).
    form : {"J", "S"}
        Which fraction ``predict`` evaluates.  J uses floor(depth/2) levels.
    digits : int
        Working precision.
    """

    def __init__(self, depth=None, form="J", digits=30):
        self.depth = depth
        self.form = form
        self.digits = digits

    def _ctx(self):
        return PrecisionContext(digits=self.digits)

    def fit(self, X, y=None):
        """X is a MomentSequence, a MeasureSpec, or an array of moments m_0, m_1, ..."""
        ctx = self._ctx()
        if self.form not in ("J", "S"):
            raise ValueError(f"form must be 'J' or 'S', got {self.form!r}")
        if isinstance(X, (ExpDensityInterval, UniformInterval)):
            X = moments(X, self.depth if self.depth is not None else depth_cap(ctx), ctx)
        elif not isinstance(X, MomentSequence):
            X = MomentSequence(tuple(np.asarray(X, dtype=object).ravel()), None, "user")
        self.moments_ = X
        self.s_coefficients_ = qd_scoefficients(X, self.depth, ctx)
        self.jacobi_ = contract_to_jacobi(self.s_coefficients_, ctx) if len(self.s_coefficients_) >= 3 else None
        return self

    def predict(self, z):
        ctx = self._ctx()
        if not hasattr(self, "s_coefficients_"):
            raise AttributeError("QDApproximant is not fitted yet; call fit first")
        zs = np.atleast_1d(np.asarray(z, dtype=object))
        if self.form == "S":
            depth = len(self.s_coefficients_) - 1
            out = [s_approximant(self.s_coefficients_, depth, zi, ctx) for zi in zs]
        else:
            if self.jacobi_ is None:
                out = [s_approximant(self.s_coefficients_, 0, zi, ctx) for zi in zs]
            else:
                out = [j_approximant(self.jacobi_, self.jacobi_.depth, zi, ctx) for zi in zs]
        return np.array(out, dtype=object)
