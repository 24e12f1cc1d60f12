import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from primecf import (
    DomainError,
    ExpDensityInterval,
    IllConditionedError,
    OnSupportError,
    QDApproximant,
    SingularityError,
    UniformInterval,
    closed_form_coefficients,
    contract_to_jacobi,
    moments,
    qd_scoefficients,
)
from primecf.moments_qd import (
    MomentSequence,
    depth_cap,
    j_approximant,
    moments_via_r,
    normalize_denominators,
    qd_table,
    quadrature_moments,
    s_approximant,
    s_fraction_coefficients,
    stieltjes_exp_interval,
    stieltjes_via_li,
)

from conftest import mp

E = mpmath.e
TOL30 = mpmath.mpf(10) ** -30
PAIRS = [(-1, 0), (0, 1), (-2, 1), (-mpmath.log(2), 0)]


@pytest.fixture(scope="module")
def unit(ctx):
    """qd data for e^{-u} du on [-1, 0]."""
    ms = moments(ExpDensityInterval(-1, 0), 6, ctx)
    c = qd_scoefficients(ms, 6, ctx)
    return ms, c, contract_to_jacobi(c)


# moments -------------------------------------------------------------------------

def test_moment_examples(ctx):
    assert moments(UniformInterval(-1, 0), 3, ctx)[3] == Fraction(-1, 4)
    ms = moments(ExpDensityInterval(-1, 0), 2, ctx)
    assert abs(ms[0] - (E - 1)) < TOL30
    assert abs(ms[1] + 1) < TOL30
    assert abs(ms[2] - (E - 2)) < TOL30


@pytest.mark.parametrize("s,t", PAIRS)
def test_moments_match_quadrature(ctx, s, t):
    measure = ExpDensityInterval(s, t)
    closed = moments(measure, 12, ctx)
    quad = quadrature_moments(measure, 12, ctx)
    assert quad.provenance == "quadrature"
    for a, b in zip(closed.values, quad.values):
        assert abs(a - b) <= 1e-10


def test_r_polynomial_needs_k0_term(ctx):
    measure = ExpDensityInterval(-1, 0)
    with_k0 = moments_via_r(measure, 6, lower=0, ctx=ctx)
    without = moments_via_r(measure, 6, lower=1, ctx=ctx)
    ref = moments(measure, 6, ctx)
    assert all(abs(a - b) < 1e-25 for a, b in zip(with_k0.values, ref.values))
    assert abs(without[1] + E) < 1e-25  # -e instead of -1


def test_measure_validation():
    with pytest.raises(DomainError):
        ExpDensityInterval(1, 1)
    with pytest.raises(DomainError):
        UniformInterval(0, -1)
    with pytest.raises(DomainError):
        moments(ExpDensityInterval(0, 1), -1)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 2), st.floats(0.05, 3))
def test_hankel_positive(s, width):
    ms = moments(ExpDensityInterval(s, s + width), 8)
    for k in range(3):
        assert ms.normalized_hankel(k) > 0


def test_hankel_rejects_signed_sequence(ctx):
    bad = MomentSequence((1, 0, -1, 0, 1), None, "user")
    with pytest.raises(IllConditionedError):
        bad.check_hankel(1, ctx)
    with pytest.raises(IllConditionedError):
        qd_scoefficients(bad, 4, ctx)


# qd ------------------------------------------------------------------------------

def test_qd_examples(unit):
    ms, c, _ = unit
    assert abs(c[0] - (E - 1)) < TOL30
    assert abs(c[1] + 1) < TOL30
    assert abs(c[2] - (E - 2)) < TOL30
    assert abs(c[3] + (E ** 2 - 2 * E - 2) / (E - 2)) < TOL30


def test_qd_log2_example(ctx):
    ms = moments(ExpDensityInterval(-mpmath.log(2), 0), 4, ctx)
    c = qd_scoefficients(ms, 4, ctx)
    assert abs(c[1] + (mpmath.log(4) - 1)) < TOL30
    assert abs(c[1] - mpmath.mpf("-0.38629436111989")) < 1e-14
    jac = contract_to_jacobi(c)
    assert abs(jac.a[0] - 2 * (mpmath.log(2) - 1) ** 2 / (mpmath.log(4) - 1)) < TOL30
    assert abs(jac.a[0] - mpmath.mpf("0.48749690534099")) < 1e-14


def test_uniform_squares_pattern(ctx):
    ms = moments(UniformInterval(-1, 0), 7, ctx)
    d = s_fraction_coefficients(ms, 7, ctx)
    assert all(isinstance(v, Fraction) for v in d)
    assert normalize_denominators(d, range(1, 8)) == [1, 1, 1, 4, 4, 9, 9]


def test_uniform_qd_converges_to_log(ctx):
    # S(z) for du on [-1, 0] is log(1 + 1/z)
    ms = moments(UniformInterval(-1, 0), 7, ctx)
    c = qd_scoefficients(ms, 7, ctx)
    z = mpmath.mpf(5)
    approx = s_approximant(c, 7, z, ctx) / z
    assert abs(approx - mpmath.log(1 + 1 / z)) < 1e-8


def test_rhombus_rules(unit, ctx):
    ms, _, _ = unit
    with ctx.workdps():
        table = qd_table(ms.values[1:], ctx)
    assert table.rhombus_residuals() < mpmath.mpf(10) ** -32


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=7), st.fractions(min_value=Fraction(1, 5), max_value=3, max_denominator=7))
def test_rhombus_exact_on_rationals(a, width):
    ms = moments(UniformInterval(a, a + width), 6)
    if any(v == 0 for v in ms.values):
        return
    try:
        table = qd_table(ms.values)
    except SingularityError:
        return
    assert table.rhombus_residuals() == 0


def test_depth_cap(ctx):
    assert depth_cap(ctx) == 7
    ms = moments(ExpDensityInterval(-1, 0), 10, ctx)
    with pytest.raises(IllConditionedError):
        qd_scoefficients(ms, 8, ctx)
    with pytest.raises(DomainError):
        qd_scoefficients(moments(ExpDensityInterval(-1, 0), 3, ctx), 5, ctx)


# contraction ---------------------------------------------------------------------

def test_jacobi_examples(unit):
    _, c, jac = unit
    assert jac.a0 == c[0]
    assert abs(jac.a[0] - (E - 2)) < TOL30
    assert abs(jac.b[0] + 1) < TOL30
    assert abs(jac.b[1] - (E ** 2 - 2 * E - 2)) < TOL30


def test_a0_is_total_mass(ctx):
    for s, t in PAIRS:
        ms = moments(ExpDensityInterval(s, t), 4, ctx)
        jac = contract_to_jacobi(qd_scoefficients(ms, 4, ctx))
        assert abs(jac.a0 - (mpmath.exp(-mp(s)) - mpmath.exp(-mp(t)))) < TOL30


@pytest.mark.parametrize("z", ["2.5", "-7", "30"])
def test_contraction_consistency(unit, ctx, z):
    _, c, jac = unit
    z = mpmath.mpf(z)
    for m in (1, 2, 3):
        assert abs(j_approximant(jac, m, z, ctx) - s_approximant(c, 2 * m, z, ctx)) < mpmath.mpf(10) ** -28


def test_contraction_degenerate():
    with pytest.raises(SingularityError):
        contract_to_jacobi([1, 0, 2])
    with pytest.raises(DomainError):
        contract_to_jacobi([1, 2])


def test_j_error_slopes(unit, ctx):
    # z S - a0 ~ b1/z and z S - J_1 ~ -b1 b2 / z^3
    _, _, jac = unit
    xs = [mpmath.mpf(10) ** k for k in (2, 3, 4)]
    for depth, slope, const in ((0, -1, jac.b[0]), (1, -3, -jac.b[0] * jac.b[1])):
        errs = [x * stieltjes_exp_interval(x, -1, 0, ctx) - j_approximant(jac, depth, x, ctx) for x in xs]
        fit = (mpmath.log(abs(errs[-1])) - mpmath.log(abs(errs[0]))) / (mpmath.log(xs[-1]) - mpmath.log(xs[0]))
        assert abs(fit - slope) < 0.05
        assert abs(errs[-1] * xs[-1] ** (-slope) / const - 1) < 1e-3


# closed forms --------------------------------------------------------------------

def test_closed_form_examples(ctx):
    cf = closed_form_coefficients(-1, 0, ctx)
    assert abs(cf.c2 - (E - 2)) < TOL30
    cf2 = closed_form_coefficients(-mpmath.log(2), 0, ctx)
    assert abs(cf2.c1 + (mpmath.log(4) - 1)) < TOL30


def test_closed_form_literal_signs(ctx):
    # as printed, c2 carries the opposite sign of the qd value
    lit = closed_form_coefficients(-1, 0, ctx, literal=True)
    assert abs(lit.c2 + (E - 2)) < TOL30


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 2), st.floats(0.1, 3))
def test_closed_forms_match_qd(s, width):
    t = s + width
    ms = moments(ExpDensityInterval(s, t), 4)
    c = qd_scoefficients(ms, 4)
    jac = contract_to_jacobi(c)
    cf = closed_form_coefficients(s, t)
    for got, ref in ((cf.c0, c[0]), (cf.c1, c[1]), (cf.c2, c[2]), (cf.c3, c[3]), (cf.b2, jac.b[1])):
        assert abs(got - ref) <= 1e-9 * max(1, abs(ref))


def test_closed_form_validation(ctx):
    with pytest.raises(DomainError):
        closed_form_coefficients(1, 0, ctx)


# Stieltjes transform -------------------------------------------------------------

def test_stieltjes_examples(ctx):
    z = mpmath.mpf(10)
    a = stieltjes_exp_interval(z, -1, 0, ctx)
    b = stieltjes_via_li(z, -1, 0, ctx)
    assert abs(a - b) < 1e-10
    assert abs(a - (mpmath.li(mpmath.exp(11)) - mpmath.li(mpmath.exp(10))) / mpmath.exp(10)) < 1e-10
    big = mpmath.mpf(10) ** 12
    assert abs(big * stieltjes_exp_interval(big, -1, 0, ctx) - (E - 1)) < 1e-10


def test_stieltjes_oracle(ctx, oracle):
    for key, value in oracle["stieltjes_quad"].items():
        z, a, b = key.split(",")
        assert abs(stieltjes_exp_interval(mp(z), mp(a), mp(b), ctx) - mp(value)) < mpmath.mpf(10) ** -28, key


@pytest.mark.parametrize("z", [-1, "-0.5", 0])
def test_stieltjes_on_support(ctx, z):
    with pytest.raises(OnSupportError):
        stieltjes_exp_interval(z, -1, 0, ctx)


def test_s_approximant_improves_with_depth(unit, ctx):
    _, c, _ = unit
    z = mpmath.mpf(20)
    target = z * stieltjes_exp_interval(z, -1, 0, ctx)
    errs = [abs(s_approximant(c, d, z, ctx) - target) for d in range(7)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-8


# estimator -----------------------------------------------------------------------

def test_estimator_fit_predict(ctx):
    est = QDApproximant(depth=6, form="J").fit(ExpDensityInterval(-1, 0))
    assert est.jacobi_.depth == 3
    z = np.array([20, 50])
    pred = est.predict(z)
    for zi, p in zip(z, pred):
        zi = mpmath.mpf(int(zi))
        assert abs(p - zi * stieltjes_exp_interval(zi, -1, 0, ctx)) < 1e-8
    s_pred = clone(est).set_params(form="S").fit(ExpDensityInterval(-1, 0)).predict(20)
    assert abs(s_pred[0] - pred[0]) < 1e-8


def test_estimator_accepts_arrays_and_sequences(ctx):
    ms = moments(UniformInterval(-1, 0), 6, ctx)
    from_seq = QDApproximant(depth=6).fit(ms)
    from_arr = QDApproximant(depth=6).fit([mpmath.mpf(v.numerator) / v.denominator for v in ms.values])
    for a, b in zip(from_seq.s_coefficients_, from_arr.s_coefficients_):
        assert isinstance(a, Fraction)
        assert abs(mpmath.mpf(a.numerator) / a.denominator - b) < 1e-25


def test_estimator_params_and_errors():
    est = QDApproximant(depth=4, form="S", digits=40)
    assert est.get_params() == {"depth": 4, "form": "S", "digits": 40}
    with pytest.raises(AttributeError):
        est.predict(3)
    with pytest.raises(ValueError):
        QDApproximant(form="X").fit(ExpDensityInterval(-1, 0))
