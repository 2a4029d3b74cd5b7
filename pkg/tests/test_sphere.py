"""Leading variation coefficients and the exact first-variation check."""

from __future__ import annotations

import math
import time
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from achcr.errors import BadParameter, DegreeBoundExceeded
from achcr.frame import heisenberg, su2
from achcr.scalar import Scalar
from achcr.sphere import (
    closed_form,
    closed_form_check,
    derivative_at_zero,
    leading_recursion,
    newton_coefficients,
    polynomial_from_samples,
    variation_formula_check,
)

from conftest import scalars


def test_recursion_examples():
    r1 = leading_recursion(1)
    assert r1.c == (mpq(2),) and r1.a == mpq(-1)
    r2 = leading_recursion(2)
    assert r2.c == (mpq(1), mpq(-1, 2)) and r2.a == mpq(1, 4)
    assert leading_recursion(3).a == mpq(-1, 36)
    with pytest.raises(BadParameter):
        leading_recursion(0)


def test_closed_form_n8():
    assert closed_form(8) == mpq(1, 40320**2)
    rep = closed_form_check(8)
    assert rep.ok


@pytest.mark.parametrize("n", range(1, 9))
def test_recursion_matches_closed_form(n):
    rec = leading_recursion(n)
    assert rec.a * math.factorial(n) ** 2 == (-1) ** n
    for x, y in zip(rec.c, rec.c[1:]):
        assert x * y < 0


def test_recursion_is_fast():
    start = time.perf_counter()
    for n in range(1, 9):
        closed_form_check(n)
    assert time.perf_counter() - start < 1


# interpolation oracle


def _eval(p, t):
    acc = Scalar(0)
    for c in reversed(p):
        acc = acc * Scalar(t) + c
    return acc


def test_newton_recovers_polynomial():
    p = [Scalar(1), Scalar(0, 2), Scalar(Fraction(-1, 3))]
    ts = [mpq(j, 7) for j in range(6)]
    ys = [_eval(p, t) for t in ts]
    assert polynomial_from_samples(ts, ys, 4) == p
    assert polynomial_from_samples(ts, ys, 1) is None
    coef = newton_coefficients(ts, ys)
    assert all(c.is_zero() for c in coef[3:])
    with pytest.raises(ValueError):
        polynomial_from_samples(ts[:3], ys[:3], 2)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(scalars, min_size=1, max_size=6),
    st.lists(scalars, min_size=1, max_size=3),
    st.integers(0, 3),
)
def test_rational_oracle_taylor(p, qtail, k):
    q = [Scalar(1)] + qtail
    bound = 12
    ts = []
    ys = []
    j = 0
    while len(ts) < bound + 3:
        t = mpq(j, 7)
        j += 1
        qv = _eval(q, t)
        if qv.is_zero():
            continue
        ts.append(t)
        ys.append(_eval(p, t) / qv**k)
    rd = derivative_at_zero(ts, ys, q, bound)
    # Taylor coefficients of p / q**k at 0 by direct series division
    qk = [Scalar(1)]
    for _ in range(k):
        qk = [sum((qk[i] * q[m - i] for i in range(len(qk)) if 0 <= m - i < len(q)), Scalar(0)) for m in range(len(qk) + len(q) - 1)]
    num = [p[i] if i < len(p) else Scalar(0) for i in range(3)]
    out = []
    for i in range(3):
        acc = num[i]
        for m in range(1, i + 1):
            if m < len(qk):
                acc = acc - qk[m] * out[i - m]
        out.append(acc)
    assert (rd.value, rd.derivative, rd.second) == tuple(out)


def test_oracle_refuses_degree_overflow():
    ts = [mpq(j, 7) for j in range(5)]
    ys = [Scalar(t) ** 6 for t in ts]
    with pytest.raises(DegreeBoundExceeded):
        derivative_at_zero(ts, ys, [Scalar(1)], 3, max_power=2)


# first variation


def test_variation_heisenberg2():
    mu = [[Scalar(1), Scalar(Fraction(1, 2))], [Scalar(Fraction(1, 2)), Scalar(2)]]
    rep = variation_formula_check(heisenberg(2), mu)
    assert rep.ok
    assert all(c.ok for c in rep.checks.values())
    # h is stationary to first order but moves at second order
    assert rep.second_order_h
    assert any(not v.is_zero() for v in rep.second_order_h.values())


def test_variation_zero_mu():
    zero = [[Scalar(0)] * 2 for _ in range(2)]
    rep = variation_formula_check(heisenberg(2), zero)
    assert rep.ok and not rep.second_order_h


def test_variation_n1_and_complex_mu():
    rep = variation_formula_check(heisenberg(1), [[Scalar(Fraction(2, 3), -1)]])
    assert rep.ok


@pytest.mark.slow
def test_variation_heisenberg3():
    mu = [[Scalar(1), Scalar(0), Scalar(0, 1)], [Scalar(0), Scalar(-1), Scalar(1)], [Scalar(0, 1), Scalar(1), Scalar(0)]]
    assert variation_formula_check(heisenberg(3), mu).ok


def test_variation_needs_flat_base():
    with pytest.raises(BadParameter):
        variation_formula_check(su2(), [[Scalar(1)]])


def test_variation_bound_too_small():
    mu = [[Scalar(1), Scalar(Fraction(1, 2))], [Scalar(Fraction(1, 2)), Scalar(2)]]
    with pytest.raises(DegreeBoundExceeded):
        variation_formula_check(heisenberg(2), mu, bound=1)
