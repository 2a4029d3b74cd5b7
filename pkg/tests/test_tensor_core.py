"""Exact scalars, arrays, truncated series and index contraction."""

from __future__ import annotations

from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from achcr.errors import DivisionByZero, KindMismatch, NotInvertible, ParseError, TruncationMismatch
from achcr.garray import GArray, einsum
from achcr.linalg import det, garray_inverse, inverse, matmul, solve_linear
from achcr.scalar import I, Scalar, as_scalar, q_parse, q_str
from achcr.series import RhoSeries, euler_apply, invert_metric_series, series_mul
from achcr.tensor import ANTI, HOL, Alphabet, IndexKind, InvariantTensor, conj_full, contract, raise_lower, restrict

from conftest import nonzero_scalars, scalars

H = Scalar(Fraction(1, 2))


# scalars


def test_scalar_examples():
    assert (H + I) * (H - I) == Scalar(Fraction(5, 4))
    assert Scalar(Fraction(3, 7), Fraction(-2, 5)).conjugate() == Scalar(Fraction(3, 7), Fraction(2, 5))
    assert (Scalar(1, 1) / Scalar(1, -1)) == I


def test_division_by_zero_rejected():
    with pytest.raises(DivisionByZero):
        Scalar(1) / Scalar(0)
    with pytest.raises(ZeroDivisionError):
        I / 0


def test_rational_strings_are_canonical():
    assert q_str(mpq(6, -4)) == "-3/2"
    assert q_str(mpq(0)) == "0/1"
    assert q_parse("-3/2") == mpq(-3, 2)
    assert q_parse("4") == mpq(4)
    for bad in ("1.5", "1_000", "", "1/0", "a/b", "1/-2"):
        with pytest.raises(ParseError):
            q_parse(bad)


def test_scalar_json_roundtrip():
    s = Scalar(Fraction(-7, 3), Fraction(5, 11))
    assert s.to_json() == {"re": "-7/3", "im": "5/11"}
    assert Scalar.from_json(s.to_json()) == s


@given(scalars, scalars, scalars)
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == Scalar(0)


@given(scalars, scalars)
def test_conjugation_is_an_involutive_automorphism(x, y):
    assert x.conjugate().conjugate() == x
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert (x + y).conjugate() == x.conjugate() + y.conjugate()


@given(scalars, nonzero_scalars)
def test_division_inverts_multiplication(x, y):
    assert (x / y) * y == x


# arrays and linear algebra


def test_einsum_matches_hand_product():
    a = GArray.from_nested([[1, I], [0, 2]])
    b = GArray.from_nested([[I, 0], [1, 1]])
    c = einsum("ij,jk->ik", a, b)
    assert c == GArray.from_nested([[2 * I, I], [2, 2]])


def test_inverse_and_determinant():
    m = [[Scalar(2), I], [Scalar(-1) * I, Scalar(3)]]
    assert det(m) == Scalar(5)
    inv = inverse(m)
    prod = matmul(m, inv)
    assert prod == [[Scalar(1), Scalar(0)], [Scalar(0), Scalar(1)]]
    with pytest.raises(NotInvertible):
        garray_inverse(GArray.from_nested([[1, 2], [2, 4]]))


def test_solve_linear_reports_rank():
    x, rank = solve_linear([[Scalar(1), Scalar(1)], [Scalar(1), Scalar(-1)]], [Scalar(3), Scalar(1)])
    assert rank == 2 and x == [Scalar(2), Scalar(1)]


# series


def _scalar_series(trunc, coeffs):
    return RhoSeries.from_coeffs(trunc, {d: as_scalar(c) for d, c in coeffs.items()})


def test_series_examples():
    t = Scalar(3, -1)
    a = _scalar_series(8, {0: 1, 2: t})
    b = _scalar_series(8, {0: 1, 2: -t})
    assert series_mul(",->", a, b) == _scalar_series(8, {0: 1, 4: -(t * t)})
    assert series_mul(",->", _scalar_series(5, {0: 1}), _scalar_series(7, {0: 1})).trunc == 5
    c = _scalar_series(4, {0: 2, 1: 3})
    assert c.shift(2) == _scalar_series(4, {2: 2, 3: 3})


def test_series_add_mismatched_shapes():
    with pytest.raises(TruncationMismatch):
        RhoSeries.zeros(3, (2,)) + RhoSeries.zeros(3, (3,))


def test_coefficient_outside_truncation():
    with pytest.raises(TruncationMismatch):
        RhoSeries.zeros(3).coefficient(3)


def test_euler_apply_examples():
    s = _scalar_series(6, {3: Scalar(2, 1)})
    assert euler_apply(lambda d: d, s) == _scalar_series(6, {3: Scalar(6, 3)})
    n = 1
    assert euler_apply(lambda d: d * (d - 2 * n - 2), _scalar_series(6, {4: 1})).is_zero()
    n = 2
    out = euler_apply(lambda d: (d + 1) * (d - 2 * n - 3), _scalar_series(6, {3: 1}))
    assert out.coefficient(3) == Scalar(-16)
    assert euler_apply([0, 1], s) == euler_apply(lambda d: d, s)


def _model_metric(n, trunc):
    ab = Alphabet(n, transverse=True)
    g = GArray.zeros((trunc, ab.size, ab.size))
    g[0, 0, 0] = 4
    g[0, 1, 1] = 1
    for a in range(n):
        g[0, ab.hol(a), ab.anti(a)] = 1
        g[0, ab.anti(a), ab.hol(a)] = 1
    return RhoSeries(g), ab


def test_inverse_of_model_metric():
    g, ab = _model_metric(2, 4)
    inv = invert_metric_series(g)
    c0 = inv.coefficient(0)
    assert c0[0, 0] == Scalar(Fraction(1, 4))
    assert c0[1, 1] == Scalar(1)
    assert c0[ab.hol(0), ab.anti(0)] == Scalar(1)
    assert c0[ab.hol(0), ab.hol(0)] == Scalar(0)
    assert all(inv.coefficient(d).is_zero() for d in range(1, 4))
    assert inv.trunc == g.trunc


def test_inverse_geometric_series():
    c = Scalar(2, -1)
    g, _ = _model_metric(1, 9)
    g.data[2, 1, 1] = c
    inv = invert_metric_series(g)
    for k in range(5):
        assert inv.coefficient(2 * k)[1, 1] == (-c) ** k
        if 2 * k + 1 < 9:
            assert inv.coefficient(2 * k + 1)[1, 1] == Scalar(0)
    prod = series_mul("ij,jk->ik", g, inv)
    assert prod == RhoSeries.constant(9, GArray.identity(4))


def test_singular_leading_block():
    with pytest.raises(NotInvertible):
        invert_metric_series(RhoSeries.zeros(3, (2, 2)))


matrix_series = st.integers(min_value=2, max_value=5).flatmap(
    lambda t: st.lists(st.lists(scalars, min_size=4, max_size=4), min_size=t, max_size=t)
)


def _mat_series(rows):
    data = GArray.zeros((len(rows), 2, 2))
    for d, r in enumerate(rows):
        for k, v in enumerate(r):
            data[d, k // 2, k % 2] = v
    return RhoSeries(data)


@settings(max_examples=40, deadline=None)
@given(matrix_series, matrix_series, matrix_series)
def test_series_distributive_and_conjugation(a, b, c):
    A, B, C = _mat_series(a), _mat_series(b), _mat_series(c)
    lhs = series_mul("ij,jk->ik", A + B, C)
    rhs = series_mul("ij,jk->ik", A, C) + series_mul("ij,jk->ik", B, C)
    assert lhs == rhs
    assert series_mul("ij,jk->ik", A, B).conj() == series_mul("ij,jk->ik", A.conj(), B.conj())


@settings(max_examples=40, deadline=None)
@given(matrix_series, matrix_series, st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_euler_apply_linear(a, b, p):
    A, B = _mat_series(a), _mat_series(b)
    assert euler_apply(p, A + B) == euler_apply(p, A) + euler_apply(p, B)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(scalars, min_size=4, max_size=4), min_size=2, max_size=5))
def test_metric_inverse_property(rows):
    g, _ = _model_metric(1, len(rows))
    for d, r in enumerate(rows[1:], start=1):
        block = GArray.zeros((4, 4))
        for k, v in enumerate(r):
            block[1 + k // 2, 1 + k % 2] = v
        g.data[d] = block
    inv = invert_metric_series(g)
    assert series_mul("ij,jk->ik", g, inv) == RhoSeries.constant(g.trunc, GArray.identity(4))


# index kinds and contraction


def test_index_kind_conjugation():
    assert IndexKind.HOL.conj() is IndexKind.ANTI
    assert IndexKind.ANTI.conj() is IndexKind.HOL
    assert IndexKind.REEB.conj() is IndexKind.REEB
    assert IndexKind.INF.conj() is IndexKind.INF


def _levi(ab, h):
    L = GArray.zeros((ab.size, ab.size))
    for a in range(ab.n):
        for b in range(ab.n):
            L[ab.hol(a), ab.anti(b)] = h[a][b]
            L[ab.anti(b), ab.hol(a)] = h[a][b]
    return L


def test_contraction_with_inverse_gives_identity():
    ab = Alphabet(2)
    h = [[Scalar(2), I], [-I, Scalar(1)]]
    hinv = inverse(h)
    # h_{a bbar} as [hol, anti]; h^{bbar c} as [anti, hol]
    H_low = InvariantTensor.from_block(ab, (HOL, ANTI), _levi(ab, h))
    Hi = GArray.zeros((ab.size, ab.size))
    for b in range(2):
        for c in range(2):
            Hi[ab.anti(b), ab.hol(c)] = hinv[b][c]
    H_up = InvariantTensor.from_block(ab, (ANTI, HOL), Hi)
    prod = einsum("ab,bc->ac", H_low.data, H_up.data)
    for a in range(2):
        for c in range(2):
            assert prod[ab.hol(a), ab.hol(c)] == Scalar(1 if a == c else 0)
    from achcr.pseudohermitian import levi_inverse_full

    full = levi_inverse_full(_levi(ab, h), ab)
    assert restrict(full, ab, (ANTI, HOL)) == Hi


def test_contract_rejects_same_type_slots():
    ab = Alphabet(1)
    t = InvariantTensor.zeros(ab, (HOL, HOL))
    pairing = InvariantTensor.from_block(ab, (HOL | ANTI, HOL | ANTI), _levi(ab, [[Scalar(1)]]))
    with pytest.raises(KindMismatch):
        contract(t, 0, 1, pairing)


def test_trace_of_su2_seed():
    from achcr.frame import su2
    from achcr.pseudohermitian import tw_connection
    from achcr.solver import seed_tensors

    P = tw_connection(su2())
    ab = P.alphabet
    Hs, _ = seed_tensors(P)
    phi = GArray.zeros((ab.size, ab.size))
    phi[ab.hol(0), ab.anti(0)] = Hs[0, 0]
    t = InvariantTensor.from_block(ab, (HOL, ANTI), phi)
    pairing = InvariantTensor(ab, (HOL | ANTI, HOL | ANTI), P.Linv)
    assert contract(t, 0, 1, pairing).data[()] == Scalar(-1)


def test_lower_then_raise_roundtrip():
    from achcr.frame import twisted_heisenberg
    from achcr.pseudohermitian import tw_connection

    P = tw_connection(twisted_heisenberg(2, Scalar(1, 2)))
    ab = P.alphabet
    low = InvariantTensor(ab, (HOL | ANTI, HOL | ANTI), P.L)
    up = InvariantTensor(ab, (HOL | ANTI, HOL | ANTI), P.Linv)
    N = InvariantTensor.from_block(ab, (HOL, HOL, ANTI), P.N.data)
    back = raise_lower(raise_lower(N, 2, low), 2, up)
    assert back == N and not N.is_zero()


def test_invariant_tensor_rejects_entries_outside_kinds():
    ab = Alphabet(1)
    d = GArray.zeros((ab.size, ab.size))
    d[ab.hol(0), ab.hol(0)] = 1
    with pytest.raises(KindMismatch):
        InvariantTensor(ab, (HOL, ANTI), d)


def test_conjugate_tensor_swaps_kinds_and_entries():
    ab = Alphabet(2)
    d = GArray.zeros((ab.size, ab.size))
    d[ab.hol(0), ab.anti(1)] = Scalar(1, 2)
    t = InvariantTensor(ab, (HOL, ANTI), d)
    c = t.conjugate()
    assert c.kinds == (ANTI, HOL)
    assert c[ab.anti(0), ab.hol(1)] == Scalar(1, -2)
    assert conj_full(conj_full(d, ab), ab) == d
