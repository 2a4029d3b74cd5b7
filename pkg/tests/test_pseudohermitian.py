"""Tanaka-Webster connection, torsion, curvature and their identities."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from achcr.errors import KindMismatch
from achcr.frame import heisenberg, rescale, su2, twisted_heisenberg
from achcr.garray import GArray
from achcr.pseudohermitian import (
    check_identities,
    constant_rescale,
    cov_deriv,
    covariant_derivative,
    structure_equation_rhs,
    tw_connection,
)
from achcr.registry import random_valid_algebra, registry
from achcr.scalar import I, Scalar
from achcr.tensor import ALL_ACH, ALL_CR, InvariantTensor

FIELDS = ("gamma", "torsion", "curv", "L", "Linv")
TENSORS = ("h", "h_inv", "A", "A_up", "N", "N_low", "R_tensor", "W_hol", "W_anti", "V_hol", "V_anti", "ricci")


def _same_data(P, Q):
    for f in FIELDS:
        assert getattr(P, f) == getattr(Q, f), f
    for f in TENSORS:
        assert getattr(P, f).data == getattr(Q, f).data, f
    assert P.R == Q.R


@pytest.mark.parametrize("n", [1, 2, 3])
def test_heisenberg_is_flat(n):
    P = tw_connection(heisenberg(n))
    assert P.gamma.is_zero() and P.A.is_zero() and P.N.is_zero()
    assert P.curv.is_zero() and P.ricci.is_zero() and P.R == Scalar(0)


def test_su2_values():
    P = tw_connection(su2())
    ab = P.alphabet
    t, z, zb = ab.reeb, ab.hol(0), ab.anti(0)
    # omega_1^1 = -2i theta
    assert P.gamma[t, z, z] == Scalar(0, -2)
    assert P.gamma[z, z, z] == Scalar(0) and P.gamma[zb, z, z] == Scalar(0)
    assert P.A.is_zero() and P.N.is_zero()
    assert P.R_tensor[z, zb, z, zb] == Scalar(2)
    assert P.ricci[z, zb] == Scalar(2)
    assert P.R == Scalar(2)


@pytest.mark.parametrize("c", [Scalar(1), Scalar(Fraction(1, 2)), I, Scalar(1, 2)])
def test_twisted_nijenhuis(c):
    P = tw_connection(twisted_heisenberg(2, c))
    assert P.N.component("Z1", "Z2", "Zb1") == c
    assert P.N.component("Z2", "Z1", "Zb1") == -c
    assert P.A.is_zero()


def test_two_connection_routes_agree():
    for case in registry():
        a = case.algebra
        _same_data(tw_connection(a), tw_connection(a, method="closed_form"))


def test_nabla_N_by_two_routes():
    a = twisted_heisenberg(2, Scalar(Fraction(2, 3), -1))
    P1 = tw_connection(a)
    P2 = tw_connection(a, method="closed_form")
    d1 = cov_deriv(P1.gamma, P1.N_low.data, "ddd")
    d2 = cov_deriv(P2.gamma, P2.N_low.data, "ddd")
    assert d1 == d2


def test_structure_equation_reproduced():
    P = tw_connection(twisted_heisenberg(2, 1))
    ab = P.alphabet
    rhs = structure_equation_rhs(P)
    for x in range(ab.size):
        for y in range(ab.size):
            for g in ab.hols:
                assert rhs[x, y, g] == -P.algebra.c[x, y, g]


def test_levi_form_is_parallel():
    for a in (su2(), twisted_heisenberg(2, I)):
        P = tw_connection(a)
        assert covariant_derivative(P, P.h).is_zero()
        assert covariant_derivative(P, P.h_inv, "uu").is_zero()


def test_covariant_derivative_rejects_transverse_slot():
    P = tw_connection(su2())
    from achcr.tensor import Alphabet

    t = InvariantTensor.zeros(Alphabet(1, transverse=True), (ALL_ACH,))
    with pytest.raises(KindMismatch):
        covariant_derivative(P, t)


def test_invariant_scalar_commutator():
    # every derivative of a constant scalar vanishes, so u_{a bbar} - u_{bbar a} = i h u_0 is 0 = 0
    P = tw_connection(su2())
    u = GArray.zeros((P.alphabet.size,))
    d2 = cov_deriv(P.gamma, u, "d")
    assert d2.is_zero()


def test_su2_constant_rescale():
    P = tw_connection(su2())
    Q = constant_rescale(P, 4)
    ab = P.alphabet
    z, zb = ab.hol(0), ab.anti(0)
    assert Q.h[z, zb] == Scalar(4)
    assert Q.A.is_zero()
    assert Q.ricci[z, zb] == Scalar(2)
    assert Q.R == Scalar(Fraction(1, 2))
    _same_data(constant_rescale(P, 1), P)


@pytest.mark.parametrize("lam", [Fraction(4), Fraction(9, 4), Fraction(1, 3)])
@pytest.mark.parametrize("make", [su2, lambda: twisted_heisenberg(2, Scalar(1, 1))])
def test_constant_rescale_matches_recomputation(make, lam):
    a = make()
    _same_data(constant_rescale(tw_connection(a), lam), tw_connection(rescale(a, lam)))


def test_registry_identities():
    for case in registry():
        res = check_identities(tw_connection(case.algebra))
        assert all(res.values()), (case.name, res)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([1, 2]))
def test_identities_on_random_algebras(seed, n):
    a = random_valid_algebra(random.Random(seed), n)
    P = tw_connection(a)
    res = check_identities(P)
    assert all(res.values()), res
    assert P.N.data == tw_connection(a, method="closed_form").N.data


def test_n1_nijenhuis_vanishes_by_antisymmetry():
    for seed in range(10):
        P = tw_connection(random_valid_algebra(random.Random(seed), 1))
        assert P.N.is_zero()


def test_slots_stay_in_cr_alphabet():
    P = tw_connection(su2())
    d = covariant_derivative(P, P.A)
    assert d.kinds[-1] == ALL_CR
