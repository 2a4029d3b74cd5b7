"""Example registry, built-in names and golden files."""

from __future__ import annotations

import random

import pytest

from achcr.errors import UnknownExample
from achcr.frame import heisenberg, validate
from achcr.registry import (
    PROVENANCES,
    Expectation,
    get_case,
    golden_document,
    load_golden,
    random_valid_algebra,
    registry,
    resolve_builtin,
)
from achcr.scalar import Scalar

from conftest import pipeline


def test_registry_contents():
    names = {c.name for c in registry()}
    for required in ("heisenberg1", "heisenberg2", "su2", "heisenberg2_deformed", "twisted_heisenberg2"):
        assert required in names
    assert any(c.scaling_base for c in registry())


def test_every_expectation_has_provenance():
    for case in registry():
        assert case.expectations
        for e in case.expectations.values():
            assert e.provenance in PROVENANCES
    with pytest.raises(ValueError):
        Expectation("zero", "folklore")
    with pytest.raises(ValueError):
        Expectation("maybe", "record-only")


def test_every_case_is_valid():
    for case in registry():
        assert validate(case.algebra).ok, case.name


def test_expectations_hold():
    for case in registry():
        P, res = pipeline(case.name)
        exp = case.expectations.get("O")
        if exp.kind == "zero":
            assert res.O.is_zero(), case.name
        elif exp.kind == "record-only":
            assert load_golden(case.name)["O"] == res.O.to_json()
        elif case.scaling_base:
            _, base = pipeline(case.scaling_base)
            lam = Scalar(case.scaling_lambda)
            assert res.O.data == base.O.data.scale(Scalar(1) / lam ** P.n)
        if "phi" in case.expectations:
            assert res.phi.series.is_zero()
        if "Phi_11bar" in case.expectations:
            from achcr.solver import seed_tensors

            assert seed_tensors(P)[0][0, 0] == case.expectations["Phi_11bar"].value


def test_golden_files_are_labelled_record_only():
    for case in registry():
        if any(e.kind == "record-only" for e in case.expectations.values()):
            doc = load_golden(case.name)
            assert doc["provenance"].startswith("record-only")
            assert doc == golden_document(case.name)


def test_builtin_resolution():
    assert resolve_builtin("builtin:heisenberg3") == heisenberg(3)
    assert resolve_builtin("builtin:su2") == get_case("su2").algebra
    with pytest.raises(UnknownExample):
        resolve_builtin("builtin:sphere")
    with pytest.raises(UnknownExample):
        get_case("nope")


def test_random_algebras_are_valid_and_reproducible():
    for seed in range(10):
        for n in (1, 2):
            a = random_valid_algebra(random.Random(seed), n)
            assert validate(a).ok
            assert a == random_valid_algebra(random.Random(seed), n)
