"""Input documents and machine-readable reports.

Both directions use JSON with exact rationals written as canonical
``"p/q"`` strings.  Reports are dumped with sorted keys so that the same
input always produces the same bytes.
"""

from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Any, Iterable

from .ach import ACHGeometry, EinsteinComputation, assemble, christoffel
from .checks import CheckReport
from .errors import KindMismatch, ParseError, SolverError, ValidationError
from .frame import CRFrameAlgebra, validate
from .pseudohermitian import PseudohermitianData, tw_connection
from .registry import resolve_builtin
from .scalar import Scalar
from .solver import (
    ObstructionResult,
    divergence_identity,
    order_forms,
    scaling_law,
    second_obstruction_check,
    seed_tensors,
    solve,
)
from .table1 import table1_reference
from .tensor import ANTI, HOL, InvariantTensor

__all__ = [
    "ALL_CHECKS",
    "parse_document",
    "load_input",
    "phi_table",
    "pseudohermitian_table",
    "solve_report",
    "verify_report",
    "dumps",
]

ALL_CHECKS = ("bianchi", "divergence", "scaling", "table1", "second-obstruction")


# input


def parse_document(doc: Any) -> tuple[CRFrameAlgebra, dict[str, Any]]:
    """Algebra and options from a decoded AlgebraDocument."""
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    unknown = set(doc) - {"n", "brackets", "options"}
    if unknown:
        raise ParseError(f"unknown top-level keys {sorted(unknown)}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("'n' must be an integer")
    raw = doc.get("brackets")
    if not isinstance(raw, list):
        raise ParseError("'brackets' must be a list")
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise ParseError("'options' must be an object")
    brackets = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, dict) or set(entry) != {"x", "y", "z", "c"}:
            raise ParseError(f"bracket {k} must have exactly the keys x, y, z, c")
        labels = [entry[key] for key in ("x", "y", "z")]
        if not all(isinstance(s, str) for s in labels):
            raise ParseError(f"bracket {k} labels must be strings")
        brackets.append((*labels, Scalar.from_json(entry["c"])))
    complete = options.get("autocomplete", True)
    if not isinstance(complete, bool):
        raise ParseError("'options.autocomplete' must be a boolean")
    try:
        algebra = CRFrameAlgebra.from_brackets(n, brackets, complete_conjugates=complete)
    except KindMismatch as exc:
        raise ParseError(str(exc)) from exc
    return algebra, options


def load_input(ref: str) -> tuple[CRFrameAlgebra, dict[str, Any]]:
    """``builtin:<name>`` or a path to an AlgebraDocument."""
    if ref.startswith("builtin:"):
        return resolve_builtin(ref), {}
    try:
        text = Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {ref}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{ref} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    return parse_document(doc)


# tables


def _entries(arr: Any, labels: list[str]) -> dict[str, Any]:
    return {",".join(labels[i] for i in idx): val.to_json() for idx, val in arr.nonzero_entries()}


def phi_table(result: ObstructionResult, P: PseudohermitianData) -> dict[str, Any]:
    """Nonzero coefficients of ``phi`` by degree."""
    labels = P.alphabet.labels
    data = result.phi.series.data
    out = {}
    for d in range(result.phi.trunc):
        e = _entries(data[d], labels)
        if e:
            out[str(d)] = e
    return out


def pseudohermitian_table(P: PseudohermitianData) -> dict[str, Any]:
    ab = P.alphabet
    ricci = InvariantTensor.from_block(ab, (HOL, ANTI), P.ricci.data)
    return {
        "h": P.h.to_json(),
        "A": _entries(P.A.data, ab.labels),
        "N": _entries(P.N.data, ab.labels),
        "Ricci": ricci.to_json(),
        "R": P.R.to_json(),
    }


# reports


def _base(algebra: CRFrameAlgebra) -> tuple[dict[str, Any], Any]:
    rep = validate(algebra)
    return {"input": algebra.to_document(), "validation": rep.to_json()}, rep


def solve_report(algebra: CRFrameAlgebra, trunc: int | None = None, timing: bool = False) -> dict[str, Any]:
    """Full pipeline report; raises on invalid input or solver failure."""
    start = time.perf_counter()
    report, rep = _base(algebra)
    rep.raise_if_failed()
    P = tw_connection(algebra)
    _, result = solve(P, trunc=trunc)
    H, S = seed_tensors(P)
    report.update(
        {
            "n": algebra.n,
            "truncation": result.phi.trunc,
            "pseudohermitian": pseudohermitian_table(P),
            "seed": {
                "Phi_hermitian": _entries(H, [f"{a + 1}" for a in range(algebra.n)]),
                "Phi_holomorphic": _entries(S, [f"{a + 1}" for a in range(algebra.n)]),
            },
            "phi": phi_table(result, P),
            "O": result.O.to_json(),
            "E": result.E.to_json(),
            "u": result.u.to_json(),
            "v": result.v.to_json(),
            "checks": {k: bool(v) for k, v in sorted(result.residuals.items())},
            "substeps": len(result.steps),
        }
    )
    if timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    return report


def _run_check(name: str, fn: Any) -> CheckReport:
    try:
        return fn()
    except SolverError as exc:
        return CheckReport(name, False, [f"{type(exc).__name__}: {exc}"])


def verify_report(
    algebra: CRFrameAlgebra,
    checks: Iterable[str] = ALL_CHECKS,
    lam: Any = 4,
    trunc: int | None = None,
    timing: bool = False,
) -> dict[str, Any]:
    start = time.perf_counter()
    checks = list(checks)
    bad = [c for c in checks if c not in ALL_CHECKS]
    if bad:
        raise ValidationError(f"unknown checks {bad}; choose from {', '.join(ALL_CHECKS)}")
    report, rep = _base(algebra)
    rep.raise_if_failed()
    P = tw_connection(algebra)
    results: dict[str, CheckReport] = {}
    _, result = solve(P, trunc=trunc)
    if "bianchi" in checks:
        results["bianchi"] = _run_check("bianchi", lambda: _bianchi_check(P, result))
    if "divergence" in checks:
        results["divergence"] = divergence_identity(result, P)
    if "second-obstruction" in checks:
        results["second-obstruction"] = second_obstruction_check(result, P)
    if "table1" in checks:
        results["table1"] = _table1_check(P, result)
    if "scaling" in checks:
        results["scaling"] = _run_check("scaling", lambda: scaling_law(algebra, lam, trunc))
    report["n"] = algebra.n
    report["checks"] = {k: v.to_json() for k, v in sorted(results.items())}
    report["ok"] = all(v.ok for v in results.values())
    if timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    return report


def _bianchi_check(P: PseudohermitianData, result: ObstructionResult) -> CheckReport:
    """Every sub-step already asserted the identity; recheck the final metric and the order forms."""
    geo = ACHGeometry(P, result.phi.trunc)
    ec = EinsteinComputation(geo, assemble(P, result.phi))
    wit = [f"degree {idx[0]}, slot {idx[1]}: {v}" for idx, v in ec.bianchi.data.nonzero_entries()]
    _, S = seed_tensors(P)
    m = 2 * P.n + 2
    for name, f, k in zip(("first", "second", "third"), order_forms(ec, P, S), (m + 3, m + 3, m + 2)):
        if not f.is_O(min(k, f.trunc)):
            wit.append(f"{name} order form not O(rho^{k})")
    return CheckReport("bianchi", not wit, wit, {"substeps_checked": len(result.steps)})


def _table1_check(P: PseudohermitianData, result: ObstructionResult) -> CheckReport:
    geo = ACHGeometry(P, result.phi.trunc)
    D_low, _ = christoffel(geo, assemble(P, result.phi))
    ref = table1_reference(P, result.phi)
    return CheckReport.compare("table1", D_low.data, ref.data)


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
