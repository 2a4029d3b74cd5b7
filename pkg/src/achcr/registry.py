"""Curated examples with their expected outcomes.

Every expectation carries a provenance tag: ``theory-implied`` (a stated
result applies), ``derived-by-hand`` (a short hand computation) or
``record-only`` (engine output kept as a regression value, never ground
truth).  Record-only values live in the ``golden`` directory.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from .errors import DegenerateDeformation, UnknownExample
from .frame import CRFrameAlgebra, change_frame, deform, heisenberg, rescale, su2, twisted_heisenberg
from .scalar import I, Scalar

__all__ = [
    "Expectation",
    "ExampleCase",
    "registry",
    "get_case",
    "resolve_builtin",
    "random_valid_algebra",
    "golden_path",
    "load_golden",
    "golden_document",
    "write_golden",
    "DEFORMATION_MU",
]

PROVENANCES = ("theory-implied", "derived-by-hand", "record-only")

# constant symmetric mu used for the integrable deformation of heisenberg(2)
DEFORMATION_MU = ((Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 3), Fraction(1, 4)))


@dataclass(frozen=True)
class Expectation:
    """``kind`` is ``zero``, ``exact`` (with ``value``) or ``record-only``."""

    kind: str
    provenance: str
    value: Any = None
    note: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "exact", "record-only"):
            raise ValueError(f"unknown expectation kind {self.kind!r}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


@dataclass(frozen=True)
class ExampleCase:
    name: str
    factory: Callable[[], CRFrameAlgebra]
    expectations: dict[str, Expectation] = field(default_factory=dict)
    scaling_base: str | None = None
    scaling_lambda: Fraction | None = None

    @property
    def algebra(self) -> CRFrameAlgebra:
        return self.factory()


def _flat(name: str) -> Expectation:
    return Expectation("zero", "theory-implied", note=f"{name} is the flat model and exactly Einstein")


def _integrable(note: str) -> Expectation:
    return Expectation("zero", "theory-implied", note=note)


def _record() -> Expectation:
    return Expectation("record-only", "record-only", note="engine-derived; see golden file")


def registry() -> list[ExampleCase]:
    cases = [
        ExampleCase("heisenberg1", lambda: heisenberg(1), {"O": _flat("heisenberg(1)"), "phi": _flat("heisenberg(1)")}),
        ExampleCase("heisenberg2", lambda: heisenberg(2), {"O": _flat("heisenberg(2)"), "phi": _flat("heisenberg(2)")}),
        ExampleCase(
            "su2",
            su2,
            {
                "O": _integrable("integrable structure"),
                "Phi_11bar": Expectation(
                    "exact", "derived-by-hand", Scalar(-1), "R_11bar = 2, R = 2, N = 0, n = 1 in the seed formula"
                ),
            },
        ),
        ExampleCase(
            "heisenberg2_deformed",
            lambda: deform(heisenberg(2), DEFORMATION_MU),
            {"O": _integrable("constant symmetric mu keeps heisenberg integrable")},
        ),
        ExampleCase("twisted_heisenberg2", lambda: twisted_heisenberg(2, 1), {"O": _record()}),
        ExampleCase("twisted_heisenberg2_c1_2", lambda: twisted_heisenberg(2, Fraction(1, 2)), {"O": _record()}),
        ExampleCase("twisted_heisenberg2_ci", lambda: twisted_heisenberg(2, I), {"O": _record()}),
        ExampleCase(
            "su2_lam4",
            lambda: rescale(su2(), 4),
            {"O": _integrable("rescaled integrable structure")},
            scaling_base="su2",
            scaling_lambda=Fraction(4),
        ),
    ]
    for tag, lam in (("4", Fraction(4)), ("9_4", Fraction(9, 4))):
        cases.append(
            ExampleCase(
                f"twisted_heisenberg2_lam{tag}",
                (lambda lam=lam: rescale(twisted_heisenberg(2, 1), lam)),
                {
                    "O": Expectation(
                        "exact",
                        "theory-implied",
                        note=f"lambda^-n times the twisted_heisenberg2 value, lambda = {lam}",
                    )
                },
                scaling_base="twisted_heisenberg2",
                scaling_lambda=lam,
            )
        )
    return cases


def get_case(name: str) -> ExampleCase:
    for case in registry():
        if case.name == name:
            return case
    raise UnknownExample(f"no registry example named {name!r}")


_HEIS = re.compile(r"heisenberg(\d+)$")


def resolve_builtin(ref: str) -> CRFrameAlgebra:
    """Algebra for ``builtin:<name>`` (a registry name or ``heisenberg<n>``)."""
    name = ref[len("builtin:") :] if ref.startswith("builtin:") else ref
    for case in registry():
        if case.name == name:
            return case.algebra
    m = _HEIS.match(name)
    if m:
        return heisenberg(int(m.group(1)))
    raise UnknownExample(f"unknown built-in {name!r}")


# randomized valid algebras


def _rand_q(rng: random.Random, num: int = 3, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def _rand_c(rng: random.Random) -> Scalar:
    return Scalar(_rand_q(rng), _rand_q(rng))


def _n1_family(rng: random.Random) -> CRFrameAlgebra:
    """``[Z,Zb] = -iT, [T,Z] = i r Z + b Zb`` (Jacobi forces the Z-coefficient imaginary)."""
    r = _rand_q(rng)
    b = _rand_c(rng)
    br = [("Z1", "Zb1", "T", -I)]
    if r:
        br.append(("T", "Z1", "Z1", Scalar(0, r)))
    if not b.is_zero():
        br.append(("T", "Z1", "Zb1", b))
    return CRFrameAlgebra.from_brackets(1, br)


def random_valid_algebra(rng: random.Random, n: int) -> CRFrameAlgebra:
    """A base structure moved by a random deformation, frame change and rescaling.

    Every base has ``h = delta``, so a symmetric matrix is a valid ``mu``.
    Deformations keep validity whenever the new Levi form is nondegenerate;
    degenerate draws are retried.
    """
    if n == 1:
        base = rng.choice([heisenberg(1), su2(), _n1_family(rng)])
    elif n == 2:
        base = rng.choice([heisenberg(2), twisted_heisenberg(2, _rand_c(rng))])
    else:
        base = heisenberg(n)
    for _ in range(20):
        m = [[Scalar(0)] * n for _ in range(n)]
        for p in range(n):
            for q in range(p, n):
                v = _rand_c(rng) * Scalar(Fraction(1, 4)) if rng.random() < 0.6 else Scalar(0)
                m[p][q] = v
                m[q][p] = v
        try:
            out = deform(base, m)
            break
        except DegenerateDeformation:
            continue
    else:
        out = base
    q = [[Scalar(1 if p == r else 0) for r in range(n)] for p in range(n)]
    for p in range(n):
        for r in range(n):
            if p != r and rng.random() < 0.5:
                q[p][r] = _rand_c(rng)
    if n == 2:
        d = q[0][0] * q[1][1] - q[0][1] * q[1][0]
        if d.is_zero():
            q[0][1] = Scalar(0)
    out = change_frame(out, q)
    lam = Fraction(rng.randint(1, 5), rng.randint(1, 3))
    return rescale(out, lam)


# golden files


def golden_path(name: str) -> Path:
    return Path(str(resources.files("achcr") / "golden" / f"{name}.json"))


def golden_document(name: str) -> dict[str, Any]:
    """Record-only values for one case, computed fresh."""
    from .solver import run_pipeline

    _, result = run_pipeline(get_case(name).algebra)
    return {
        "case": name,
        "provenance": "record-only: engine-derived regression value, not an external reference",
        "O": result.O.to_json(),
        "E": result.E.to_json(),
        "u": result.u.to_json(),
        "v": result.v.to_json(),
    }


def load_golden(name: str) -> dict[str, Any]:
    return json.loads(golden_path(name).read_text(encoding="utf-8"))


def write_golden(directory: Path | None = None) -> list[Path]:
    out = []
    for case in registry():
        if any(e.kind == "record-only" for e in case.expectations.values()):
            doc = golden_document(case.name)
            path = (directory / f"{case.name}.json") if directory else golden_path(case.name)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
            out.append(path)
    return out


if __name__ == "__main__":  # pragma: no cover
    for p in write_golden():
        print(p)
