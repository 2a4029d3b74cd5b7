"""Left-invariant CR structures given by structure constants.

The frame is ``{T, Z_1..Z_n, Zb_1..Zb_n}`` with ``[e_x, e_y] = c[x, y, z] e_z``.
``T`` is assumed to be the Reeb field of the invariant contact form dual
to it; ``validate`` checks every axiom that this requires.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import (
    AsymmetricMu,
    BadParameter,
    DegenerateDeformation,
    DegenerateLeviForm,
    NotInvertible,
    ValidationError,
)
from .garray import GArray, einsum
from .linalg import det, garray_inverse
from .scalar import I, ZERO, Scalar, as_mpq, as_scalar
from .tensor import ANTI, HOL, Alphabet, InvariantTensor, conj_full

__all__ = [
    "CRFrameAlgebra",
    "ValidationReport",
    "validate",
    "levi_form",
    "levi_matrix",
    "deform",
    "change_frame",
    "rescale",
    "heisenberg",
    "su2",
    "twisted_heisenberg",
    "twisted_heisenberg_literal",
    "builtin",
]


@dataclass(frozen=True)
class CRFrameAlgebra:
    n: int
    c: GArray
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise BadParameter("CR dimension n must be at least 1")
        size = 2 * self.n + 1
        if self.c.shape != (size, size, size):
            raise ValidationError(f"structure constants must have shape {(size,) * 3}")

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.n)

    @classmethod
    def from_brackets(
        cls, n: int, brackets: Iterable[tuple[str, str, str, Any]], complete_conjugates: bool = True
    ) -> "CRFrameAlgebra":
        """Build from ``(x, y, z, c)`` entries, completing antisymmetry and conjugates.

        Any entry that disagrees with one implied by another raises
        :class:`ValidationError`.  With ``complete_conjugates=False`` missing
        conjugate constants stay zero, so ``validate`` reports them.
        """
        if n < 1:
            raise BadParameter("CR dimension n must be at least 1")
        ab = Alphabet(n)
        given: dict[tuple[int, int, int], Scalar] = {}
        notes: list[str] = []

        def put(key: tuple[int, int, int], val: Scalar, origin: str) -> None:
            old = given.get(key)
            if old is not None and old != val:
                x, y, z = (ab.labels[k] for k in key)
                raise ValidationError(f"conflicting constants for [{x},{y}]^{z}: {old} vs {val} ({origin})")
            given[key] = val

        explicit: set[tuple[int, int, int]] = set()
        for x, y, z, val in brackets:
            key = (ab.index_of(x), ab.index_of(y), ab.index_of(z))
            if key[0] == key[1] and not as_scalar(val).is_zero():
                raise ValidationError(f"[{x},{x}] must vanish")
            put(key, as_scalar(val), "input")
            explicit.add(key)
        for (x, y, z), val in list(given.items()):
            put((y, x, z), -val, "antisymmetry")
        added = 0
        perm = ab.conj_perm
        for (x, y, z), val in list(given.items()) if complete_conjugates else []:
            ckey = (perm[x], perm[y], perm[z])
            if ckey not in given:
                added += 1
            put(ckey, val.conjugate(), "conjugation")
        if added:
            notes.append(f"auto-completed {added} conjugate structure constants")
        c = GArray.zeros((ab.size,) * 3)
        for key, val in given.items():
            c[key] = val
        return cls(n, c, tuple(notes))

    def brackets(self) -> list[tuple[str, str, str, Scalar]]:
        """Nonzero constants with ``x < y`` in alphabet order."""
        labels = self.alphabet.labels
        out = []
        for (x, y, z), val in self.c.nonzero_entries():
            if x < y:
                out.append((labels[x], labels[y], labels[z], val))
        return out

    def to_document(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "brackets": [{"x": x, "y": y, "z": z, "c": v.to_json()} for x, y, z, v in self.brackets()],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CRFrameAlgebra):
            return NotImplemented
        return self.n == other.n and self.c == other.c

    __hash__ = None  # type: ignore[assignment]


@dataclass
class ValidationReport:
    checks: dict[str, bool]
    witnesses: dict[str, list[str]]
    notes: list[str]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "checks": dict(sorted(self.checks.items())),
            "witnesses": {k: v for k, v in sorted(self.witnesses.items()) if v},
            "notes": list(self.notes),
        }

    def raise_if_failed(self) -> None:
        if not self.ok:
            bad = [k for k, v in self.checks.items() if not v]
            detail = "; ".join(f"{k}: {', '.join(self.witnesses.get(k, [])[:3])}" for k in bad)
            raise ValidationError(f"invalid CR frame algebra ({detail})")


def _jacobi(c: GArray) -> GArray:
    """``J[x,y,z,w]`` = w-component of the cyclic Jacobi sum."""
    t1 = einsum("xyu,uzw->xyzw", c, c)
    return t1 + t1.transpose(1, 2, 0, 3) + t1.transpose(2, 0, 1, 3)


def validate(a: CRFrameAlgebra) -> ValidationReport:
    ab = a.alphabet
    lab = ab.labels
    c = a.c
    wit: dict[str, list[str]] = {k: [] for k in ("antisymmetry", "reality", "jacobi", "partial_integrability", "adapted", "nondegenerate")}
    for (x, y, z), val in (c + c.transpose(1, 0, 2)).nonzero_entries():
        if x <= y:
            wit["antisymmetry"].append(f"[{lab[x]},{lab[y]}]^{lab[z]}")
    for (x, y, z), val in (c - conj_full(c, ab)).nonzero_entries():
        wit["reality"].append(f"[{lab[x]},{lab[y]}]^{lab[z]}")
    jac = _jacobi(c)
    seen = set()
    for (x, y, z, w), val in jac.nonzero_entries():
        trip = tuple(sorted((x, y, z)))
        if trip not in seen:
            seen.add(trip)
            wit["jacobi"].append(f"({lab[trip[0]]},{lab[trip[1]]},{lab[trip[2]]}) -> {val} {lab[w]}")
    t = ab.reeb
    for p, q in itertools.product(ab.hols, ab.hols):
        if p < q and not c[p, q, t].is_zero():
            wit["partial_integrability"].append(f"[{lab[p]},{lab[q]}]^T = {c[p, q, t]}")
    for p in ab.hols + ab.antis:
        if not c[t, p, t].is_zero():
            wit["adapted"].append(f"[T,{lab[p]}]^T = {c[t, p, t]}")
    try:
        hm = levi_matrix(a)
        if det(hm).is_zero():
            wit["nondegenerate"].append("det h = 0")
    except Exception as exc:  # pragma: no cover - defensive
        wit["nondegenerate"].append(str(exc))
    checks = {k: not v for k, v in wit.items()}
    return ValidationReport(checks, wit, list(a.notes))


def levi_matrix(a: CRFrameAlgebra) -> list[list[Scalar]]:
    """``h[alpha][beta] = h_{alpha betabar} = i c[Z_alpha, Zb_beta]^T``."""
    ab = a.alphabet
    return [[I * a.c[ab.hol(p), ab.anti(q), ab.reeb] for q in range(a.n)] for p in range(a.n)]


def levi_full(a: CRFrameAlgebra) -> GArray:
    """The Levi form as a symmetric array over the CR alphabet.

    ``L[Z_a, Zb_b] = L[Zb_b, Z_a] = h_{a bbar}``; every other entry is zero.
    """
    ab = a.alphabet
    hm = levi_matrix(a)
    out = GArray.zeros((ab.size, ab.size))
    for p in range(a.n):
        for q in range(a.n):
            out[ab.hol(p), ab.anti(q)] = hm[p][q]
            out[ab.anti(q), ab.hol(p)] = hm[p][q]
    return out


def levi_form(a: CRFrameAlgebra) -> InvariantTensor:
    hm = levi_matrix(a)
    if det(hm).is_zero():
        raise DegenerateLeviForm("Levi form is degenerate")
    ab = a.alphabet
    return InvariantTensor(ab, (HOL | ANTI, HOL | ANTI), levi_full(a))


def _change_basis(a: CRFrameAlgebra, p: GArray, notes: Sequence[str] = ()) -> CRFrameAlgebra:
    """Structure constants in the basis ``e'_x = sum_y p[x, y] e_y``."""
    try:
        pinv = garray_inverse(p)
    except NotInvertible as exc:
        raise DegenerateDeformation("frame change is singular") from exc
    c2 = einsum("xa,yb,abd,dz->xyz", p, p, a.c, pinv)
    return CRFrameAlgebra(a.n, c2, tuple(notes))


def _mu_matrix(a: CRFrameAlgebra, mu: Any) -> list[list[Scalar]]:
    n = a.n
    if isinstance(mu, InvariantTensor):
        ab = a.alphabet
        return [[mu.data[ab.hol(p), ab.anti(q)] for q in range(n)] for p in range(n)]
    rows = [[as_scalar(x) for x in row] for row in mu]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise BadParameter(f"mu must be {n}x{n}")
    return rows


def deform(a: CRFrameAlgebra, mu: Any) -> CRFrameAlgebra:
    """Deformed frame ``Zhat_a = Z_a + mu_a^{bbar} Zb_b`` (``T`` unchanged).

    ``mu`` is an ``n x n`` matrix ``mu[a][b] = mu_a^{bbar}`` or an
    InvariantTensor with a hol x anti block.
    """
    ab = a.alphabet
    n = a.n
    m = _mu_matrix(a, mu)
    h = levi_matrix(a)
    low = [[sum((m[p][g] * h[q][g] for g in range(n)), ZERO) for q in range(n)] for p in range(n)]
    for p in range(n):
        for q in range(p + 1, n):
            if low[p][q] != low[q][p]:
                raise AsymmetricMu(f"mu_{{{p + 1}{q + 1}}} != mu_{{{q + 1}{p + 1}}}")
    pm = GArray.identity(ab.size)
    for p in range(n):
        for q in range(n):
            pm[ab.hol(p), ab.anti(q)] = m[p][q]
            pm[ab.anti(p), ab.hol(q)] = m[p][q].conjugate()
    out = _change_basis(a, pm)
    if det(levi_matrix(out)).is_zero():
        raise DegenerateDeformation("deformed Levi form is degenerate")
    rep = validate(out)
    if not rep.ok:
        raise DegenerateDeformation(f"deformed algebra fails validation: {rep.to_json()['witnesses']}")
    return out


def change_frame(a: CRFrameAlgebra, q: Sequence[Sequence[Any]]) -> CRFrameAlgebra:
    """New holomorphic frame ``Z'_a = q[a][b] Z_b``; ``T`` unchanged."""
    ab = a.alphabet
    pm = GArray.identity(ab.size)
    for p in range(a.n):
        for r in range(a.n):
            v = as_scalar(q[p][r])
            pm[ab.hol(p), ab.hol(r)] = v
            pm[ab.anti(p), ab.anti(r)] = v.conjugate()
    return _change_basis(a, pm)


def rescale(a: CRFrameAlgebra, lam: Any) -> CRFrameAlgebra:
    """Replace ``T`` by ``T / lam`` (the contact form becomes ``lam * theta``)."""
    lam_q = as_mpq(lam)
    if lam_q <= 0:
        raise BadParameter("rescaling factor must be a positive rational")
    pm = GArray.identity(2 * a.n + 1)
    pm[0, 0] = Scalar(1 / lam_q)
    return _change_basis(a, pm)


# built-in examples


def heisenberg(n: int) -> CRFrameAlgebra:
    if n < 1:
        raise BadParameter("heisenberg needs n >= 1")
    return CRFrameAlgebra.from_brackets(n, [(f"Z{k}", f"Zb{k}", "T", -I) for k in range(1, n + 1)])


def su2() -> CRFrameAlgebra:
    return CRFrameAlgebra.from_brackets(1, [("Z1", "Zb1", "T", -I), ("T", "Z1", "Z1", Scalar(0, -2))])


def twisted_heisenberg(n: int = 2, c: Any = 1) -> CRFrameAlgebra:
    """Heisenberg with a non-integrable twist of Nijenhuis value ``c``.

    Adding only ``[Z1, Z2] = c Zb1`` breaks the Jacobi identity on
    ``(Z1, Z2, Zb2)``.  The extra terms below restore it while keeping
    ``T`` central, the Levi form standard and the Zb1-component of
    ``[Z1, Z2]`` equal to ``c``.
    """
    if n < 2:
        raise BadParameter("twisted_heisenberg needs n >= 2")
    c = as_scalar(c)
    br = [(f"Z{k}", f"Zb{k}", "T", -I) for k in range(1, n + 1)]
    br += [
        ("Z1", "Z2", "Zb1", c),
        ("Z1", "Z2", "Z1", -c),
        ("Z1", "Zb2", "Z1", c.conjugate()),
        ("Z1", "Zb2", "Zb1", -c.conjugate()),
    ]
    return CRFrameAlgebra.from_brackets(n, [b for b in br if not b[3].is_zero()])


def twisted_heisenberg_literal(n: int = 2, c: Any = 1) -> CRFrameAlgebra:
    """Heisenberg plus ``[Z1, Z2] = c Zb1`` alone (fails Jacobi for ``c != 0``)."""
    if n < 2:
        raise BadParameter("twisted_heisenberg needs n >= 2")
    c = as_scalar(c)
    br = [(f"Z{k}", f"Zb{k}", "T", -I) for k in range(1, n + 1)]
    if not c.is_zero():
        br.append(("Z1", "Z2", "Zb1", c))
    return CRFrameAlgebra.from_brackets(n, br)


def builtin(name: str, **params: Any) -> CRFrameAlgebra:
    """Construct a built-in algebra by name."""
    if name == "heisenberg":
        return heisenberg(int(params.get("n", 1)))
    if name == "su2":
        if params:
            raise BadParameter("su2 takes no parameters")
        return su2()
    if name == "twisted_heisenberg":
        return twisted_heisenberg(int(params.get("n", 2)), params.get("c", 1))
    if name == "twisted_heisenberg_literal":
        return twisted_heisenberg_literal(int(params.get("n", 2)), params.get("c", 1))
    if name == "rescale":
        base = params.get("base")
        if not isinstance(base, CRFrameAlgebra):
            raise BadParameter("rescale needs a base algebra")
        return rescale(base, params.get("lam", 1))
    raise BadParameter(f"unknown built-in {name!r}")
