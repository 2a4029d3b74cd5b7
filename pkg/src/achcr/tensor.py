"""Index alphabets and invariant tensors.

Two alphabets are used throughout:

* the CR alphabet ``[T, Z1..Zn, Zb1..Zbn]`` (size ``2n+1``), and
* the ACH alphabet ``[inf, T, Z1..Zn, Zb1..Zbn]`` (size ``2n+2``).

Tensors are dense arrays over an alphabet.  A slot's admissible kinds say
which block of the array may be nonzero; everything else is zero.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import KindMismatch
from .garray import GArray, einsum
from .scalar import Scalar

__all__ = [
    "IndexKind",
    "Alphabet",
    "InvariantTensor",
    "contract",
    "raise_lower",
    "conj_full",
    "restrict",
    "ALL_CR",
    "ALL_ACH",
    "HOL",
    "ANTI",
]


class IndexKind(enum.Enum):
    INF = "inf"
    REEB = "0"
    HOL = "hol"
    ANTI = "anti"

    def conj(self) -> "IndexKind":
        if self is IndexKind.HOL:
            return IndexKind.ANTI
        if self is IndexKind.ANTI:
            return IndexKind.HOL
        return self


HOL = frozenset({IndexKind.HOL})
ANTI = frozenset({IndexKind.ANTI})
ALL_CR = frozenset({IndexKind.REEB, IndexKind.HOL, IndexKind.ANTI})
ALL_ACH = ALL_CR | {IndexKind.INF}


@dataclass(frozen=True)
class Alphabet:
    n: int
    transverse: bool = False

    @property
    def offset(self) -> int:
        return 1 if self.transverse else 0

    @property
    def size(self) -> int:
        return 2 * self.n + 1 + self.offset

    @property
    def inf(self) -> int:
        if not self.transverse:
            raise KindMismatch("the CR alphabet has no transverse index")
        return 0

    @property
    def reeb(self) -> int:
        return self.offset

    def hol(self, a: int) -> int:
        """Position of ``Z_{a+1}`` (``a`` is zero based)."""
        return self.offset + 1 + a

    def anti(self, a: int) -> int:
        return self.offset + 1 + self.n + a

    @cached_property
    def hols(self) -> list[int]:
        return [self.hol(a) for a in range(self.n)]

    @cached_property
    def antis(self) -> list[int]:
        return [self.anti(a) for a in range(self.n)]

    def kind(self, pos: int) -> IndexKind:
        if self.transverse and pos == 0:
            return IndexKind.INF
        if pos == self.reeb:
            return IndexKind.REEB
        if pos < self.offset + 1 + self.n:
            return IndexKind.HOL
        return IndexKind.ANTI

    @cached_property
    def conj_perm(self) -> list[int]:
        perm = list(range(self.size))
        for a in range(self.n):
            perm[self.hol(a)] = self.anti(a)
            perm[self.anti(a)] = self.hol(a)
        return perm

    @cached_property
    def labels(self) -> list[str]:
        out = ["inf"] if self.transverse else []
        out.append("T")
        out += [f"Z{a + 1}" for a in range(self.n)]
        out += [f"Zb{a + 1}" for a in range(self.n)]
        return out

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KindMismatch(f"unknown index label {label!r}") from None

    def positions(self, kinds: frozenset[IndexKind]) -> list[int]:
        return [p for p in range(self.size) if self.kind(p) in kinds]

    def mask(self, kinds: frozenset[IndexKind]) -> np.ndarray:
        return np.array([self.kind(p) in kinds for p in range(self.size)], dtype=bool)

    @cached_property
    def weights(self) -> list[int]:
        """Weights entering the ACH frame ``rho d/drho, rho^2 T, rho Z, rho Zb``."""
        return [1 if self.kind(p) is not IndexKind.REEB else 2 for p in range(self.size)]


def conj_full(data: GArray, alphabet: Alphabet, axes: Iterable[int] | None = None) -> GArray:
    """Conjugate entries and indices: ``out[I..] = conj(data[Ibar..])``."""
    axes = range(data.ndim) if axes is None else axes
    return data.take_perm(alphabet.conj_perm, axes).conj()


def restrict(data: GArray, alphabet: Alphabet, kinds: Sequence[frozenset[IndexKind]]) -> GArray:
    """Zero every entry outside the block given by ``kinds`` (one set per axis)."""
    out = data.copy()
    for ax, ks in enumerate(kinds):
        if ks is None:
            continue
        bad = ~alphabet.mask(ks)
        if not bad.any():
            continue
        sl = [slice(None)] * data.ndim
        sl[ax] = bad
        out.re[tuple(sl)] = 0
        out.im[tuple(sl)] = 0
    return out


@dataclass(frozen=True)
class InvariantTensor:
    """A constant tensor over an alphabet with declared slot kinds."""

    alphabet: Alphabet
    kinds: tuple[frozenset[IndexKind], ...]
    data: GArray
    weight: int | None = None

    def __post_init__(self) -> None:
        if self.data.shape != (self.alphabet.size,) * len(self.kinds):
            raise KindMismatch(
                f"data shape {self.data.shape} does not match rank {len(self.kinds)} over size {self.alphabet.size}"
            )
        if restrict(self.data, self.alphabet, self.kinds) != self.data:
            raise KindMismatch("entries present outside the declared index kinds")

    @classmethod
    def zeros(cls, alphabet: Alphabet, kinds: Sequence[frozenset[IndexKind]], weight: int | None = None) -> "InvariantTensor":
        return cls(alphabet, tuple(kinds), GArray.zeros((alphabet.size,) * len(kinds)), weight)

    @classmethod
    def from_block(cls, alphabet: Alphabet, kinds: Sequence[frozenset[IndexKind]], data: GArray) -> "InvariantTensor":
        return cls(alphabet, tuple(kinds), restrict(data, alphabet, kinds))

    @property
    def rank(self) -> int:
        return len(self.kinds)

    def __getitem__(self, key: tuple[int, ...] | int) -> Scalar:
        if isinstance(key, int):
            key = (key,)
        return self.data[tuple(key)]

    def component(self, *labels: str) -> Scalar:
        return self.data[tuple(self.alphabet.index_of(s) for s in labels)]

    @property
    def entries(self) -> dict[tuple[int, ...], Scalar]:
        return dict(self.data.nonzero_entries())

    def conjugate(self) -> "InvariantTensor":
        kinds = tuple(frozenset(k.conj() for k in ks) for ks in self.kinds)
        return InvariantTensor(self.alphabet, kinds, conj_full(self.data, self.alphabet), self.weight)

    def is_zero(self) -> bool:
        return self.data.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InvariantTensor):
            return NotImplemented
        return self.alphabet == other.alphabet and self.data == other.data

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "InvariantTensor") -> "InvariantTensor":
        kinds = tuple(a | b for a, b in zip(self.kinds, other.kinds))
        return InvariantTensor(self.alphabet, kinds, self.data + other.data, self.weight)

    def __sub__(self, other: "InvariantTensor") -> "InvariantTensor":
        kinds = tuple(a | b for a, b in zip(self.kinds, other.kinds))
        return InvariantTensor(self.alphabet, kinds, self.data - other.data, self.weight)

    def scale(self, c: object) -> "InvariantTensor":
        return InvariantTensor(self.alphabet, self.kinds, self.data.scale(c), self.weight)

    def to_json(self) -> dict[str, dict[str, str]]:
        """Every entry of the declared block, keyed by comma-joined labels."""
        out: dict[str, dict[str, str]] = {}
        pos = [self.alphabet.positions(ks) for ks in self.kinds]
        for idx in itertools.product(*pos):
            out[",".join(self.alphabet.labels[i] for i in idx)] = self.data[idx].to_json()
        return out


def contract(t: InvariantTensor, a: int, b: int, pairing: InvariantTensor) -> InvariantTensor:
    """Contract slots ``a`` and ``b`` of ``t`` through a rank-2 pairing.

    ``pairing`` is the Levi form or its inverse.  Its block is
    hol x anti plus anti x hol, so the two slots must carry opposite
    holomorphic types: one ``HOL`` and one ``ANTI``.
    """
    if a == b or not (0 <= a < t.rank and 0 <= b < t.rank):
        raise KindMismatch(f"invalid slots {a}, {b} for rank {t.rank}")
    if pairing.rank != 2:
        raise KindMismatch("pairing must have rank 2")
    ka, kb = t.kinds[a], t.kinds[b]
    ok = (ka == HOL and kb == ANTI) or (ka == ANTI and kb == HOL)
    if not ok:
        raise KindMismatch(f"slot kinds {sorted(k.value for k in ka)} and {sorted(k.value for k in kb)} cannot be paired")
    letters = "abcdefghijklmnopqrstuvw"
    src = list(letters[: t.rank])
    pa, pb = "x", "y"
    src[a], src[b] = pa, pb
    out = [c for i, c in enumerate(src) if i not in (a, b)]
    spec = f"{''.join(src)},{pa}{pb}->{''.join(out)}"
    data = einsum(spec, t.data, pairing.data)
    kinds = tuple(k for i, k in enumerate(t.kinds) if i not in (a, b))
    return InvariantTensor.from_block(t.alphabet, kinds, data)


def raise_lower(t: InvariantTensor, slot: int, pairing: InvariantTensor) -> InvariantTensor:
    """Move one slot through the Levi form or its inverse.

    ``out[.., c, ..] = sum_x t[.., x, ..] * pairing[x, c]``.  The new slot has
    the conjugate holomorphic type, as the pairing only links Z with Zb.
    """
    k = t.kinds[slot]
    if k not in (HOL, ANTI):
        raise KindMismatch("only a purely holomorphic or antiholomorphic slot can be raised or lowered")
    letters = "abcdefghijklmnopqrstuvw"
    src = list(letters[: t.rank])
    dst = list(src)
    src[slot], dst[slot] = "x", "y"
    data = einsum(f"{''.join(src)},xy->{''.join(dst)}", t.data, pairing.data)
    kinds = list(t.kinds)
    kinds[slot] = frozenset(x.conj() for x in k)
    return InvariantTensor.from_block(t.alphabet, kinds, data)
