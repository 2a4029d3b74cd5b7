"""Dense arrays of exact Gaussian rationals.

A :class:`GArray` stores the real and imaginary parts as two numpy object
arrays of ``mpq``.  Complex contractions are expanded into real einsums,
skipping any operand part that is identically zero (very common here:
most structure constants are real or purely imaginary).
"""

from __future__ import annotations

import itertools
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from gmpy2 import mpq

from .scalar import Scalar, as_scalar

__all__ = ["GArray", "einsum", "obj_zeros"]

_Q0 = mpq(0)


def obj_zeros(shape: Sequence[int] | int) -> np.ndarray:
    return np.full(shape, _Q0, dtype=object)


def _nonzero(a: np.ndarray) -> bool:
    if a.size == 0:
        return False
    return bool(np.any(a != 0))


class GArray:
    """Exact complex array."""

    __slots__ = ("re", "im")

    def __init__(self, re: np.ndarray, im: np.ndarray | None = None) -> None:
        if im is None:
            im = obj_zeros(re.shape)
        if re.shape != im.shape:
            raise ValueError("real and imaginary shapes differ")
        self.re = re
        self.im = im

    @classmethod
    def zeros(cls, shape: Sequence[int] | int) -> "GArray":
        return cls(obj_zeros(shape), obj_zeros(shape))

    @classmethod
    def from_function(cls, shape: Sequence[int], fn: Callable[..., Any]) -> "GArray":
        out = cls.zeros(shape)
        for idx in itertools.product(*(range(s) for s in shape)):
            out[idx] = fn(*idx)
        return out

    @classmethod
    def from_nested(cls, data: Any) -> "GArray":
        arr = np.array(data, dtype=object)
        out = cls.zeros(arr.shape)
        for idx in itertools.product(*(range(s) for s in arr.shape)):
            out[idx] = arr[idx]
        return out

    @classmethod
    def identity(cls, n: int) -> "GArray":
        out = cls.zeros((n, n))
        for i in range(n):
            out.re[i, i] = mpq(1)
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.re.shape

    @property
    def ndim(self) -> int:
        return self.re.ndim

    def copy(self) -> "GArray":
        return GArray(self.re.copy(), self.im.copy())

    # element access

    def __getitem__(self, key: Any) -> Any:
        r = self.re[key]
        if isinstance(r, np.ndarray):
            return GArray(r, self.im[key])
        return Scalar._raw(mpq(r), mpq(self.im[key]))

    def __setitem__(self, key: Any, value: Any) -> None:
        if isinstance(value, GArray):
            if value.ndim == 0:
                # unwrap so a 0-d array never ends up stored as an element
                self.re[key] = mpq(value.re[()])
                self.im[key] = mpq(value.im[()])
            else:
                self.re[key] = value.re
                self.im[key] = value.im
            return
        s = as_scalar(value)
        self.re[key] = s.re
        self.im[key] = s.im

    def add_at(self, key: Any, value: Any) -> None:
        s = as_scalar(value)
        self.re[key] = self.re[key] + s.re
        self.im[key] = self.im[key] + s.im

    # arithmetic

    def __add__(self, other: "GArray") -> "GArray":
        return GArray(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GArray") -> "GArray":
        return GArray(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GArray":
        return GArray(-self.re, -self.im)

    def scale(self, c: Any) -> "GArray":
        s = as_scalar(c)
        if s.im == 0:
            if s.re == 1:
                return self.copy()
            return GArray(self.re * s.re, self.im * s.re)
        return GArray(self.re * s.re - self.im * s.im, self.re * s.im + self.im * s.re)

    def __mul__(self, other: Any) -> "GArray":
        if isinstance(other, GArray):
            return GArray(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, np.ndarray):
            return GArray(self.re * other, self.im * other)
        return self.scale(other)

    __rmul__ = __mul__

    def conj(self) -> "GArray":
        return GArray(self.re.copy(), -self.im)

    def real_part(self) -> "GArray":
        return GArray(self.re.copy(), obj_zeros(self.shape))

    def transpose(self, *axes: int) -> "GArray":
        return GArray(self.re.transpose(*axes), self.im.transpose(*axes))

    def take_perm(self, perm: Sequence[int], axes: Iterable[int]) -> "GArray":
        """Reindex the listed axes through ``perm`` (``out[..i..] = self[..perm[i]..]``)."""
        re, im = self.re, self.im
        p = np.asarray(perm, dtype=np.intp)
        for ax in axes:
            re = np.take(re, p, axis=ax)
            im = np.take(im, p, axis=ax)
        return GArray(re, im)

    # predicates

    def is_zero(self) -> bool:
        return not (_nonzero(self.re) or _nonzero(self.im))

    def is_real(self) -> bool:
        return not _nonzero(self.im)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GArray):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return bool(np.all(self.re == other.re)) and bool(np.all(self.im == other.im))

    __hash__ = None  # type: ignore[assignment]

    def nonzero_entries(self) -> list[tuple[tuple[int, ...], Scalar]]:
        mask = (self.re != 0) | (self.im != 0)
        out = []
        for idx in zip(*np.nonzero(mask)):
            key = tuple(int(i) for i in idx)
            out.append((key, self[key]))
        return out

    def __repr__(self) -> str:
        return f"GArray(shape={self.shape}, nonzero={len(self.nonzero_entries())})"


def einsum(spec: str, *ops: GArray) -> GArray:
    """Exact complex ``numpy.einsum``."""
    parts = []
    for op in ops:
        ps = []
        if _nonzero(op.re):
            ps.append((0, op.re))
        if _nonzero(op.im):
            ps.append((1, op.im))
        parts.append(ps)
    out_shape = _einsum_shape(spec, ops)
    re = None
    im = None
    for combo in itertools.product(*parts):
        k = sum(c[0] for c in combo)
        term = np.einsum(spec, *(c[1] for c in combo), dtype=object, optimize=False)
        # multiply by i^k
        sign = -1 if k % 4 >= 2 else 1
        if sign < 0:
            term = -term
        if k % 2 == 0:
            re = term if re is None else re + term
        else:
            im = term if im is None else im + term
    if re is None:
        re = obj_zeros(out_shape)
    if im is None:
        im = obj_zeros(out_shape)
    re = _as_obj(re, out_shape)
    im = _as_obj(im, out_shape)
    return GArray(re, im)


def _as_obj(x: Any, shape: tuple[int, ...]) -> np.ndarray:
    if isinstance(x, np.ndarray):
        if x.shape == ():
            arr = np.empty((), dtype=object)
            arr[()] = mpq(x[()])
            return arr
        return x
    arr = np.empty((), dtype=object)
    arr[()] = mpq(x)
    return arr


def _einsum_shape(spec: str, ops: Sequence[GArray]) -> tuple[int, ...]:
    lhs, rhs = spec.replace(" ", "").split("->")
    sizes: dict[str, int] = {}
    for term, op in zip(lhs.split(","), ops):
        if len(term) != op.ndim:
            raise ValueError(f"einsum term {term!r} does not match rank {op.ndim}")
        for ch, s in zip(term, op.shape):
            sizes[ch] = s
    return tuple(sizes[ch] for ch in rhs)
