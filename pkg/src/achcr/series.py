"""Truncated power series in the boundary defining function rho.

A :class:`RhoSeries` is a GArray with a leading degree axis of length
``trunc``: ``data[d]`` is the coefficient of ``rho**d``, and everything at
degree ``>= trunc`` is unknown.
"""

from __future__ import annotations

from typing import Any, Callable, Sequence

import numpy as np

from .errors import NotInvertible, TruncationMismatch
from .garray import GArray, einsum, obj_zeros
from .linalg import garray_inverse
from .scalar import Scalar, as_scalar

__all__ = ["RhoSeries", "series_mul", "invert_metric_series", "euler_apply"]


class RhoSeries:
    """Exact truncated series with tensor coefficients."""

    __slots__ = ("data",)

    def __init__(self, data: GArray) -> None:
        if data.ndim < 1:
            raise ValueError("a series needs a degree axis")
        self.data = data

    @classmethod
    def zeros(cls, trunc: int, shape: Sequence[int] = ()) -> "RhoSeries":
        return cls(GArray.zeros((trunc, *shape)))

    @classmethod
    def constant(cls, trunc: int, value: GArray | Any) -> "RhoSeries":
        if not isinstance(value, GArray):
            v = GArray.zeros(())
            v[()] = as_scalar(value)
            value = v
        out = cls.zeros(trunc, value.shape)
        if trunc > 0:
            out.data[0] = value
        return out

    @classmethod
    def from_coeffs(cls, trunc: int, coeffs: dict[int, Any], shape: Sequence[int] = ()) -> "RhoSeries":
        out = cls.zeros(trunc, shape)
        for d, c in coeffs.items():
            if d < 0:
                raise ValueError("negative degree")
            if d < trunc:
                out.data[d] = c
        return out

    @property
    def trunc(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape[1:]

    def coefficient(self, d: int) -> GArray | Scalar:
        if not 0 <= d < self.trunc:
            raise TruncationMismatch(f"degree {d} is outside the known range [0, {self.trunc})")
        return self.data[d]

    @property
    def coeffs(self) -> dict[int, GArray | Scalar]:
        """Nonzero coefficients by degree."""
        return {d: self.data[d] for d in range(self.trunc) if not _slice_zero(self.data, d)}

    def __getitem__(self, key: Any) -> "RhoSeries":
        """Index the tensor slots, keeping the degree axis."""
        if not isinstance(key, tuple):
            key = (key,)
        return RhoSeries(self.data[(slice(None), *key)])

    def copy(self) -> "RhoSeries":
        return RhoSeries(self.data.copy())

    def truncate(self, t: int) -> "RhoSeries":
        if t > self.trunc:
            raise TruncationMismatch(f"cannot extend truncation {self.trunc} to {t}")
        return RhoSeries(self.data[:t])

    # arithmetic

    def __add__(self, other: "RhoSeries") -> "RhoSeries":
        t = min(self.trunc, other.trunc)
        _check_shapes(self, other)
        return RhoSeries(self.data[:t] + other.data[:t])

    def __sub__(self, other: "RhoSeries") -> "RhoSeries":
        t = min(self.trunc, other.trunc)
        _check_shapes(self, other)
        return RhoSeries(self.data[:t] - other.data[:t])

    def __neg__(self) -> "RhoSeries":
        return RhoSeries(-self.data)

    def scale(self, c: Any) -> "RhoSeries":
        return RhoSeries(self.data.scale(c))

    def shift(self, k: int) -> "RhoSeries":
        """Multiply by ``rho**k`` (``k >= 0``); the truncation is kept."""
        if k < 0:
            raise ValueError("only nonnegative shifts are supported")
        out = GArray.zeros(self.data.shape)
        if k < self.trunc:
            out[k:] = self.data[: self.trunc - k]
        return RhoSeries(out)

    def conj(self) -> "RhoSeries":
        return RhoSeries(self.data.conj())

    def reindex(self, spec: str) -> "RhoSeries":
        """Single-operand einsum on the tensor slots (trace or transpose)."""
        lhs, rhs = spec.split("->")
        return RhoSeries(einsum(f"Z{lhs}->Z{rhs}", self.data))

    def is_zero(self) -> bool:
        return self.data.is_zero()

    def valuation(self) -> int:
        """Lowest degree with a nonzero coefficient, or ``trunc`` when none."""
        for d in range(self.trunc):
            if not _slice_zero(self.data, d):
                return d
        return self.trunc

    def is_O(self, k: int) -> bool:
        """True when every known coefficient below degree ``k`` vanishes."""
        return self.valuation() >= min(k, self.trunc)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RhoSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.data == other.data

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"RhoSeries(trunc={self.trunc}, shape={self.shape}, valuation={self.valuation()})"


def _slice_zero(data: GArray, d: int) -> bool:
    r, i = data.re[d], data.im[d]
    if isinstance(r, np.ndarray):
        return not (np.any(r != 0) or np.any(i != 0))
    return r == 0 and i == 0


def _check_shapes(a: RhoSeries, b: RhoSeries) -> None:
    if a.shape != b.shape:
        raise TruncationMismatch(f"shape mismatch {a.shape} vs {b.shape}")


def series_mul(spec: str, a: RhoSeries, b: RhoSeries) -> RhoSeries:
    """Cauchy product with a tensor contraction given as an einsum spec.

    ``spec`` names only tensor slots (e.g. ``"ij,jk->ik"``); an empty spec
    ``",->"`` multiplies scalar series.
    """
    t = min(a.trunc, b.trunc)
    lhs, rhs = spec.replace(" ", "").split("->")
    sa, sb = lhs.split(",")
    shape = _einsum_out_shape(sa, sb, rhs, a.shape, b.shape)
    out_re = obj_zeros((t, *shape))
    out_im = obj_zeros((t, *shape))
    # a one-long degree slice keeps scalar coefficients as arrays
    full = f"Y{sa},Z{sb}->Z{rhs}"
    for i in range(t):
        if _slice_zero(a.data, i):
            continue
        rest = b.data[: t - i]
        if rest.is_zero():
            continue
        prod = einsum(full, a.data[i : i + 1], rest)
        out_re[i:] = out_re[i:] + prod.re
        out_im[i:] = out_im[i:] + prod.im
    return RhoSeries(GArray(out_re, out_im))


def _einsum_out_shape(sa: str, sb: str, rhs: str, shape_a: tuple, shape_b: tuple) -> tuple[int, ...]:
    sizes = dict(zip(sa, shape_a))
    sizes.update(zip(sb, shape_b))
    return tuple(sizes[c] for c in rhs)


def invert_metric_series(g: RhoSeries) -> RhoSeries:
    """Series inverse of a matrix-valued series with invertible leading block."""
    if len(g.shape) != 2 or g.shape[0] != g.shape[1]:
        raise TruncationMismatch("metric series must be square matrix valued")
    t, n = g.trunc, g.shape[0]
    try:
        m0 = garray_inverse(g.data[0])
    except NotInvertible as exc:
        raise NotInvertible("leading block of the metric is singular") from exc
    coeffs: list[GArray] = [m0]
    for k in range(1, t):
        acc = GArray.zeros((n, n))
        for j in range(1, k + 1):
            gj = g.data[j]
            if gj.is_zero() or coeffs[k - j].is_zero():
                continue
            acc = acc + einsum("ij,jk->ik", gj, coeffs[k - j])
        coeffs.append(-einsum("ij,jk->ik", m0, acc) if not acc.is_zero() else GArray.zeros((n, n)))
    out = GArray.zeros((t, n, n))
    for k, c in enumerate(coeffs):
        out[k] = c
    return RhoSeries(out)


def euler_apply(p: Callable[[int], Any] | Sequence[Any], s: RhoSeries) -> RhoSeries:
    """Multiply the degree-``d`` coefficient by ``p(d)``.

    ``p`` is a callable or a coefficient list ``[p0, p1, ...]`` of a
    polynomial.  ``p(rho d/drho)`` acts on ``rho**d`` exactly this way.
    """
    if not callable(p):
        coeffs = [as_scalar(c) for c in p]

        def poly(x: int) -> Scalar:
            acc = Scalar(0)
            for c in reversed(coeffs):
                acc = acc * x + c
            return acc

        fn = poly
    else:
        fn = p
    out = s.data.copy()
    for d in range(s.trunc):
        f = as_scalar(fn(d))
        out[d] = s.data[d].scale(f) if isinstance(s.data[d], GArray) else s.data[d] * f
    return RhoSeries(out)
