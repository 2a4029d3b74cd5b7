"""Exact Gaussian rationals.

A :class:`Scalar` is ``re + i*im`` with both parts held as ``gmpy2.mpq``.
Nothing in the package ever touches floating point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Union

import gmpy2
from gmpy2 import mpq

from .errors import DivisionByZero, ParseError

__all__ = ["Scalar", "I", "ZERO", "ONE", "as_mpq", "as_scalar", "q_str", "q_parse"]

_RATIONAL_TYPES = (int, Fraction, type(mpq(0)), type(gmpy2.mpz(0)))

Number = Union["Scalar", int, Fraction, Any]


def as_mpq(x: Any) -> Any:
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to ``mpq``."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, _RATIONAL_TYPES):
        return mpq(x)
    if isinstance(x, str):
        return q_parse(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def q_str(x: Any) -> str:
    """Canonical ``"p/q"`` text with ``q > 0``."""
    x = mpq(x)
    return f"{x.numerator}/{x.denominator}"


_RATIONAL_RE = re.compile(r"([+-]?[0-9]+)(?:/([0-9]+))?")


def q_parse(text: str) -> Any:
    """Parse ``"p"`` or ``"p/q"`` with decimal integers only."""
    m = _RATIONAL_RE.fullmatch(text.strip())
    if not m:
        raise ParseError(f"malformed rational literal {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return mpq(int(m.group(1)), den)


class Scalar:
    """Immutable exact complex rational."""

    __slots__ = ("re", "im")

    def __init__(self, re: Any = 0, im: Any = 0) -> None:
        object.__setattr__(self, "re", as_mpq(re))
        object.__setattr__(self, "im", as_mpq(im))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("Scalar is immutable")

    @classmethod
    def _raw(cls, re: Any, im: Any) -> "Scalar":
        s = object.__new__(cls)
        object.__setattr__(s, "re", re)
        object.__setattr__(s, "im", im)
        return s

    # arithmetic

    def __add__(self, other: Number) -> "Scalar":
        o = as_scalar(other)
        return Scalar._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "Scalar":
        o = as_scalar(other)
        return Scalar._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Number) -> "Scalar":
        return as_scalar(other) - self

    def __neg__(self) -> "Scalar":
        return Scalar._raw(-self.re, -self.im)

    def __pos__(self) -> "Scalar":
        return self

    def __mul__(self, other: Number) -> "Scalar":
        o = as_scalar(other)
        return Scalar._raw(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "Scalar":
        o = as_scalar(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise DivisionByZero("division by exact zero")
        num = self * o.conjugate()
        return Scalar._raw(num.re / den, num.im / den)

    def __rtruediv__(self, other: Number) -> "Scalar":
        return as_scalar(other) / self

    def __pow__(self, k: int) -> "Scalar":
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return ONE / (self ** (-k))
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    conj = conjugate

    def abs2(self) -> Any:
        return self.re * self.re + self.im * self.im

    # predicates

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        try:
            o = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    # text forms

    def to_json(self) -> dict:
        return {"re": q_str(self.re), "im": q_str(self.im)}

    @classmethod
    def from_json(cls, obj: Any) -> "Scalar":
        if isinstance(obj, dict):
            if set(obj) - {"re", "im"}:
                raise ParseError(f"unexpected keys in scalar {obj!r}")
            re, im = obj.get("re", "0/1"), obj.get("im", "0/1")
            return cls(_json_rational(re), _json_rational(im))
        return cls(_json_rational(obj), 0)

    def __repr__(self) -> str:
        return f"Scalar({q_str(self.re)!r}, {q_str(self.im)!r})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        im = "" if abs(self.im) == 1 else str(abs(self.im))
        if self.re == 0:
            return f"{'-' if self.im < 0 else ''}{im}i"
        return f"{self.re}{'-' if self.im < 0 else '+'}{im}i"


def _json_rational(x: Any) -> Any:
    if isinstance(x, str):
        return q_parse(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return mpq(x)
    raise ParseError(f"expected a \"p/q\" string, got {x!r}")


def as_scalar(x: Any) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, complex):
        raise TypeError("floating complex values are not exact")
    return Scalar._raw(as_mpq(x), mpq(0))


ZERO = Scalar(0, 0)
ONE = Scalar(1, 0)
I = Scalar(0, 1)
