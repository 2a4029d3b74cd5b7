"""Exact Gaussian elimination over mpq or Scalar entries."""

from __future__ import annotations

from typing import Any, Sequence

from .errors import NotInvertible
from .garray import GArray
from .scalar import Scalar

__all__ = ["rref", "solve_linear", "inverse", "det", "garray_inverse", "matmul"]


def _is_zero(x: Any) -> bool:
    return x == 0


def rref(rows: Sequence[Sequence[Any]]) -> tuple[list[list[Any]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if not _is_zero(m[i][c])), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not _is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve_linear(a: Sequence[Sequence[Any]], b: Sequence[Any]) -> tuple[list[Any] | None, int]:
    """Solve ``a x = b``.

    Returns ``(x, rank)``.  ``x`` is ``None`` when the system is inconsistent;
    when it is underdetermined the free variables are set to zero and the
    caller decides what to do based on ``rank``.
    """
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None, len(pivots) - 1
    zero = b[0] - b[0] if b else 0
    x = [zero] * ncols
    for row, c in zip(red, pivots):
        x[c] = row[-1]
    return x, len(pivots)


def inverse(a: Sequence[Sequence[Any]]) -> list[list[Any]]:
    n = len(a)
    one, zero = _unit(a)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise NotInvertible("matrix is singular")
    return [row[n:] for row in red]


def det(a: Sequence[Sequence[Any]]) -> Any:
    m = [list(r) for r in a]
    n = len(m)
    one, zero = _unit(a)
    out = one
    for c in range(n):
        piv = next((i for i in range(c, n) if not _is_zero(m[i][c])), None)
        if piv is None:
            return zero
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out = out * m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if not _is_zero(m[i][c]):
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return out


def matmul(a: Sequence[Sequence[Any]], b: Sequence[Sequence[Any]]) -> list[list[Any]]:
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), start=a[0][0] * 0) for j in range(len(b[0]))] for i in range(len(a))]


def _unit(a: Sequence[Sequence[Any]]) -> tuple[Any, Any]:
    sample = a[0][0]
    if isinstance(sample, Scalar):
        return Scalar(1), Scalar(0)
    return sample * 0 + 1, sample * 0


def garray_inverse(a: GArray) -> GArray:
    """Inverse of a square GArray."""
    n = a.shape[0]
    rows = [[a[i, j] for j in range(n)] for i in range(n)]
    inv = inverse(rows)
    out = GArray.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = inv[i][j]
    return out
