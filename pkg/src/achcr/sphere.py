"""First variation at the standard structure.

Two pieces live here: the leading-coefficient recursion for the variation
of the obstruction tensor (with its closed form), and an exact check of the
differentials of ``h``, ``N``, ``A`` and the Ricci form under a deformation
``Zhat_a = Z_a + t mu_a^{bbar} Zb_b``.

The derivative oracle never uses floating point.  Each invariant of
``deform(A, t mu)`` is a rational function of ``t`` whose denominator is a
power of ``det hhat(t)``; after clearing that power the numerator is
recovered exactly by Newton interpolation at rational sample points and
differentiated at ``t = 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from gmpy2 import mpq

from .checks import CheckReport
from .errors import BadParameter, DegenerateDeformation, DegreeBoundExceeded
from .frame import CRFrameAlgebra, deform, levi_matrix
from .garray import GArray, einsum
from .linalg import det
from .pseudohermitian import PseudohermitianData, cov_deriv, tw_connection
from .scalar import Scalar, as_scalar
from .tensor import ANTI, HOL, conj_full, restrict

__all__ = [
    "VariationCoefficients",
    "leading_recursion",
    "closed_form",
    "closed_form_check",
    "newton_coefficients",
    "polynomial_from_samples",
    "RationalDerivative",
    "derivative_at_zero",
    "VariationReport",
    "variation_formula_check",
    "predicted_differentials",
]


# leading-coefficient recursion


@dataclass(frozen=True)
class VariationCoefficients:
    """``c[l-1]`` is the leading coefficient at ``Delta_b^l``; ``a`` the one in the obstruction."""

    n: int
    c: tuple[Any, ...]
    a: Any


def leading_recursion(n: int) -> VariationCoefficients:
    if not isinstance(n, int) or n < 1:
        raise BadParameter("n must be a positive integer")
    c = [mpq(2, n)]
    for l in range(2, n + 1):
        c.append(-c[-1] / (l * (n + 1 - l)))
    return VariationCoefficients(n, tuple(c), -c[-1] / 2)


def closed_form(n: int) -> Any:
    return mpq((-1) ** n, math.factorial(n) ** 2)


def closed_form_check(n: int) -> CheckReport:
    rec = leading_recursion(n)
    expected = closed_form(n)
    ok = rec.a == expected
    wit = [] if ok else [f"recursion {rec.a} != closed form {expected}"]
    return CheckReport(
        "sphere_closed_form",
        ok,
        wit,
        {"n": n, "a": Scalar(rec.a), "closed_form": Scalar(expected), "c": [Scalar(x) for x in rec.c]},
    )


# exact interpolation


def newton_coefficients(ts: Sequence[Any], ys: Sequence[Scalar]) -> list[Scalar]:
    """Divided differences ``[y0], [y0,y1], ...`` of the samples."""
    coef = [as_scalar(y) for y in ys]
    m = len(ts)
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / Scalar(ts[i] - ts[i - j])
    return coef


def _newton_to_monomial(ts: Sequence[Any], coef: Sequence[Scalar]) -> list[Scalar]:
    """Monomial coefficients (lowest first) of the Newton form."""
    poly: list[Scalar] = [Scalar(0)]
    for k in range(len(coef) - 1, -1, -1):
        # poly = poly * (t - ts[k]) + coef[k]
        shifted = [Scalar(0)] + poly
        for i, p in enumerate(poly):
            shifted[i] = shifted[i] - p * Scalar(ts[k])
        shifted[0] = shifted[0] + coef[k]
        poly = shifted
    while len(poly) > 1 and poly[-1].is_zero():
        poly.pop()
    return poly


def polynomial_from_samples(ts: Sequence[Any], ys: Sequence[Scalar], bound: int) -> list[Scalar] | None:
    """Exact polynomial through the samples if its degree is at most ``bound``.

    Needs more than ``bound + 1`` samples: the surplus divided differences
    must vanish, which certifies the degree.
    """
    if len(ts) <= bound + 1:
        raise ValueError("need more samples than bound + 1 to certify the degree")
    coef = newton_coefficients(ts, ys)
    if any(not c.is_zero() for c in coef[bound + 1 :]):
        return None
    return _newton_to_monomial(ts[: bound + 1], coef[: bound + 1])


@dataclass(frozen=True)
class RationalDerivative:
    """``f = p / q**k`` reconstructed exactly, with its first three Taylor coefficients at ``t = 0``."""

    p: tuple[Scalar, ...]
    k: int
    value: Scalar
    derivative: Scalar
    second: Scalar


def _poly_taylor(p: Sequence[Scalar], order: int) -> list[Scalar]:
    return [p[i] if i < len(p) else Scalar(0) for i in range(order + 1)]


def _series_div(num: list[Scalar], den: list[Scalar]) -> list[Scalar]:
    """Taylor coefficients of ``num / den`` to the length of ``num``."""
    out: list[Scalar] = []
    inv0 = Scalar(1) / den[0]
    for i in range(len(num)):
        acc = num[i]
        for j in range(1, i + 1):
            if j < len(den):
                acc = acc - den[j] * out[i - j]
        out.append(acc * inv0)
    return out


def derivative_at_zero(
    ts: Sequence[Any],
    ys: Sequence[Scalar],
    q: Sequence[Scalar],
    bound: int,
    max_power: int = 6,
) -> RationalDerivative:
    """Find the least ``k`` with ``y * q**k`` polynomial of degree ``<= bound``."""
    qvals = [_eval(q, t) for t in ts]
    for k in range(max_power + 1):
        cleared = [y * (qv**k) for y, qv in zip(ys, qvals)]
        p = polynomial_from_samples(ts, cleared, bound)
        if p is None:
            continue
        qk = [Scalar(1)]
        for _ in range(k):
            qk = _poly_mul(qk, list(q))
        tay = _series_div(_poly_taylor(p, 2), _poly_taylor(qk, 2))
        return RationalDerivative(tuple(p), k, tay[0], tay[1], tay[2])
    raise DegreeBoundExceeded(f"no denominator power up to {max_power} gives a numerator of degree <= {bound}")


def _eval(p: Sequence[Scalar], t: Any) -> Scalar:
    acc = Scalar(0)
    for c in reversed(p):
        acc = acc * Scalar(t) + c
    return acc


def _poly_mul(a: list[Scalar], b: list[Scalar]) -> list[Scalar]:
    out = [Scalar(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


# first-variation formulas


def _mu_lowered(P: PseudohermitianData, mu: Sequence[Sequence[Any]]) -> GArray:
    """``mu_{ab} = mu_a^{cbar} h_{b cbar}`` at CR hol positions."""
    ab = P.alphabet
    n = P.n
    up = GArray.zeros(P.L.shape)
    for a, b in itertools.product(range(n), repeat=2):
        up[ab.hol(a), ab.anti(b)] = as_scalar(mu[a][b])
    return einsum("ac,bc->ab", up, P.L)


def predicted_differentials(P: PseudohermitianData, mu: Sequence[Sequence[Any]]) -> dict[str, GArray]:
    """Right-hand sides ``h', N', A', R'`` built from covariant derivatives of ``mu``."""
    ab = P.alphabet
    mu_h = restrict(_mu_lowered(P, mu), ab, (HOL, HOL))
    mu_a = conj_full(mu_h, ab)
    d_mu = cov_deriv(P.gamma, mu_h, "dd")  # [b, c, k] = mu_{bc,k}
    n_dot = einsum("bca->abc", d_mu) - einsum("acb->abc", d_mu)
    a_dot = _slot(d_mu, ab.reeb).scale(-1)
    # nabla^sbar mu_{bbar sbar}, then nabla_a
    v = einsum("bsk,sk->b", cov_deriv(P.gamma, mu_a, "dd"), P.Linv)
    term1 = cov_deriv(P.gamma, v, "d").transpose(1, 0)  # [a, bbar]
    w = einsum("atk,tk->a", d_mu, P.Linv)
    term2 = cov_deriv(P.gamma, w, "d")  # [a, bbar]
    r_dot = restrict((term1 + term2).scale(-1), ab, (HOL, ANTI))
    h_dot = GArray.zeros(P.L.shape)
    return {
        "h": restrict(h_dot, ab, (HOL, ANTI)),
        "N": restrict(n_dot, ab, (HOL, HOL, HOL)),
        "A": restrict(a_dot, ab, (HOL, HOL)),
        "R": r_dot,
    }


def _slot(arr: GArray, k: int) -> GArray:
    s = arr.shape[0]
    out = GArray.zeros((s, s))
    for i, j in itertools.product(range(s), repeat=2):
        out[i, j] = arr[i, j, k]
    return out


def _invariants(P: PseudohermitianData) -> dict[str, GArray]:
    ab = P.alphabet
    return {
        "h": restrict(P.L, ab, (HOL, ANTI)),
        "N": restrict(P.N_low.data, ab, (HOL, HOL, HOL)),
        "A": restrict(P.A.data, ab, (HOL, HOL)),
        "R": restrict(P.ricci.data, ab, (HOL, ANTI)),
    }


@dataclass
class VariationReport:
    ok: bool
    checks: dict[str, CheckReport]
    second_order_h: dict[str, Scalar] = field(default_factory=dict)
    samples: int = 0
    bound: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "checks": {k: v.to_json() for k, v in sorted(self.checks.items())},
            "second_order_h": {k: v.to_json() for k, v in sorted(self.second_order_h.items())},
            "samples": self.samples,
            "bound": self.bound,
        }


def variation_formula_check(
    a: CRFrameAlgebra,
    mu: Sequence[Sequence[Any]],
    bound: int = 40,
    extra: int = 3,
    invariants: Callable[[PseudohermitianData], dict[str, GArray]] = _invariants,
) -> VariationReport:
    """Compare exact ``d/dt|_0`` of ``(h, N, A, R)`` of ``deform(a, t mu)`` with the formulas."""
    P0 = tw_connection(a)
    for name in ("A", "N"):
        if not _invariants(P0)[name].is_zero():
            raise BadParameter(f"base structure must have vanishing {name}")
    if not _invariants(P0)["R"].is_zero():
        raise BadParameter("base structure must have vanishing Ricci form")
    ts: list[Any] = []
    samples: list[dict[str, GArray]] = []
    dets: list[Scalar] = []
    j = 0
    while len(ts) < bound + 1 + extra:
        t = mpq(j, 7)
        j += 1
        if j > 10 * (bound + extra + 1):
            raise DegreeBoundExceeded("too many degenerate sample points")
        scaled = [[as_scalar(x) * Scalar(t) for x in row] for row in mu]
        try:
            at = deform(a, scaled)
        except DegenerateDeformation:
            continue
        ts.append(t)
        samples.append(invariants(tw_connection(at)))
        dets.append(det(levi_matrix(at)))
    q = polynomial_from_samples(ts, dets, bound)
    if q is None:
        raise DegreeBoundExceeded(f"det hhat(t) has degree above {bound}")
    predicted = predicted_differentials(P0, mu)
    checks: dict[str, CheckReport] = {}
    second: dict[str, Scalar] = {}
    for name, ref in samples[0].items():
        lhs = GArray.zeros(ref.shape)
        for idx in itertools.product(range(ref.shape[0]), repeat=ref.ndim):
            ys = [s[name][idx] for s in samples]
            if all(y.is_zero() for y in ys):
                continue
            rd = derivative_at_zero(ts, ys, q, bound)
            lhs[idx] = rd.derivative
            if name == "h" and not rd.second.is_zero():
                second[",".join(a.alphabet.labels[i] for i in idx)] = rd.second
        checks[name] = CheckReport.compare(f"variation_{name}", lhs, predicted[name])
    ok = all(c.ok for c in checks.values())
    return VariationReport(ok, checks, second, len(ts), bound)
