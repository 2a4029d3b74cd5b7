"""Order-by-order construction of the approximately Einstein metric.

The perturbation ``phi`` is seeded at degree 2 and then corrected step by
step; after step ``m`` the Einstein tensor satisfies
``Ein_IJ = O(rho^{max(m + a(I,J), 3)})``.  Every correction is followed by
a full exact recomputation, a check that the targeted coefficient died and
a check of the contracted Bianchi identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

from gmpy2 import mpq

from .ach import ACHGeometry, EinsteinComputation, PhiExpansion, assemble
from .checks import CheckReport
from .errors import (
    BianchiAssertFailed,
    FloorAssertFailed,
    IndicialSingular,
    KillFailed,
    TruncationTooSmall,
)
from .frame import CRFrameAlgebra, rescale
from .garray import GArray, einsum
from .linalg import det, inverse
from .pseudohermitian import PseudohermitianData, _nn_contraction, cov_deriv, tw_connection
from .scalar import I, Scalar, as_mpq
from .series import RhoSeries, euler_apply
from .tensor import ALL_ACH, ANTI, HOL, Alphabet, IndexKind, InvariantTensor, conj_full, restrict

__all__ = [
    "SolverTargets",
    "IndicialFactors",
    "ObstructionResult",
    "seed",
    "seed_tensors",
    "indicial",
    "det_closed_form",
    "solve",
    "order_forms",
    "second_obstruction_check",
    "divergence_operator",
    "divergence_identity",
    "scaling_law",
    "compute_u_v",
    "second_obstruction_rhs",
    "run_pipeline",
]

Q = mpq


# order offsets


@dataclass(frozen=True)
class SolverTargets:
    """The table ``a(I, J)`` over the ACH alphabet and the final orders ``2n+1+a``."""

    n: int

    def a(self, i: int, j: int) -> int:
        ab = Alphabet(self.n, transverse=True)
        ki, kj = sorted((ab.kind(i), ab.kind(j)), key=_kind_rank)
        if {ki, kj} <= {IndexKind.HOL, IndexKind.ANTI} and ki != kj:
            return 3
        if ki == kj and ki in (IndexKind.HOL, IndexKind.ANTI):
            return 1
        if ki in (IndexKind.INF, IndexKind.REEB) and kj in (IndexKind.INF, IndexKind.REEB):
            return 3
        return 2

    def order(self, i: int, j: int) -> int:
        return 2 * self.n + 1 + self.a(i, j)

    @property
    def min_trunc(self) -> int:
        """Ein must be known through degree ``2n+4``."""
        return 2 * self.n + 5


def _kind_rank(k: IndexKind) -> int:
    return [IndexKind.INF, IndexKind.REEB, IndexKind.HOL, IndexKind.ANTI].index(k)


# indicial factors


@dataclass(frozen=True)
class IndicialFactors:
    d: int
    n: int
    p_0a: Any
    p_ab: Any
    p_tf: Any
    M: tuple[tuple[Any, Any], tuple[Any, Any]]

    @property
    def det(self) -> Any:
        return det([list(r) for r in self.M])


def indicial(d: int, n: int) -> IndicialFactors:
    """Scalar factors by which a ``rho^d`` correction enters Ein at degree ``d``."""
    if d < 1:
        raise ValueError("degree must be positive")
    e = Q(-1, 8)
    p_0a = e * (d + 1) * (d - 2 * n - 3)
    p_ab = e * d * (d - 2 * n - 2)
    p_tf = e * (d * d - (2 * n + 2) * d - 8)
    m11 = e * (d * d - (2 * n + 4) * d - 4 * n)
    m12 = Q(1, 2) * (d - 2)
    m21 = Q(n, 8) * (d - 4)
    m22 = e * (d * d - (4 * n + 2) * d - 8)
    return IndicialFactors(d, n, p_0a, p_ab, p_tf, ((m11, m12), (m21, m22)))


def det_closed_form(m: int, n: int) -> Any:
    return Q(1, 64) * (m + 2) * (m + 4) * (m - 2 * n - 2) * (m - 4 * n - 2)


# seed


def seed_tensors(P: PseudohermitianData) -> tuple[GArray, GArray]:
    """``(Phi_{a bbar}, Phi_{ab})`` as n x n arrays (hol index first)."""
    n = P.n
    ab = P.alphabet
    hols, antis = ab.hols, ab.antis
    ric = restrict(P.ricci.data, ab, (HOL, ANTI))
    nn = _nn_contraction(P)
    tr_nn = einsum("ab,ab->", nn, P.Linv)[()]
    h = restrict(P.L, ab, (HOL, ANTI))
    c = Scalar(Q(-2, n + 2))
    k = Scalar(Q(1, 2 * (n + 1)))
    herm = (ric - nn.scale(2) - h.scale(k * (P.R - tr_nn * 2))).scale(c)
    A = restrict(P.A.data, ab, (HOL, HOL))
    Nh = restrict(P.N_low.data, ab, (HOL, HOL, HOL))
    dN = cov_deriv(P.gamma, Nh, "ddd")
    div = einsum("gabk,gk->ab", dN, P.Linv)  # N_{g a b,}^g
    hol = A.scale(I * -2) - (div + div.transpose(1, 0)).scale(Scalar(Q(2, n)))
    H = GArray.from_function((n, n), lambda a, b: herm[hols[a], antis[b]])
    S = GArray.from_function((n, n), lambda a, b: hol[hols[a], hols[b]])
    return H, S


class _Phi:
    """Mutable builder for a real symmetric perturbation over the CR alphabet."""

    def __init__(self, n: int, trunc: int) -> None:
        self.n = n
        self.ab = Alphabet(n)
        self.data = GArray.zeros((trunc, 2 * n + 1, 2 * n + 1))

    def add_00(self, d: int, x: Scalar) -> None:
        self.data.add_at((d, 0, 0), x)

    def add_0a(self, d: int, v: list[Scalar]) -> None:
        for a in range(self.n):
            p, q = self.ab.hol(a), self.ab.anti(a)
            for i, j in ((0, p), (p, 0)):
                self.data.add_at((d, i, j), v[a])
            for i, j in ((0, q), (q, 0)):
                self.data.add_at((d, i, j), v[a].conjugate())

    def add_herm(self, d: int, H: GArray) -> None:
        for a, b in itertools.product(range(self.n), repeat=2):
            val = H[a, b]
            p, q = self.ab.hol(a), self.ab.anti(b)
            self.data.add_at((d, p, q), val)
            self.data.add_at((d, q, p), val)

    def add_hol(self, d: int, S: GArray) -> None:
        for a, b in itertools.product(range(self.n), repeat=2):
            val = S[a, b]
            self.data.add_at((d, self.ab.hol(a), self.ab.hol(b)), val)
            self.data.add_at((d, self.ab.anti(a), self.ab.anti(b)), val.conjugate())

    def expansion(self) -> PhiExpansion:
        return PhiExpansion(RhoSeries(self.data.copy()))


def seed(P: PseudohermitianData, trunc: int | None = None) -> PhiExpansion:
    """Degree-2 perturbation making the Einstein tensor ``O(rho^3)``."""
    n = P.n
    trunc = 2 * n + 6 if trunc is None else trunc
    if trunc < 3:
        raise TruncationTooSmall("the seed lives at degree 2")
    H, S = seed_tensors(P)
    phi = _Phi(n, trunc)
    phi.add_herm(2, H)
    phi.add_hol(2, S)
    return phi.expansion()


# Einstein blocks


class _Blocks:
    """Views of an Einstein series in the blocks the solver works with."""

    def __init__(self, P: PseudohermitianData, ein: RhoSeries) -> None:
        self.P = P
        self.n = P.n
        self.ein = ein
        self.ach = Alphabet(P.n, transverse=True)
        self.hmat = GArray.from_function((P.n, P.n), lambda a, b: P.L[1 + a, 1 + P.n + b])
        self.hinv = GArray.from_function((P.n, P.n), lambda a, b: P.Linv[1 + a, 1 + P.n + b])

    def coeff(self, d: int) -> GArray:
        return self.ein.data[d]

    def hol(self, d: int) -> GArray:
        c, n = self.coeff(d), self.n
        return GArray.from_function((n, n), lambda a, b: c[2 + a, 2 + b])

    def herm(self, d: int) -> GArray:
        c, n = self.coeff(d), self.n
        return GArray.from_function((n, n), lambda a, b: c[2 + a, 2 + n + b])

    def zero_a(self, d: int) -> list[Scalar]:
        c = self.coeff(d)
        return [c[1, 2 + a] for a in range(self.n)]

    def e00(self, d: int) -> Scalar:
        return self.coeff(d)[1, 1]

    def trace(self, d: int) -> Scalar:
        return einsum("ab,ab->", self.herm(d), self.hinv)[()]

    def trace_free(self, d: int) -> GArray:
        return self.herm(d) - self.hmat.scale(self.trace(d) / self.n)

    def valuation_ok(self, targets: Callable[[int, int], int]) -> list[str]:
        """Labels of the components violating ``Ein_IJ = O(rho^targets(I, J))``."""
        bad = []
        labels = self.ach.labels
        size = self.ach.size
        for i in range(size):
            for j in range(i, size):
                k = min(targets(i, j), self.ein.trunc)
                for d in range(k):
                    if not self.coeff(d)[i, j].is_zero():
                        bad.append(f"Ein[{labels[i]},{labels[j]}] at degree {d}")
                        break
        return bad


# results


@dataclass
class ObstructionResult:
    """Outputs of a full solver run."""

    n: int
    phi: PhiExpansion
    einstein: RhoSeries
    O: InvariantTensor
    E: InvariantTensor
    u: Scalar
    v: Scalar
    residuals: dict[str, bool] = field(default_factory=dict)
    steps: list[dict[str, Any]] = field(default_factory=list)


# solver


def solve(
    P: PseudohermitianData,
    phi: PhiExpansion | None = None,
    targets: SolverTargets | None = None,
    trunc: int | None = None,
    last_step: int | None = None,
    check_bianchi: bool = True,
) -> tuple[PhiExpansion, ObstructionResult]:
    """Run steps ``m = 1 .. 2n+1`` from the seed and extract ``O``, ``E``, ``u``, ``v``."""
    n = P.n
    targets = targets or SolverTargets(n)
    if phi is None:
        phi = seed(P, trunc)
    T = phi.trunc if trunc is None else trunc
    if T != phi.trunc:
        raise TruncationTooSmall("seed and requested truncation differ")
    if T < targets.min_trunc:
        raise TruncationTooSmall(f"truncation {T} is below the required {targets.min_trunc}")
    last = 2 * n + 1 if last_step is None else last_step
    if last > 2 * n + 1:
        raise IndicialSingular(f"p_ab({2 * n + 2}) = 0: step {2 * n + 2} is the obstructed order")

    geo = ACHGeometry(P, T)
    state = _Phi(n, T)
    state.data = phi.series.data.copy()
    Phi_H, Phi_S = seed_tensors(P)
    log: list[dict[str, Any]] = []

    def recompute(label: str) -> EinsteinComputation:
        ec = EinsteinComputation(geo, assemble(P, state.expansion()))
        entry: dict[str, Any] = {"step": label}
        if check_bianchi:
            ok = ec.bianchi.is_zero()
            entry["bianchi"] = ok
            if not ok:
                raise BianchiAssertFailed(f"contracted Bianchi identity fails after {label}")
        log.append(entry)
        return ec

    ec = recompute("seed")
    blocks = _Blocks(P, ec.einstein)
    bad = blocks.valuation_ok(lambda i, j: 3)
    if bad:
        raise FloorAssertFailed("seeded Einstein tensor is not O(rho^3): " + "; ".join(bad[:4]))
    if check_bianchi:
        _assert_order_forms(ec, P, Phi_S, 1, "seed")

    for m in range(1, last + 1):
        # (a) hol-hol at degree m, then 0a at degree m+1
        d = m
        f = indicial(d, n)
        e = blocks.hol(d)
        if d < 3:
            if not e.is_zero():
                raise FloorAssertFailed(f"Ein_ab at degree {d} must vanish below the floor")
        elif not e.is_zero():
            _nonzero_factor(f.p_ab, "p_ab", d)
            state.add_hol(d, e.scale(Scalar(-1 / f.p_ab)))
            ec = recompute(f"m={m} ab@{d}")
            blocks = _Blocks(P, ec.einstein)
            if not blocks.hol(d).is_zero():
                raise KillFailed(f"Ein_ab at degree {d} survived the correction")
        d = m + 1
        f = indicial(d, n)
        e0 = blocks.zero_a(d)
        nonzero = any(not x.is_zero() for x in e0)
        if d < 3:
            if nonzero:
                raise FloorAssertFailed(f"Ein_0a at degree {d} must vanish below the floor")
        elif nonzero:
            _nonzero_factor(f.p_0a, "p_0a", d)
            state.add_0a(d, [x * Scalar(-1 / f.p_0a) for x in e0])
            ec = recompute(f"m={m} 0a@{d}")
            blocks = _Blocks(P, ec.einstein)
            if any(not x.is_zero() for x in blocks.zero_a(d)):
                raise KillFailed(f"Ein_0a at degree {d} survived the correction")
        # (b) trace-free hermitian at degree m+2
        d = m + 2
        f = indicial(d, n)
        tf = blocks.trace_free(d)
        if not tf.is_zero():
            _nonzero_factor(f.p_tf, "p_tf", d)
            state.add_herm(d, tf.scale(Scalar(-1 / f.p_tf)))
            ec = recompute(f"m={m} tf@{d}")
            blocks = _Blocks(P, ec.einstein)
            if not blocks.trace_free(d).is_zero():
                raise KillFailed(f"trace-free Ein_a bbar at degree {d} survived the correction")
        # (c) the 2x2 system for (psi_00, psi_a^a)
        rhs = [blocks.e00(d), blocks.trace(d)]
        if not all(x.is_zero() for x in rhs):
            if not all(x.is_real() for x in rhs):
                raise KillFailed(f"Ein_00 or Ein_a^a at degree {d} is not real")
            if f.det == 0:
                raise IndicialSingular(f"the trace system is singular at degree {d}")
            Minv = inverse([list(r) for r in f.M])
            x00 = -(Minv[0][0] * rhs[0].re + Minv[0][1] * rhs[1].re)
            ytr = -(Minv[1][0] * rhs[0].re + Minv[1][1] * rhs[1].re)
            state.add_00(d, Scalar(x00))
            state.add_herm(d, blocks.hmat.scale(Scalar(ytr / n)))
            ec = recompute(f"m={m} trace@{d}")
            blocks = _Blocks(P, ec.einstein)
            if not (blocks.e00(d).is_zero() and blocks.trace(d).is_zero()):
                raise KillFailed(f"Ein_00 or Ein_a^a at degree {d} survived the correction")
        # (d) components fixed by the Bianchi identity
        c = blocks.coeff
        for dd in range(m + 3):
            if not (c(dd)[0, 0].is_zero() and c(dd)[0, 1].is_zero()):
                raise BianchiAssertFailed(f"Ein_inf,inf or Ein_inf,0 nonzero at degree {dd} after step {m}")
        for dd in range(m + 2):
            if any(not c(dd)[0, 2 + a].is_zero() for a in range(2 * n)):
                raise BianchiAssertFailed(f"Ein_inf,a nonzero at degree {dd} after step {m}")
        bad = blocks.valuation_ok(lambda i, j: max(m + targets.a(i, j), 3))
        if bad:
            raise FloorAssertFailed(f"after step {m}: " + "; ".join(bad[:4]))
        if check_bianchi:
            _assert_order_forms(ec, P, Phi_S, m + 1, f"m={m}")

    final = state.expansion()
    ein = ec.einstein
    if last < 2 * n + 1:
        return final, ObstructionResult(n, final, ein, _zero_O(P), _zero_E(P), Scalar(0), Scalar(0), {}, log)
    O, E = _extract(P, ein, targets)
    result = ObstructionResult(n, final, ein, O, E, Scalar(0), Scalar(0), {}, log)
    result.u, result.v = compute_u_v(result, P)
    result.residuals = {
        "bianchi_every_substep": all(e.get("bianchi", True) for e in log),
        "second_obstruction": second_obstruction_check(result, P).ok,
        "divergence_identity": divergence_identity(result, P).ok,
        "O_symmetric": O.data == O.data.transpose(1, 0),
        "E_ab_equals_O": _E_hol(P, E) == O.data,
        "E_hermitian": conj_full(E.data, Alphabet(n, transverse=True)) == E.data,
        "u_real": result.u.is_real(),
        "v_real": result.v.is_real(),
    }
    return final, result


def _nonzero_factor(p: Any, name: str, d: int) -> None:
    if p == 0:
        raise IndicialSingular(f"{name}({d}) vanishes")


def _zero_O(P: PseudohermitianData) -> InvariantTensor:
    return InvariantTensor.zeros(P.alphabet, (HOL, HOL))


def _zero_E(P: PseudohermitianData) -> InvariantTensor:
    return InvariantTensor.zeros(Alphabet(P.n, transverse=True), (ALL_ACH, ALL_ACH))


def _extract(P: PseudohermitianData, ein: RhoSeries, targets: SolverTargets) -> tuple[InvariantTensor, InvariantTensor]:
    n = P.n
    ach = Alphabet(n, transverse=True)
    E = GArray.zeros((ach.size, ach.size))
    for i, j in itertools.product(range(ach.size), repeat=2):
        E[i, j] = ein.data[targets.order(i, j)][i, j]
    O = GArray.zeros((2 * n + 1, 2 * n + 1))
    d = 2 * n + 2
    for a, b in itertools.product(range(n), repeat=2):
        O[1 + a, 1 + b] = ein.data[d][2 + a, 2 + b]
    return (
        InvariantTensor(P.alphabet, (HOL, HOL), O),
        InvariantTensor(ach, (ALL_ACH, ALL_ACH), E),
    )


def _E_hol(P: PseudohermitianData, E: InvariantTensor) -> GArray:
    """``E_ab`` moved to CR positions."""
    n = P.n
    out = GArray.zeros((2 * n + 1, 2 * n + 1))
    for a, b in itertools.product(range(n), repeat=2):
        out[1 + a, 1 + b] = E.data[2 + a, 2 + b]
    return out


# CR operators on constant tensors and on series of them


def _div1(P: PseudohermitianData, w: GArray) -> GArray:
    """``nabla^a w_a`` (contracting whichever kind ``w`` lives on); series aware."""
    if w.ndim == 1:
        dw = cov_deriv(P.gamma, w, "d")
        return einsum("ak,ak->", dw, P.Linv)
    dw = _series_cov(P, w, "d")
    return einsum("Zak,ak->Z", dw, P.Linv)


def _series_cov(P: PseudohermitianData, s: GArray, variance: str) -> GArray:
    from .ach import _batched_cov

    return _batched_cov(P.gamma, s, variance)


def _complement(kind: frozenset) -> frozenset:
    return ANTI if kind == HOL else HOL


def _raised_A(P: PseudohermitianData, kind: frozenset) -> GArray:
    """``A^{ab}`` with upper slots of ``kind``."""
    A = restrict(P.A.data, P.alphabet, (_complement(kind),) * 2)
    return einsum("xy,ax,by->ab", A, P.Linv, P.Linv)


def _raised_N(P: PseudohermitianData, kind: frozenset) -> GArray:
    """``N^{gab}`` with all three upper slots of ``kind``."""
    N = restrict(P.N_low.data, P.alphabet, (_complement(kind),) * 3)
    return einsum("xyz,gx,ay,bz->gab", N, P.Linv, P.Linv, P.Linv)


def _half_raised_N(P: PseudohermitianData, kind: frozenset) -> GArray:
    """``N_a^{bbar cbar}`` with the lower slot of ``kind`` and upper slots of the other kind."""
    N = restrict(P.N_low.data, P.alphabet, (kind,) * 3)
    return einsum("ast,sx,ty->axy", N, P.Linv, P.Linv)


def _double_div_parts(P: PseudohermitianData, X: GArray, kind: frozenset) -> tuple[Scalar, Scalar, Scalar]:
    """``(nabla^a nabla^b X_ab, N^{gab} nabla_g X_ab, N^{gab}_{,g} X_ab)`` for ``X`` of ``kind x kind``."""
    X = restrict(X, P.alphabet, (kind, kind))
    d1 = cov_deriv(P.gamma, X, "dd")  # [a, b, k]
    d2 = cov_deriv(P.gamma, d1, "ddd")  # [a, b, k, l]
    nn = einsum("abkl,bk,al->", d2, P.Linv, P.Linv)[()]
    Nu = _raised_N(P, kind)
    n_grad = einsum("gab,abg->", Nu, d1)[()]
    dNu = cov_deriv(P.gamma, Nu, "uuu")  # [g, a, b, k]
    n_div = einsum("gabg,ab->", dNu, X)[()]
    return nn, n_grad, n_div


def divergence_operator(P: PseudohermitianData, X: GArray, kind: frozenset = HOL, t: Any = 0) -> Scalar:
    """``D_t^{ab} X_ab`` for a constant symmetric ``X`` of ``kind x kind`` (``t = 0`` is ``D``)."""
    n = P.n
    t = Scalar(as_mpq(t)) if not isinstance(t, Scalar) else t
    X = restrict(X, P.alphabet, (kind, kind))
    nn, n_grad, n_div = _double_div_parts(P, X, kind)
    a_term = einsum("ab,ab->", _raised_A(P, kind), X)[()]
    i_sign = I if kind == HOL else -I
    return nn - i_sign * a_term - (Scalar(1) + t * n) * n_grad - (Scalar(1) + t * (n + 1)) * n_div


# checks


def _O_full(result: ObstructionResult, P: PseudohermitianData) -> GArray:
    return result.O.data + conj_full(result.O.data, P.alphabet)


def second_obstruction_rhs(result: ObstructionResult, P: PseudohermitianData) -> GArray:
    """``-i nabla^b O_ab - i N_a^{bbar cbar} O_{bbar cbar}`` at CR positions."""
    Of = _O_full(result, P)
    Oh = restrict(Of, P.alphabet, (HOL, HOL))
    Oa = restrict(Of, P.alphabet, (ANTI, ANTI))
    d1 = cov_deriv(P.gamma, Oh, "dd")
    div = einsum("abk,bk->a", d1, P.Linv)
    nterm = einsum("axy,xy->a", _half_raised_N(P, HOL), Oa)
    return (div + nterm).scale(-I)


def second_obstruction_check(result: ObstructionResult, P: PseudohermitianData) -> CheckReport:
    """The ``rho^{2n+3}`` coefficient of ``Ein_{0a}`` against the divergence of ``O``."""
    n = P.n
    d = 2 * n + 3
    lhs = GArray.zeros((2 * n + 1,))
    for a in range(n):
        lhs[1 + a] = result.einstein.data[d][1, 2 + a]
    rhs = second_obstruction_rhs(result, P)
    return CheckReport.compare("second_obstruction", lhs, rhs)


def divergence_identity(result: ObstructionResult, P: PseudohermitianData, t: Any = 0) -> CheckReport:
    """``D^{ab} O_ab - D^{abar bbar} O_{abar bbar}``, both sides evaluated separately."""
    Of = _O_full(result, P)
    x = divergence_operator(P, Of, HOL, t)
    y = divergence_operator(P, Of, ANTI, t)
    lhs = GArray.zeros((1,))
    lhs[0] = x - y
    return CheckReport.compare("divergence_identity", lhs, GArray.zeros((1,)), details={"D O": x, "Dbar Obar": y})


def compute_u_v(result: ObstructionResult, P: PseudohermitianData) -> tuple[Scalar, Scalar]:
    n = P.n
    E = result.E.data
    ab = P.alphabet
    w_inf = _cr_row(E, 0, 2 * n + 1)  # E_{inf i}
    w_0 = _cr_row(E, 1, 2 * n + 1)  # E_{0 i}
    div_inf_h = _div1(P, restrict(w_inf, ab, (HOL,)))[()]
    div_inf_a = _div1(P, restrict(w_inf, ab, (ANTI,)))[()]
    div_0_h = _div1(P, restrict(w_0, ab, (HOL,)))[()]
    div_0_a = _div1(P, restrict(w_0, ab, (ANTI,)))[()]
    u = (E[0, 1] - I * div_inf_h + I * div_inf_a) * Scalar(Q(-1, n + 1))

    Ecr = E[1:, 1:]
    herm = restrict(Ecr, ab, (HOL, ANTI))
    trace = einsum("ab,ab->", herm, P.Linv)[()]
    parts_h = _double_div_parts(P, Ecr, HOL)
    parts_a = _double_div_parts(P, Ecr, ANTI)
    second = sum(parts_h, Scalar(0)) + sum(parts_a, Scalar(0))
    v = (
        -E[1, 1]
        + trace * Scalar(Q(2, n))
        - (div_inf_h + div_inf_a) * Scalar(Q(1, n))
        + I * (div_0_h - div_0_a) * Scalar(Q(2, n * (n + 2)))
        - second * Scalar(Q(2, n * (n + 1)))
    )
    return u, v


def _cr_row(E: GArray, row: int, size: int) -> GArray:
    out = GArray.zeros((size,))
    for k in range(1, size):
        out[k] = E[row, 1 + k]
    return out


# order-counting forms of the contracted Bianchi identity


def order_forms(ec: EinsteinComputation, P: PseudohermitianData, Phi_S: GArray) -> tuple[RhoSeries, RhoSeries, RhoSeries]:
    """Left sides of the three order-counting identities as series.

    ``Phi_S`` is the degree-2 seed of ``phi_ab`` (n x n, hol x hol).  The
    third form is returned as a CR covector series on the hol slots.
    """
    n = P.n
    ab = P.alphabet
    ein = ec.einstein
    T = ein.trunc
    data = ein.data
    Linv = P.Linv

    def cr_vec(row: int, kind: frozenset) -> GArray:
        out = GArray.zeros((T, 2 * n + 1))
        out[:, 1:] = data[:, row, 2:]
        return restrict(out, ab, (None, kind))

    def scalar_series(g: GArray) -> RhoSeries:
        return RhoSeries(g)

    def euler(c: int, s: RhoSeries) -> RhoSeries:
        return euler_apply(lambda d: d - c, s)

    e_inf_inf = scalar_series(data[:, 0, 0])
    e_inf_0 = scalar_series(data[:, 0, 1])
    e_00 = scalar_series(data[:, 1, 1])
    pairs = data[:, 1:, 1:]
    herm = restrict(pairs, ab, (None, HOL, ANTI))
    tr = scalar_series(einsum("Zab,ab->Z", herm, Linv))
    e_hh = restrict(pairs, ab, (None, HOL, HOL))
    e_aa = restrict(pairs, ab, (None, ANTI, ANTI))

    div_inf = einsum("Zak,ak->Z", _series_cov(P, cr_vec(0, HOL), "d"), Linv)
    div_inf = div_inf + einsum("Zak,ak->Z", _series_cov(P, cr_vec(0, ANTI), "d"), Linv)
    div_0 = einsum("Zak,ak->Z", _series_cov(P, cr_vec(1, HOL), "d"), Linv)
    div_0 = div_0 + einsum("Zak,ak->Z", _series_cov(P, cr_vec(1, ANTI), "d"), Linv)

    S = GArray.zeros((2 * n + 1, 2 * n + 1))
    for a, b in itertools.product(range(n), repeat=2):
        S[1 + a, 1 + b] = Phi_S[a, b]
    S_full = S + conj_full(S, ab)
    phi_up_h = einsum("xy,ax,by->ab", restrict(S_full, ab, (ANTI, ANTI)), Linv, Linv)
    phi_up_a = einsum("xy,ax,by->ab", restrict(S_full, ab, (HOL, HOL)), Linv, Linv)
    phi_e = scalar_series(einsum("ab,Zab->Z", phi_up_h, e_hh) + einsum("ab,Zab->Z", phi_up_a, e_aa))
    a_e = scalar_series(
        einsum("ab,Zab->Z", _raised_A(P, HOL), e_hh) + einsum("ab,Zab->Z", _raised_A(P, ANTI), e_aa)
    )

    f1 = (
        euler(4 * n + 4, e_inf_inf)
        - euler(4, e_00).scale(4)
        - euler(2, tr).scale(8)
        + scalar_series(div_inf).shift(1).scale(8)
        + euler(2, phi_e).shift(2).scale(4)
    )
    f2 = euler(2 * n + 4, e_inf_0) + scalar_series(div_0).shift(1).scale(4) + a_e.shift(2).scale(4)

    e_inf_h = RhoSeries(cr_vec(0, HOL))
    e_0_h = RhoSeries(cr_vec(1, HOL))
    div_hh = einsum("Zabk,bk->Za", _series_cov(P, e_hh, "dd"), Linv)
    n_term = einsum("axy,Zxy->Za", _half_raised_N(P, HOL), e_aa)
    f3 = (
        euler(2 * n + 3, e_inf_h).scale(2)
        + RhoSeries(div_hh).shift(1).scale(4)
        - e_0_h.scale(I * 4)
        + RhoSeries(n_term).shift(1).scale(4)
    )
    return f1, f2, f3


def _assert_order_forms(ec: EinsteinComputation, P: PseudohermitianData, Phi_S: GArray, mm: int, label: str) -> None:
    f1, f2, f3 = order_forms(ec, P, Phi_S)
    for name, f, k in (("first", f1, mm + 3), ("second", f2, mm + 3), ("third", f3, mm + 2)):
        if not f.is_O(k):
            raise BianchiAssertFailed(
                f"{name} order-counting Bianchi form is not O(rho^{k}) after {label} (valuation {f.valuation()})"
            )


# scaling law


def run_pipeline(a: CRFrameAlgebra, trunc: int | None = None) -> tuple[PseudohermitianData, ObstructionResult]:
    P = tw_connection(a)
    _, result = solve(P, trunc=trunc)
    return P, result


def scaling_law(a: CRFrameAlgebra, lam: Any, trunc: int | None = None) -> CheckReport:
    """Two full runs, on ``a`` and on ``rescale(a, lam)``: expect ``O_hat = lam^{-n} O``."""
    lam_q = as_mpq(lam)
    _, base = run_pipeline(a, trunc)
    _, scaled = run_pipeline(rescale(a, lam_q), trunc)
    expected = base.O.data.scale(Scalar(lam_q ** (-a.n)))
    return CheckReport.compare(
        "scaling_law", scaled.O.data, expected, details={"lambda": Scalar(lam_q), "n": a.n}
    )
