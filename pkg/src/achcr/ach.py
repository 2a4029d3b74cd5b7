"""Normal-form ACH metrics as rho-series and their exact Einstein tensors.

Index positions follow the ACH alphabet ``[inf, T, Z, Zb]``; a CR position
``i`` sits at ``i + 1``.  Components are taken in the frame
``E_inf = rho d/drho, E_0 = rho^2 T, E_a = rho Z_a``, whose weights are
``w = (1, 2, 1, 1)``.

The extended connection acts by
``nabla_inf S = (rho d/drho - #)S`` and ``nabla_K S = rho^{w_K} nabla_k S``
for tangential ``K`` (``#`` is the weight sum of lower minus upper slots).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from gmpy2 import mpq

from .errors import NormalFormViolation, TruncationTooSmall
from .garray import GArray, einsum
from .pseudohermitian import PseudohermitianData, _nn_contraction, cov_deriv
from .scalar import I, Scalar
from .series import RhoSeries, invert_metric_series, series_mul
from .tensor import ANTI, HOL, Alphabet, conj_full, restrict

__all__ = [
    "PhiExpansion",
    "ACHMetric",
    "ACHGeometry",
    "EinsteinComputation",
    "assemble",
    "embed",
    "extended_derivative",
    "christoffel",
    "ricci",
    "einstein",
    "rbar_reference",
]


def embed(cr: GArray, ab: Alphabet) -> GArray:
    """Place a CR-alphabet array (optionally with a leading degree axis) into the ACH alphabet."""
    return _embed(cr, ab.size, lead=0)


def _embed(cr: GArray, size: int, lead: int) -> GArray:
    shape = cr.shape[:lead] + (size,) * (cr.ndim - lead)
    out = GArray.zeros(shape)
    key = tuple([slice(None)] * lead + [slice(1, None)] * (cr.ndim - lead))
    out[key] = cr
    return out


@dataclass(frozen=True)
class PhiExpansion:
    """The perturbation ``phi_ij`` as a real symmetric series over the CR alphabet."""

    series: RhoSeries

    def __post_init__(self) -> None:
        s = self.series
        if s.trunc == 0:
            return
        if not s.data[0].is_zero():
            raise NormalFormViolation("phi must vanish at degree 0")
        if s.data != s.data.transpose(0, 2, 1):
            raise NormalFormViolation("phi must be symmetric")
        size = s.shape[0]
        n = (size - 1) // 2
        ab = Alphabet(n)
        if conj_full(s.data, ab, axes=(1, 2)) != s.data:
            raise NormalFormViolation("phi must be real (conjugation of indices conjugates entries)")

    @classmethod
    def zero(cls, n: int, trunc: int) -> "PhiExpansion":
        return cls(RhoSeries.zeros(trunc, (2 * n + 1, 2 * n + 1)))

    @property
    def trunc(self) -> int:
        return self.series.trunc

    def component(self, i: int, j: int) -> RhoSeries:
        return self.series[i, j]


@dataclass(frozen=True)
class ACHMetric:
    g: RhoSeries
    n: int

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.n, transverse=True)

    @property
    def trunc(self) -> int:
        return self.g.trunc


def assemble(P: PseudohermitianData, phi: PhiExpansion | RhoSeries) -> ACHMetric:
    """Normal-form metric ``4 drho^2/rho^2 + (1+phi00) theta^2/rho^4 + ...``."""
    series = phi.series if isinstance(phi, PhiExpansion) else phi
    if not isinstance(phi, PhiExpansion):
        PhiExpansion(series)
    n = P.n
    ab = Alphabet(n, transverse=True)
    t = series.trunc
    g = GArray.zeros((t, ab.size, ab.size))
    g[(slice(None), slice(1, None), slice(1, None))] = series.data
    if t:
        g.add_at((0, 0, 0), 4)
        g.add_at((0, 1, 1), 1)
        base = g[0]
        base[1:, 1:] = base[1:, 1:] + P.L
        g[0] = base
    return ACHMetric(RhoSeries(g), n)


class ACHGeometry:
    """Truncation-dependent data of the extended connection over a fixed structure."""

    def __init__(self, P: PseudohermitianData, trunc: int) -> None:
        if trunc < 1:
            raise TruncationTooSmall("truncation must be positive")
        self.P = P
        self.n = P.n
        self.trunc = trunc
        self.ab = Alphabet(P.n, transverse=True)
        self.size = self.ab.size
        self.w = self.ab.weights
        self.gamma = embed(P.gamma, self.ab)
        self.tor = embed(P.torsion, self.ab)

    @cached_property
    def torsion_series(self) -> RhoSeries:
        """``Thetabar_{IJ}^K = rho^{w_I + w_J - w_K} Tor[i, j, k]``."""
        out = GArray.zeros((self.trunc, self.size, self.size, self.size))
        for (i, j, k), val in self.tor.nonzero_entries():
            e = self.w[i] + self.w[j] - self.w[k]
            if e < 0:
                raise NormalFormViolation("negative rho power in the extended torsion")
            if e < self.trunc:
                out[e, i, j, k] = val
        return RhoSeries(out)

    @cached_property
    def rbar(self) -> RhoSeries:
        """Ricci tensor of the extended connection, ``Rbar_{IJ} = rho^{w_I+w_J} Curv[k, j, i, k]``."""
        curv = _embed(self.P.curv, self.size, 0)
        tr = einsum("kjik->ij", curv)
        out = GArray.zeros((self.trunc, self.size, self.size))
        for (i, j), val in tr.nonzero_entries():
            e = self.w[i] + self.w[j]
            if e < self.trunc:
                out[e, i, j] = val
        return RhoSeries(out)

    def weight_factor(self, variance: str) -> np.ndarray:
        """``d - #`` as an object array of shape ``(trunc, size, ..., size)``."""
        r = len(variance)
        w = np.array(self.w, dtype=np.int64)
        ws = np.zeros((self.size,) * r, dtype=np.int64)
        for s, v in enumerate(variance):
            shape = [1] * r
            shape[s] = self.size
            ws = ws + (1 if v == "d" else -1) * w.reshape(shape)
        d = np.arange(self.trunc, dtype=np.int64).reshape((self.trunc,) + (1,) * r)
        fac = d - ws
        out = np.empty(fac.shape, dtype=object)
        flat_in = fac.ravel()
        flat_out = out.ravel()
        for idx in range(flat_in.size):
            flat_out[idx] = mpq(int(flat_in[idx]))
        return out

    def derivative(self, s: RhoSeries, variance: str | None = None) -> RhoSeries:
        """``nablabar S`` with the derivative slot appended last."""
        r = len(s.shape)
        variance = variance or "d" * r
        t = s.trunc
        if t != self.trunc:
            s = s.truncate(self.trunc) if t > self.trunc else s
            t = s.trunc
        conn = _batched_cov(self.gamma, s.data, variance)
        out = GArray.zeros(s.data.shape + (self.size,))
        for k in range(1, self.size):
            wk = self.w[k]
            if wk < t:
                key_out = (slice(wk, None),) + (slice(None),) * r + (k,)
                key_in = (slice(None, t - wk),) + (slice(None),) * r + (k,)
                out[key_out] = conn[key_in]
        fac = self.weight_factor(variance)[:t]
        key0 = (slice(None),) * (r + 1) + (0,)
        out[key0] = s.data * fac
        return RhoSeries(out)


def _batched_cov(gamma: GArray, s: GArray, variance: str) -> GArray:
    """Connection part of the derivative for every degree slice at once."""
    r = s.ndim - 1
    size = gamma.shape[0]
    letters = "abcdefgh"[:r]
    out = GArray.zeros(s.shape + (size,))
    for i, v in enumerate(variance):
        src = "Z" + letters[:i] + "l" + letters[i + 1 :]
        if v == "d":
            out = out - einsum(f"k{letters[i]}l,{src}->Z{letters}k", gamma, s)
        else:
            out = out + einsum(f"kl{letters[i]},{src}->Z{letters}k", gamma, s)
    return out


def extended_derivative(geo: ACHGeometry, s: RhoSeries, variance: str | None = None) -> RhoSeries:
    return geo.derivative(s, variance)


class EinsteinComputation:
    """Christoffel difference, Ricci and Einstein tensors of one metric, all exact."""

    def __init__(self, geo: ACHGeometry, metric: ACHMetric) -> None:
        if metric.trunc != geo.trunc:
            raise TruncationTooSmall("metric and geometry truncations differ")
        self.geo = geo
        self.metric = metric
        self.g = metric.g

    @cached_property
    def ginv(self) -> RhoSeries:
        return invert_metric_series(self.g)

    @cached_property
    def theta_low(self) -> RhoSeries:
        """``Thetabar_{IJK} = g_{KL} Thetabar_{IJ}^L``."""
        return series_mul("kl,ijl->ijk", self.g, self.geo.torsion_series)

    @cached_property
    def D_low(self) -> RhoSeries:
        """``D_{IKJ}``."""
        dg = self.geo.derivative(self.g, "dd")  # [I, J, K] = nablabar_K g_IJ
        tl = self.theta_low
        half = Scalar(mpq(1, 2))
        acc = dg.reindex("jki->ikj") + dg - dg.reindex("ijk->ikj")
        acc = acc + tl + tl.reindex("jki->ikj") + tl.reindex("ijk->ikj")
        return acc.scale(half)

    @cached_property
    def D_mixed(self) -> RhoSeries:
        """``D_I^K_J = g^{KL} D_{ILJ}`` stored as ``[I, K, J]``."""
        return series_mul("kl,ilj->ikj", self.ginv, self.D_low)

    @cached_property
    def D_trace(self) -> RhoSeries:
        """``D_I^K_K``."""
        return self.D_mixed.reindex("ikk->i")

    @cached_property
    def ricci(self) -> RhoSeries:
        geo = self.geo
        dm = self.D_mixed
        ddm = geo.derivative(dm, "dud")  # [I, K, J, M] = nablabar_M D_I^K_J
        t1 = ddm.reindex("ikjk->ij")
        t2 = geo.derivative(self.D_trace, "d")  # [I, J] = nablabar_J D_I^K_K
        t3 = series_mul("ilk,jkl->ij", dm, dm)
        t4 = series_mul("ilj,l->ij", dm, self.D_trace)
        return geo.rbar + t1 - t2 - t3 + t4

    @cached_property
    def einstein(self) -> RhoSeries:
        return self.ricci + self.g.scale(Scalar(mpq(self.geo.n + 2, 2)))

    # contracted Bianchi identity

    @cached_property
    def bianchi(self) -> RhoSeries:
        """``g^{IJ} nabla^g_K Ein_IJ - 2 g^{IJ} nabla^g_I Ein_JK`` with ``nabla^g = nablabar + D``."""
        ein = self.einstein
        dm = self.D_mixed
        de = self.geo.derivative(ein, "dd")  # [I, J, K] = nablabar_K Ein_IJ
        # (nabla^g_K Ein)_{IJ} = de[I,J,K] - D_I^L_K Ein_LJ - D_J^L_K Ein_IL
        corr = series_mul("ilk,lj->ijk", dm, ein)
        ng = de - corr - corr.reindex("jik->ijk")
        term1 = series_mul("ij,ijk->k", self.ginv, ng)
        term2 = series_mul("ij,jki->k", self.ginv, ng)
        return term1 - term2.scale(2)

    @cached_property
    def bianchi_torsion_form(self) -> RhoSeries:
        """The same identity written through ``nablabar``, ``D`` and the torsion."""
        ein = self.einstein
        de = self.geo.derivative(ein, "dd")
        x = de - de.reindex("jki->ijk").scale(2)
        x = x + series_mul("ilj,kl->ijk", self.D_mixed, ein).scale(2)
        x = x - series_mul("ikl,jl->ijk", self.geo.torsion_series, ein).scale(2)
        return series_mul("ij,ijk->k", self.ginv, x)


def christoffel(geo: ACHGeometry, metric: ACHMetric) -> tuple[RhoSeries, RhoSeries]:
    ec = EinsteinComputation(geo, metric)
    return ec.D_low, ec.D_mixed


def ricci(geo: ACHGeometry, metric: ACHMetric) -> RhoSeries:
    return EinsteinComputation(geo, metric).ricci


def einstein(geo: ACHGeometry, metric: ACHMetric) -> RhoSeries:
    return EinsteinComputation(geo, metric).einstein


def rbar_reference(P: PseudohermitianData, trunc: int) -> RhoSeries:
    """Closed-form blocks of the extended Ricci tensor.

    ``Rbar_{a bbar} = rho^2 (R_{a bbar} - N_{a s t} N_{bbar}^{t s})`` and
    ``Rbar_{ab} = rho^2 (i(n-1) A_{ab} + N_{g b a,}^g)`` with conjugates;
    every other block is left zero.
    """
    ab = P.alphabet
    n = P.n
    ric = restrict(P.ricci.data, ab, (HOL, ANTI))
    nn = _nn_contraction(P)
    rab_bar = ric - nn
    A = restrict(P.A.data, ab, (HOL, HOL))
    Nh = restrict(P.N_low.data, ab, (HOL, HOL, HOL))
    dN = cov_deriv(P.gamma, Nh, "ddd")  # [g, b, a, k]
    div = einsum("gbak,gk->ab", dN, P.Linv)
    rab = A.scale(I * (n - 1)) + div
    cr = rab_bar + conj_full(rab_bar, ab) + rab + conj_full(rab, ab)
    ach = Alphabet(n, transverse=True)
    out = GArray.zeros((trunc, ach.size, ach.size))
    if trunc > 2:
        out[2] = embed(cr, ach)
    return RhoSeries(out)
