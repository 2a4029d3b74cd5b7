"""Shared strategies and cached pipeline runs."""

from __future__ import annotations

import functools
import random
from fractions import Fraction

from hypothesis import strategies as st

from achcr.ach import PhiExpansion
from achcr.garray import GArray
from achcr.registry import get_case
from achcr.scalar import Scalar
from achcr.series import RhoSeries
from achcr.solver import run_pipeline
from achcr.tensor import Alphabet, conj_full

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=6)
scalars = st.builds(Scalar, small_q, small_q)
nonzero_scalars = scalars.filter(lambda s: not s.is_zero())


@functools.lru_cache(maxsize=None)
def pipeline(name: str):
    """``(P, result)`` for a registry case, computed once per session."""
    return run_pipeline(get_case(name).algebra)


def random_phi(rng: random.Random, n: int, trunc: int, density: float = 0.5) -> PhiExpansion:
    """Random real symmetric perturbation vanishing at degree 0."""
    size = 2 * n + 1
    x = GArray.zeros((trunc, size, size))
    for d in range(1, trunc):
        for i in range(size):
            for j in range(size):
                if rng.random() < density:
                    x[d, i, j] = Scalar(
                        Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                        Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                    )
    s = x + x.transpose(0, 2, 1)
    s = s + conj_full(s, Alphabet(n), axes=(1, 2))
    return PhiExpansion(RhoSeries(s))
