"""Exact ACH-Einstein expansions over left-invariant CR structures.

The pipeline runs from structure constants of a CR frame algebra through the
Tanaka-Webster data, the seeded ACH metric and the order-by-order Einstein
solver to the obstruction tensor ``O``, the log-term coefficients ``E`` and
the scalars ``u`` and ``v``.  All arithmetic is exact over ``Q(i)``.
"""

from .errors import AchError, ParseError, SolverError, ValidationError
from .frame import (
    CRFrameAlgebra,
    change_frame,
    deform,
    heisenberg,
    rescale,
    su2,
    twisted_heisenberg,
    validate,
)
from .pseudohermitian import PseudohermitianData, check_identities, tw_connection
from .registry import get_case, registry, resolve_builtin
from .scalar import Scalar
from .solver import ObstructionResult, run_pipeline, seed, solve
from .sphere import closed_form, leading_recursion, variation_formula_check

__version__ = "0.1.0"

__all__ = [
    "AchError",
    "ParseError",
    "SolverError",
    "ValidationError",
    "CRFrameAlgebra",
    "change_frame",
    "deform",
    "heisenberg",
    "rescale",
    "su2",
    "twisted_heisenberg",
    "validate",
    "PseudohermitianData",
    "check_identities",
    "tw_connection",
    "get_case",
    "registry",
    "resolve_builtin",
    "Scalar",
    "ObstructionResult",
    "run_pipeline",
    "seed",
    "solve",
    "closed_form",
    "leading_recursion",
    "variation_formula_check",
    "__version__",
]
