"""Pass/fail records for exact identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .garray import GArray
from .scalar import Scalar

__all__ = ["CheckReport"]


@dataclass
class CheckReport:
    """Outcome of one identity: ``ok`` plus the nonzero residual entries."""

    name: str
    ok: bool
    witnesses: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def compare(cls, name: str, lhs: GArray, rhs: GArray, details: dict[str, Any] | None = None) -> "CheckReport":
        diff = lhs - rhs
        wit = [f"{list(idx)}: {val}" for idx, val in diff.nonzero_entries()]
        return cls(name, not wit, wit, dict(details or {}))

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "ok": self.ok,
            "witnesses": list(self.witnesses),
            "details": {k: _jsonable(v) for k, v in sorted(self.details.items())},
        }


def _jsonable(v: Any) -> Any:
    if isinstance(v, Scalar):
        return v.to_json()
    if isinstance(v, GArray):
        return {",".join(map(str, idx)): val.to_json() for idx, val in v.nonzero_entries()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items())}
    return v
