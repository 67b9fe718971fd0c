"""Structured findings shared by every verification routine.

A check never raises on an identity failure; it returns a :class:`CheckEntry`
carrying per-point residuals.  The status is derived from the residuals,
the tolerance and the severity attached to each offending point:

* ``pass``    no point exceeds the tolerance;
* ``fail``    some point with severity ``fail`` exceeds it;
* ``finding`` only points with severity ``finding`` exceed it (documented
  slice dependence or a printed-formula discrepancy).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

PASS, FAIL, FINDING = "pass", "fail", "finding"


@dataclass(frozen=True)
class CheckSpec:
    id: str
    anchor: str
    description: str
    group: str


_SPECS: dict[str, CheckSpec] = {}


def register(id: str, anchor: str, description: str, group: str) -> CheckSpec:
    if id in _SPECS:
        raise ValueError(f"duplicate check id {id!r}")
    spec = CheckSpec(id, anchor, description, group)
    _SPECS[id] = spec
    return spec


def spec_for(id: str) -> CheckSpec:
    return _SPECS[id]


def all_specs() -> list[CheckSpec]:
    return list(_SPECS.values())


@dataclass
class CheckEntry:
    id: str
    anchor: str
    points_evaluated: int
    max_residual: float
    tolerance: float
    status: str
    per_point_failures: list[dict] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "anchor": self.anchor,
            "points_evaluated": self.points_evaluated,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "status": self.status,
        }
        if self.per_point_failures:
            d["per_point_failures"] = self.per_point_failures
        if self.details:
            d["details"] = self.details
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckEntry":
        return cls(
            id=d["id"],
            anchor=d["anchor"],
            points_evaluated=d["points_evaluated"],
            max_residual=d["max_residual"],
            tolerance=d["tolerance"],
            status=d["status"],
            per_point_failures=d.get("per_point_failures", []),
            details=d.get("details", {}),
        )


def _clean(x: float) -> float:
    x = float(x)
    return x if np.isfinite(x) else float("inf")


def entry_from_residuals(check_id: str, points: Sequence[np.ndarray], residuals: Sequence[float],
                         tol: float, severity: Sequence[str] | str = FAIL,
                         details: Optional[dict] = None, max_listed: int = 20) -> CheckEntry:
    """Build an entry from one residual per point.

    ``severity`` gives, per point, the status an exceedance at that point
    contributes (``fail`` or ``finding``).
    """
    spec = spec_for(check_id)
    residuals = [_clean(r) for r in residuals]
    if isinstance(severity, str):
        severity = [severity] * len(residuals)
    failures = []
    status = PASS
    for i, (p, r, sev) in enumerate(zip(points, residuals, severity)):
        if not r < tol:
            failures.append({"index": i, "point": [float(c) for c in p], "residual": r, "severity": sev})
            if sev == FAIL:
                status = FAIL
            elif status == PASS:
                status = FINDING
    return CheckEntry(
        id=check_id,
        anchor=spec.anchor,
        points_evaluated=len(residuals),
        max_residual=max(residuals) if residuals else 0.0,
        tolerance=tol,
        status=status,
        per_point_failures=failures[:max_listed],
        details=dict(details or {}),
    )
