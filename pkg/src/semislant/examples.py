"""Registry of the worked semi-slant submersions on the standard Sasakian charts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .contact import CORRECTED, standard_sasakian
from .diffgeo import MetricField
from .submersion import AffineMap, SubmersionSetup

# Codomain metric choices. With the Sasakian domain metric the linear maps are
# isometric on horizontal vectors exactly when the target carries 1/4 of the
# Euclidean metric; plain Euclidean is kept to reproduce the literal claim.
QUARTER = "quarter"
EUCLIDEAN = "euclidean"
CODOMAIN_METRICS = (QUARTER, EUCLIDEAN)

R2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class ExampleInfo:
    id: str
    n: int
    m2: int
    needs_alpha: bool
    description: str
    expected_theta: Optional[Callable[[float], float]]
    dim_d1: int
    dim_d2: int
    builder: Callable[[Optional[float]], np.ndarray]


def _ex6_3(alpha):
    A = np.zeros((5, 9))
    A[0, 0] = A[0, 1] = R2
    A[1, 4] = A[1, 5] = R2
    A[2, 2], A[2, 3] = np.sin(alpha), -np.cos(alpha)
    A[3, 7] = 1.0
    A[4, 8] = 1.0
    return A


def _ex6_4(_alpha):
    A = np.zeros((3, 7))
    A[0, 1], A[0, 5] = R2, -R2
    A[1, 4] = 1.0
    A[2, 6] = 1.0
    return A


def _ex6_5(alpha):
    A = np.zeros((3, 9))
    A[0, 2], A[0, 3] = np.sin(alpha), -np.cos(alpha)
    A[1, 7] = 1.0
    A[2, 8] = 1.0
    return A


def _ex6_6(_alpha):
    A = np.zeros((7, 13))
    A[0, 0], A[0, 1] = R2, -R2
    A[1, 6], A[1, 7] = R2, -R2
    A[2, 2] = A[2, 3] = R2
    A[3, 8] = A[3, 9] = R2
    A[4, 4], A[4, 5] = R2, -R2
    A[5, 10] = 1.0
    A[6, 12] = 1.0
    return A


EXAMPLES: dict[str, ExampleInfo] = {
    "ex6_3": ExampleInfo("ex6_3", 4, 5, True,
                         "R^9 -> R^5, ((x1+x2)/√2, (y1+y2)/√2, sinα x3 − cosα x4, y4, z)",
                         lambda a: a, 2, 2, _ex6_3),
    "ex6_4": ExampleInfo("ex6_4", 3, 3, False, "R^7 -> R^3, ((x2−y3)/√2, y2, z)",
                         lambda a: np.pi / 4, 2, 2, _ex6_4),
    "ex6_5": ExampleInfo("ex6_5", 4, 3, True, "R^9 -> R^3, (sinα x3 − cosα x4, y4, z)",
                         lambda a: a, 4, 2, _ex6_5),
    "ex6_6": ExampleInfo("ex6_6", 6, 7, False,
                         "R^13 -> R^7, ((x1−x2)/√2, (y1−y2)/√2, (x3+x4)/√2, (y3+y4)/√2, (x5−x6)/√2, y5, z)",
                         lambda a: np.pi / 4, 4, 2, _ex6_6),
}


def example_ids() -> list[str]:
    return list(EXAMPLES)


def codomain_metric(kind: str, m2: int) -> MetricField:
    if kind == QUARTER:
        return MetricField.euclidean(m2, 0.25)
    if kind == EUCLIDEAN:
        return MetricField.euclidean(m2)
    raise ValueError(f"unknown codomain metric {kind!r}; expected one of {CODOMAIN_METRICS}")


def registry_example(example_id: str, alpha: Optional[float] = None, variant: str = CORRECTED,
                     codomain: str = QUARTER) -> SubmersionSetup:
    """Build one of the registered submersions with the standard Sasakian domain."""
    if example_id not in EXAMPLES:
        raise KeyError(f"unknown example {example_id!r}; valid ids: {', '.join(EXAMPLES)}")
    info = EXAMPLES[example_id]
    if info.needs_alpha:
        if alpha is None:
            raise ValueError(f"{example_id} requires alpha in (0, π/2)")
        if not 0.0 < alpha < np.pi / 2:
            raise ValueError(f"alpha must lie in (0, π/2), got {alpha}")
    structure = standard_sasakian(info.n, variant)
    A = info.builder(alpha)
    fmap = AffineMap(A, name=example_id)
    return SubmersionSetup(fmap, structure, codomain_metric(codomain, info.m2), name=example_id)


def affine_setup(matrix, n: int, offset=None, variant: str = CORRECTED, codomain: str = QUARTER,
                 name: str = "custom") -> SubmersionSetup:
    """Setup for a user-supplied affine map out of the standard Sasakian chart of dimension 2n+1."""
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[1] != 2 * n + 1:
        raise ValueError(f"matrix must have {2 * n + 1} columns for n={n}")
    fmap = AffineMap(A, offset, name=name)
    return SubmersionSetup(fmap, standard_sasakian(n, variant), codomain_metric(codomain, A.shape[0]), name=name)
