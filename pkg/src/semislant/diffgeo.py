"""Coordinate-chart differential geometry by central differences.

Everything here works on a single chart: points, tangent vectors and
covectors are plain ``numpy`` arrays of coordinate components, and fields
are pure functions of the point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

Array = np.ndarray


class DegenerateMetricError(ValueError):
    """Raised when a metric matrix is singular or not positive definite."""


@dataclass(frozen=True)
class FDConfig:
    """Step size and tolerances shared by every numerical check."""

    step: float = 1e-5
    algebraic_tol: float = 1e-9
    derivative_tol: float = 1e-4
    rank_threshold: float = 1e-8
    eigen_cluster_tol: float = 1e-6

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        for name in ("algebraic_tol", "derivative_tol", "eigen_cluster_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.rank_threshold < 1:
            raise ValueError("rank_threshold must lie in (0, 1)")


def as_point(coords, dim: Optional[int] = None) -> Array:
    """Validate chart coordinates and return them as a float array."""
    p = np.asarray(coords, dtype=float)
    if p.ndim != 1:
        raise ValueError("a point is a 1-d coordinate vector")
    if dim is not None and p.shape[0] != dim:
        raise ValueError(f"expected {dim} coordinates, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


class MetricField:
    """Point-dependent symmetric positive-definite bilinear form."""

    def __init__(self, evaluator: Callable[[Array], Array], dim: int, name: str = "g"):
        self.evaluator = evaluator
        self.dim = dim
        self.name = name

    def __call__(self, p: Array) -> Array:
        return np.asarray(self.evaluator(p), dtype=float)

    def inner(self, p: Array, u: Array, v: Array) -> float:
        return float(u @ self(p) @ v)

    @classmethod
    def constant(cls, matrix, name: str = "g") -> "MetricField":
        m = np.array(matrix, dtype=float)
        m.setflags(write=False)
        return cls(lambda p: m, m.shape[0], name)

    @classmethod
    def euclidean(cls, dim: int, scale: float = 1.0) -> "MetricField":
        return cls.constant(scale * np.eye(dim), name="euclidean" if scale == 1.0 else f"{scale:g}*euclidean")


class VectorField:
    """Tangent-vector field, optionally with an analytic Jacobian."""

    def __init__(self, evaluator: Callable[[Array], Array],
                 jacobian: Optional[Callable[[Array], Array]] = None, name: str = ""):
        self.evaluator = evaluator
        self.jacobian = jacobian
        self.name = name

    def __call__(self, p: Array) -> Array:
        return np.asarray(self.evaluator(p), dtype=float)

    @classmethod
    def constant(cls, vector, name: str = "") -> "VectorField":
        v = np.array(vector, dtype=float)
        v.setflags(write=False)
        return cls(lambda p: v, lambda p: np.zeros((v.size, v.size)), name)

    def __repr__(self):
        return f"VectorField({self.name or '?'})"


class CovectorField:
    def __init__(self, evaluator: Callable[[Array], Array], name: str = ""):
        self.evaluator = evaluator
        self.name = name

    def __call__(self, p: Array) -> Array:
        return np.asarray(self.evaluator(p), dtype=float)


class EndomorphismField:
    """(1,1)-tensor field given by its matrix acting on coordinate vectors."""

    def __init__(self, evaluator: Callable[[Array], Array], name: str = ""):
        self.evaluator = evaluator
        self.name = name

    def __call__(self, p: Array) -> Array:
        return np.asarray(self.evaluator(p), dtype=float)


FieldLike = Union[VectorField, Callable[[Array], Array], Array, Sequence[float]]


def as_field(f: FieldLike) -> VectorField:
    """Coerce a field, a bare callable or a constant vector into a VectorField."""
    if isinstance(f, VectorField):
        return f
    if callable(f):
        return VectorField(f)
    return VectorField.constant(f)


def value_at(f: FieldLike, p: Array) -> Array:
    if isinstance(f, (VectorField,)) or callable(f):
        return np.asarray(f(p), dtype=float)
    return np.asarray(f, dtype=float)


def directional_derivative(f: Callable[[Array], Array], p: Array, direction: Array, step: float):
    """Central difference of ``f`` along ``direction`` (scaled to unit length)."""
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        return np.zeros_like(np.asarray(f(p), dtype=float))
    u = direction / norm
    fp = np.asarray(f(p + step * u), dtype=float)
    fm = np.asarray(f(p - step * u), dtype=float)
    return (fp - fm) * (norm / (2.0 * step))


def fd_jacobian(f: Callable[[Array], Array], p: Array, step: float) -> Array:
    """Jacobian ``d f^a / d x^i`` by central differences, shape (len(f), len(p))."""
    cols = []
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = step
        cols.append((np.asarray(f(p + e), dtype=float) - np.asarray(f(p - e), dtype=float)) / (2 * step))
    return np.stack(cols, axis=-1)


def field_derivative(Y: FieldLike, p: Array, direction: Array, cfg: FDConfig) -> Array:
    """(∂_X Y)(p) for X(p) = direction; uses the analytic Jacobian when present."""
    if isinstance(Y, VectorField) and Y.jacobian is not None:
        return np.asarray(Y.jacobian(p), dtype=float) @ direction
    if not (isinstance(Y, VectorField) or callable(Y)):
        return np.zeros(len(direction))
    return directional_derivative(Y, p, direction, cfg.step)


def check_metric_matrix(G: Array, tol: float = 1e-9) -> None:
    if not np.allclose(G, G.T, atol=tol * max(1.0, np.abs(G).max())):
        raise DegenerateMetricError("metric matrix is not symmetric")
    w = np.linalg.eigvalsh(0.5 * (G + G.T))
    if w[0] <= tol * max(1.0, abs(w[-1])):
        raise DegenerateMetricError(f"degenerate metric: smallest eigenvalue {w[0]:.3e}")


def christoffel(g: MetricField, p: Array, cfg: FDConfig) -> Array:
    """Levi-Civita symbols ``Gamma[k, i, j]`` of ``g`` at ``p``.

    Metric derivatives are central differences with ``cfg.step``; the result
    is symmetrized in (i, j) so the symmetry holds exactly.
    """
    p = np.asarray(p, dtype=float)
    G = g(p)
    check_metric_matrix(G, cfg.algebraic_tol)
    n = p.size
    dG = np.empty((n, n, n))  # dG[l, i, j] = d_l g_ij
    for l in range(n):
        e = np.zeros(n)
        e[l] = cfg.step
        dG[l] = (g(p + e) - g(p - e)) / (2 * cfg.step)
    # first kind: Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    first = 0.5 * (np.einsum("ijl->lij", dG) + np.einsum("jil->lij", dG) - dG)
    gamma = np.einsum("kl,lij->kij", np.linalg.inv(G), first)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def contract_christoffel(gamma: Array, X: Array, Y: Array) -> Array:
    return np.einsum("kij,i,j->k", gamma, X, Y)


def covariant_derivative(g: MetricField, X: FieldLike, Y: FieldLike, p: Array, cfg: FDConfig,
                         gamma: Optional[Array] = None) -> Array:
    """(∇_X Y)(p) for the Levi-Civita connection of ``g``.

    Only X(p) enters; Y must be a genuine field because it is differentiated.
    """
    p = np.asarray(p, dtype=float)
    Xp = value_at(X, p)
    Yp = value_at(Y, p)
    if gamma is None:
        gamma = christoffel(g, p, cfg)
    return field_derivative(Y, p, Xp, cfg) + contract_christoffel(gamma, Xp, Yp)


def lie_bracket(X: FieldLike, Y: FieldLike, p: Array, cfg: FDConfig) -> Array:
    """[X, Y](p) = ∂_X Y − ∂_Y X."""
    p = np.asarray(p, dtype=float)
    Xp, Yp = value_at(X, p), value_at(Y, p)
    return field_derivative(Y, p, Xp, cfg) - field_derivative(X, p, Yp, cfg)


def exterior_derivative_1form(eta: Callable[[Array], Array], X: FieldLike, Y: FieldLike,
                              p: Array, cfg: FDConfig) -> float:
    """dη(X, Y) = X(η(Y)) − Y(η(X)) − η([X, Y]), without a 1/2 factor."""
    p = np.asarray(p, dtype=float)
    Xf, Yf = as_field(X), as_field(Y)
    eta_y = lambda q: float(np.dot(eta(q), Yf(q)))
    eta_x = lambda q: float(np.dot(eta(q), Xf(q)))
    term1 = directional_derivative(eta_y, p, Xf(p), cfg.step)
    term2 = directional_derivative(eta_x, p, Yf(p), cfg.step)
    return float(term1 - term2 - np.dot(eta(p), lie_bracket(Xf, Yf, p, cfg)))


def orthonormalize(basis, G: Array, cfg: FDConfig, scale: Optional[float] = None) -> Array:
    """Modified Gram–Schmidt in the ``G`` inner product.

    Returns an array whose rows are G-orthonormal and span the input.  A
    vector whose remaining G-norm falls below ``rank_threshold`` times
    ``scale`` (default: the largest input norm) is dropped as dependent.
    """
    vectors = [np.asarray(v, dtype=float) for v in basis]
    if not vectors:
        return np.zeros((0, G.shape[0]))
    if scale is None:
        scale = max(np.sqrt(max(v @ G @ v, 0.0)) for v in vectors)
    if scale == 0.0:
        return np.zeros((0, G.shape[0]))
    out: list[Array] = []
    for v in vectors:
        w = v.copy()
        for _ in range(2):  # second sweep restores orthogonality lost to rounding
            for q in out:
                w = w - (q @ G @ w) * q
        nrm = np.sqrt(max(w @ G @ w, 0.0))
        if nrm > cfg.rank_threshold * scale:
            out.append(w / nrm)
    if not out:
        return np.zeros((0, G.shape[0]))
    return np.array(out)


def projector(basis: Array, G: Array) -> Array:
    """G-orthogonal projector onto the span of G-orthonormal rows of ``basis``."""
    if basis.shape[0] == 0:
        return np.zeros((G.shape[0], G.shape[0]))
    return basis.T @ basis @ G
