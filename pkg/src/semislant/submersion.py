"""Smooth maps between charts, vertical/horizontal splittings and O'Neill tensors."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .checks import FAIL, FINDING, CheckEntry, entry_from_residuals, register
from .contact import AlmostContactStructure
from .diffgeo import (
    FDConfig,
    FieldLike,
    MetricField,
    VectorField,
    as_field,
    as_point,
    christoffel,
    contract_christoffel,
    covariant_derivative,
    directional_derivative,
    fd_jacobian,
    lie_bracket,
    orthonormalize,
    projector,
    value_at,
)

register("submersion.rank", "rank π* = m₂", "Jacobian has rank m2 and the fibre dimension is m1 − m2",
         "submersion")
register("submersion.isometry", "g₂(π*X₁, π*X₂)=g₁(X₁,X₂)",
         "π* is an isometry on horizontal vectors", "submersion")
register("submersion.xi_horizontal", "ξ ⊥ ker π*", "ξ is g1-orthogonal to the fibre",
         "submersion")
register("oneill.T_symmetric", "𝒯_UV=𝒯_VU and 𝒜_XY=−𝒜_YX=½𝒱[X,Y]", "T_U V = T_V U on vertical pairs",
         "oneill")
register("oneill.A_alternating", "𝒯_UV=𝒯_VU and 𝒜_XY=−𝒜_YX=½𝒱[X,Y]", "A_X Y = −A_Y X on horizontal pairs",
         "oneill")
register("oneill.A_half_bracket", "𝒯_UV=𝒯_VU and 𝒜_XY=−𝒜_YX=½𝒱[X,Y]",
         "A_X Y = ½𝒱[X,Y] for basic X, Y", "oneill")
register("oneill.fundamental_equations", "∇_V W = 𝒯_V W + ∇̂_V W",
         "the four vertical/horizontal splittings of ∇", "oneill")
register("oneill.basic_vertical", "ℋ(∇_VX)=𝒜_XV",
         "ℋ(∇_V X) = A_X V for basic X and vertical V", "oneill")
register("oneill.basic_projectable", "π*ℋ(∇_XY) = ∇_{π*X}π*Y",
         "π*(ℋ∇_X Y) equals ∇^{M2}_{π*X} π*Y for basic X, Y", "oneill")
register("second_fundamental_form.symmetric", "(∇π*)(X,Y) = (∇π*)(Y,X)",
         "(∇π*)(X,Y) = (∇π*)(Y,X)", "oneill")


class SmoothMap:
    """Map between coordinate charts of dimensions m1 > m2."""

    def __init__(self, evaluator: Callable[[np.ndarray], np.ndarray], m1: int, m2: int,
                 jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None, name: str = "map"):
        if not (m1 > m2 >= 1):
            raise ValueError(f"a submersion needs m1 > m2 >= 1, got m1={m1}, m2={m2}")
        self.evaluator = evaluator
        self.m1, self.m2 = m1, m2
        self.analytic_jacobian = jacobian
        self.name = name

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(p, dtype=float)), dtype=float)

    def jacobian(self, p, cfg: FDConfig) -> np.ndarray:
        if self.analytic_jacobian is not None:
            J = np.asarray(self.analytic_jacobian(p), dtype=float)
        else:
            J = fd_jacobian(self.evaluator, np.asarray(p, dtype=float), cfg.step)
        if J.shape != (self.m2, self.m1):
            raise ValueError(f"Jacobian has shape {J.shape}, expected {(self.m2, self.m1)}")
        return J


class AffineMap(SmoothMap):
    """p ↦ A p + b with its exact constant Jacobian."""

    def __init__(self, matrix, offset=None, name: str = "affine"):
        A = np.array(matrix, dtype=float)
        if A.ndim != 2:
            raise ValueError("affine map matrix must be 2-d")
        b = np.zeros(A.shape[0]) if offset is None else np.array(offset, dtype=float)
        if b.shape != (A.shape[0],):
            raise ValueError("offset length must equal the number of matrix rows")
        A.setflags(write=False)
        b.setflags(write=False)
        self.matrix, self.offset = A, b
        super().__init__(lambda p: A @ p + b, A.shape[1], A.shape[0], lambda p: A, name)


@dataclass(frozen=True, eq=False)
class SubmersionSetup:
    map: SmoothMap
    domain_structure: AlmostContactStructure
    codomain_metric: MetricField
    name: str = "setup"

    def __post_init__(self):
        if self.domain_structure.dim != self.map.m1:
            raise ValueError("domain structure dimension must equal map.m1")
        if self.codomain_metric.dim != self.map.m2:
            raise ValueError("codomain metric dimension must equal map.m2")

    @property
    def g1(self) -> MetricField:
        return self.domain_structure.g

    def severity_at(self, p) -> str:
        """Exceedances on the y = 0 slice are failures, elsewhere findings."""
        return FAIL if self.domain_structure.on_slice(p) else FINDING

    def severity_for(self, p, cfg: "FDConfig", requires: Sequence[str]) -> str:
        """FAIL when every listed hypothesis holds at p, else FINDING."""
        return FAIL if hypothesis_defects(self, p, cfg).holds(requires, cfg) else FINDING


@dataclass(frozen=True)
class VerticalSpace:
    basis: np.ndarray
    singular_values: np.ndarray
    rank: int
    expected_dim: int

    @property
    def is_submersion(self) -> bool:
        return self.rank == self.basis.shape[1] - self.expected_dim


@dataclass(frozen=True)
class PointSplit:
    point: np.ndarray
    jacobian: np.ndarray
    metric: np.ndarray
    vertical_basis: np.ndarray
    horizontal_basis: np.ndarray
    vertical_projector: np.ndarray
    horizontal_projector: np.ndarray
    rank: int
    is_submersion: bool

    def vert(self, v):
        return self.vertical_projector @ v

    def hor(self, v):
        return self.horizontal_projector @ v

    def inner(self, u, v) -> float:
        return float(u @ self.metric @ v)

    def norm(self, u) -> float:
        return float(np.sqrt(max(u @ self.metric @ u, 0.0)))


def _vertical(setup: SubmersionSetup, p: np.ndarray, cfg: FDConfig) -> VerticalSpace:
    J = setup.map.jacobian(p, cfg)
    G = setup.g1(p)
    _, s, vh = np.linalg.svd(J)
    rank = int(np.sum(s > cfg.rank_threshold * s[0])) if s.size and s[0] > 0 else 0
    basis = orthonormalize(vh[rank:], G, cfg)
    return VerticalSpace(basis, s, rank, setup.map.m1 - setup.map.m2)


def vertical_space(setup: SubmersionSetup, p, cfg: FDConfig) -> VerticalSpace:
    """g1-orthonormal basis of ker π* from the SVD null space of the Jacobian."""
    return _vertical(setup, as_point(p, setup.map.m1), cfg)


@lru_cache(maxsize=8192)
def _split_cached(setup: SubmersionSetup, key: tuple, cfg: FDConfig) -> PointSplit:
    p = as_point(key, setup.map.m1)
    vs = _vertical(setup, p, cfg)
    G = setup.g1(p)
    Pv = projector(vs.basis, G)
    complement = [(np.eye(p.size) - Pv) @ e for e in np.eye(p.size)]
    # compare against unit coordinate vectors so a rounding-level complement is dropped
    hb = orthonormalize(complement, G, cfg, scale=float(np.sqrt(np.diag(G).max())))
    Ph = projector(hb, G)
    for arr in (vs.basis, hb, Pv, Ph):
        arr.setflags(write=False)
    return PointSplit(p, setup.map.jacobian(p, cfg), G, vs.basis, hb, Pv, Ph, vs.rank, vs.is_submersion)


def horizontal_space(setup: SubmersionSetup, p, cfg: FDConfig) -> PointSplit:
    """Complete vertical/horizontal splitting at p (memoized per point)."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        as_point(p)  # raises
    # the remaining validation happens on the cache miss
    return _split_cached(setup, tuple(p.tolist()), cfg)


split = horizontal_space


_EXTRA_CACHES: list = []


def register_cache(cached) -> None:
    """Include another lru cache in ``clear_caches``."""
    _EXTRA_CACHES.append(cached)


def clear_caches() -> None:
    """Drop every per-point cache; setups are cached by identity."""
    for c in (_split_cached, _gamma_cached, _defects_cached, *_EXTRA_CACHES):
        c.cache_clear()


# --- fields built from the splitting -------------------------------------------------

def vertical_field(setup: SubmersionSetup, F: FieldLike, cfg: FDConfig, name: str = "") -> VectorField:
    """𝒱F as a genuine field: the projector is recomputed at every evaluation point."""
    F = as_field(F)
    return VectorField(lambda q: split(setup, q, cfg).vert(F(q)), name=name or f"V({F.name})")


def horizontal_field(setup: SubmersionSetup, F: FieldLike, cfg: FDConfig, name: str = "") -> VectorField:
    F = as_field(F)
    return VectorField(lambda q: split(setup, q, cfg).hor(F(q)), name=name or f"H({F.name})")


def horizontal_lift(setup: SubmersionSetup, w, p, cfg: FDConfig) -> np.ndarray:
    """Unique horizontal X(p) with π* X(p) = w."""
    sp = split(setup, p, cfg)
    if not sp.is_submersion:
        raise np.linalg.LinAlgError(f"Jacobian is rank deficient at {sp.point.tolist()}")
    Hb = sp.horizontal_basis
    coeffs = np.linalg.solve(sp.jacobian @ Hb.T, np.asarray(w, dtype=float))
    return Hb.T @ coeffs


def basic_field(setup: SubmersionSetup, w, cfg: FDConfig, name: str = "") -> VectorField:
    """Horizontal lift of the constant target field w (a basic field)."""
    w = np.array(w, dtype=float)
    return VectorField(lambda q: horizontal_lift(setup, w, q, cfg), name=name or f"lift({w.tolist()})")


def pushforward_metric_check(setup: SubmersionSetup, p, cfg: FDConfig) -> float:
    sp = split(setup, p, cfg)
    JH = sp.horizontal_basis @ sp.jacobian.T
    G2 = setup.codomain_metric(setup.map(p))
    gram = JH @ G2 @ JH.T
    return float(np.abs(gram - np.eye(gram.shape[0])).max()) if gram.size else 0.0


# --- hypotheses of derived identities ------------------------------------------------------

# Pointwise: π* isometric on horizontals and ξ ⟂ fibre at p.  Jets: the same
# conditions to first order, along the fibre or in every direction.
ISOMETRY, XI_NORMAL = "isometry", "xi_normal"
ISOMETRY_FIBRE_JET, ISOMETRY_JET, XI_JET = "isometry_fibre_jet", "isometry_jet", "xi_jet"
POINTWISE = (ISOMETRY, XI_NORMAL)
ISO_FIBRE = (ISOMETRY, ISOMETRY_FIBRE_JET)
ISO_NEIGHBOURHOOD = ISO_FIBRE + (ISOMETRY_JET,)
NEIGHBOURHOOD = POINTWISE + (ISOMETRY_FIBRE_JET, ISOMETRY_JET, XI_JET)
UNCONDITIONAL: tuple = ()


@dataclass(frozen=True)
class HypothesisDefects:
    isometry: float
    xi_normal: float
    isometry_fibre_jet: float
    isometry_jet: float
    xi_jet: float

    def holds(self, requires: Sequence[str], cfg: FDConfig) -> bool:
        for name in requires:
            tol = cfg.algebraic_tol if name in POINTWISE else cfg.derivative_tol
            if not getattr(self, name) < tol:
                return False
        return True

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in
                (ISOMETRY, XI_NORMAL, ISOMETRY_FIBRE_JET, ISOMETRY_JET, XI_JET)}


def _basic_gram_defect(setup: SubmersionSetup, q, cfg: FDConfig) -> np.ndarray:
    sp = split(setup, q, cfg)
    if not sp.is_submersion:
        return np.full((setup.map.m2, setup.map.m2), np.inf)
    lifts = np.array([horizontal_lift(setup, e, q, cfg) for e in np.eye(setup.map.m2)])
    return lifts @ sp.metric @ lifts.T - setup.codomain_metric(setup.map(q))


def _xi_vertical(setup: SubmersionSetup, q, cfg: FDConfig) -> np.ndarray:
    return split(setup, q, cfg).vert(setup.domain_structure.xi(np.asarray(q, dtype=float)))


@lru_cache(maxsize=8192)
def _defects_cached(setup: SubmersionSetup, key: tuple, cfg: FDConfig) -> HypothesisDefects:
    p = np.array(key)
    sp = split(setup, p, cfg)
    if not sp.is_submersion:
        return HypothesisDefects(*(float("inf"),) * 5)
    iso = pushforward_metric_check(setup, p, cfg)
    xin = xi_vertical_component(setup, p, cfg)
    gram = lambda q: _basic_gram_defect(setup, q, cfg)
    xiv = lambda q: _xi_vertical(setup, q, cfg)
    fibre = max((_max_norm(directional_derivative(gram, p, v, cfg.step)) for v in sp.vertical_basis),
                default=0.0)
    frame = np.eye(p.size)
    full = max(_max_norm(directional_derivative(gram, p, e, cfg.step)) for e in frame)
    xij = max(_max_norm(directional_derivative(xiv, p, e, cfg.step)) for e in frame)
    return HypothesisDefects(iso, xin, fibre, full, xij)


def hypothesis_defects(setup: SubmersionSetup, p, cfg: FDConfig) -> HypothesisDefects:
    """How far the submersion hypotheses are from holding at p (values and first jets)."""
    p = as_point(p, setup.map.m1)
    return _defects_cached(setup, tuple(p.tolist()), cfg)


def severities(setup: SubmersionSetup, points, cfg: FDConfig, requires: Sequence[str]) -> list[str]:
    return [setup.severity_for(p, cfg, requires) for p in points]


# --- checks ------------------------------------------------------------------------------

def check_rank(setup: SubmersionSetup, points, cfg: FDConfig) -> CheckEntry:
    resid, ranks = [], []
    for p in points:
        sp = split(setup, p, cfg)
        ranks.append(sp.rank)
        resid.append(0.0 if sp.is_submersion else float(setup.map.m2 - sp.rank))
    return entry_from_residuals("submersion.rank", points, resid, 0.5, FAIL,
                                {"m1": setup.map.m1, "m2": setup.map.m2, "min_rank": min(ranks, default=0)})


def check_riemannian_submersion(setup: SubmersionSetup, points, cfg: FDConfig) -> CheckEntry:
    resid = [pushforward_metric_check(setup, p, cfg) for p in points]
    sev = [setup.severity_at(p) for p in points]
    return entry_from_residuals("submersion.isometry", points, resid, cfg.algebraic_tol, sev,
                                {"codomain_metric": setup.codomain_metric.name})


def xi_vertical_component(setup: SubmersionSetup, p, cfg: FDConfig) -> float:
    sp = split(setup, p, cfg)
    xi = setup.domain_structure.xi(sp.point)
    if sp.vertical_basis.shape[0] == 0:
        return 0.0
    return float(np.abs(sp.vertical_basis @ sp.metric @ xi).max())


def check_xi_horizontal(setup: SubmersionSetup, points, cfg: FDConfig) -> CheckEntry:
    resid = [xi_vertical_component(setup, p, cfg) for p in points]
    sev = [setup.severity_at(p) for p in points]
    return entry_from_residuals("submersion.xi_horizontal", points, resid, cfg.algebraic_tol, sev)


# --- O'Neill tensors and the second fundamental form ---------------------------------------

@lru_cache(maxsize=8192)
def _gamma_cached(metric: MetricField, key: tuple, cfg: FDConfig) -> np.ndarray:
    g = christoffel(metric, np.array(key), cfg)
    g.setflags(write=False)
    return g


def domain_christoffel(setup: SubmersionSetup, p, cfg: FDConfig) -> np.ndarray:
    return _gamma_cached(setup.g1, tuple(np.asarray(p, dtype=float).tolist()), cfg)


def nabla(setup: SubmersionSetup, X: FieldLike, Y: FieldLike, p, cfg: FDConfig) -> np.ndarray:
    """Levi-Civita ∇_X Y of the domain metric at p."""
    p = np.asarray(p, dtype=float)
    return covariant_derivative(setup.g1, X, Y, p, cfg, domain_christoffel(setup, p, cfg))


def oneill_T(setup: SubmersionSetup, E: FieldLike, F: FieldLike, p, cfg: FDConfig) -> np.ndarray:
    """T_E F = ℋ∇_{𝒱E} 𝒱F + 𝒱∇_{𝒱E} ℋF."""
    p = np.asarray(p, dtype=float)
    sp = split(setup, p, cfg)
    U = sp.vert(value_at(E, p))
    return (sp.hor(nabla(setup, U, vertical_field(setup, F, cfg), p, cfg))
            + sp.vert(nabla(setup, U, horizontal_field(setup, F, cfg), p, cfg)))


def oneill_A(setup: SubmersionSetup, E: FieldLike, F: FieldLike, p, cfg: FDConfig) -> np.ndarray:
    """A_E F = ℋ∇_{ℋE} 𝒱F + 𝒱∇_{ℋE} ℋF."""
    p = np.asarray(p, dtype=float)
    sp = split(setup, p, cfg)
    X = sp.hor(value_at(E, p))
    return (sp.hor(nabla(setup, X, vertical_field(setup, F, cfg), p, cfg))
            + sp.vert(nabla(setup, X, horizontal_field(setup, F, cfg), p, cfg)))


def codomain_christoffel(setup: SubmersionSetup, p, cfg: FDConfig) -> np.ndarray:
    return _gamma_cached(setup.codomain_metric, tuple(setup.map(p).tolist()), cfg)


def second_fundamental_form(setup: SubmersionSetup, X: FieldLike, Y: FieldLike, p, cfg: FDConfig) -> np.ndarray:
    """(∇π*)(X,Y) = ∇^π_X π*Y − π*(∇_X Y), a vector at π(p)."""
    p = np.asarray(p, dtype=float)
    Yf = as_field(Y)
    Xp = value_at(X, p)
    J = setup.map.jacobian(p, cfg)
    pushed = lambda q: setup.map.jacobian(q, cfg) @ Yf(q)
    pullback = (directional_derivative(pushed, p, Xp, cfg.step)
                + contract_christoffel(codomain_christoffel(setup, p, cfg), J @ Xp, J @ Yf(p)))
    return pullback - J @ nabla(setup, Xp, Yf, p, cfg)


def pullback_derivative(setup: SubmersionSetup, X: FieldLike, Y: FieldLike, p, cfg: FDConfig) -> np.ndarray:
    """∇^π_X π*Y alone."""
    p = np.asarray(p, dtype=float)
    Yf = as_field(Y)
    Xp = value_at(X, p)
    J = setup.map.jacobian(p, cfg)
    pushed = lambda q: setup.map.jacobian(q, cfg) @ Yf(q)
    return (directional_derivative(pushed, p, Xp, cfg.step)
            + contract_christoffel(codomain_christoffel(setup, p, cfg), J @ Xp, J @ Yf(p)))


def vertical_frame_fields(setup: SubmersionSetup, p, cfg: FDConfig) -> list[VectorField]:
    sp = split(setup, p, cfg)
    return [vertical_field(setup, v, cfg, name=f"V{i}") for i, v in enumerate(sp.vertical_basis)]


def basic_frame_fields(setup: SubmersionSetup, cfg: FDConfig) -> list[VectorField]:
    """Basic lifts of the target coordinate fields."""
    eye = np.eye(setup.map.m2)
    return [basic_field(setup, e, cfg, name=f"X{i}") for i, e in enumerate(eye)]


def _max_norm(v) -> float:
    return float(np.abs(v).max()) if np.size(v) else 0.0


def oneill_residuals(setup: SubmersionSetup, p, cfg: FDConfig) -> dict[str, float]:
    """Residuals of the symmetry properties of T and A at p."""
    V = vertical_frame_fields(setup, p, cfg)
    X = basic_frame_fields(setup, cfg)
    sp = split(setup, p, cfg)
    out = {"T_symmetric": 0.0, "A_alternating": 0.0, "A_half_bracket": 0.0}
    for i, U in enumerate(V):
        for W in V[i:]:
            out["T_symmetric"] = max(out["T_symmetric"],
                                     _max_norm(oneill_T(setup, U, W, p, cfg) - oneill_T(setup, W, U, p, cfg)))
    for i, A1 in enumerate(X):
        for A2 in X[i:]:
            a12 = oneill_A(setup, A1, A2, p, cfg)
            a21 = oneill_A(setup, A2, A1, p, cfg)
            out["A_alternating"] = max(out["A_alternating"], _max_norm(a12 + a21))
            half = 0.5 * sp.vert(lie_bracket(A1, A2, p, cfg))
            out["A_half_bracket"] = max(out["A_half_bracket"], _max_norm(a12 - half))
    return out


def check_oneill(setup: SubmersionSetup, points, cfg: FDConfig) -> list[CheckEntry]:
    per = [oneill_residuals(setup, p, cfg) for p in points]
    sev = severities(setup, points, cfg, ISO_FIBRE)
    return [entry_from_residuals("oneill.T_symmetric", points, [r["T_symmetric"] for r in per],
                                 cfg.derivative_tol, FAIL)] + [
        entry_from_residuals(f"oneill.{k}", points, [r[k] for r in per], cfg.derivative_tol, sev)
        for k in ("A_alternating", "A_half_bracket")]


def fundamental_equation_residuals(setup: SubmersionSetup, p, cfg: FDConfig) -> dict[str, float]:
    p = np.asarray(p, dtype=float)
    sp = split(setup, p, cfg)
    V = vertical_frame_fields(setup, p, cfg)
    X = basic_frame_fields(setup, cfg)
    splits = 0.0
    basic_vertical = 0.0
    projectable = 0.0
    for U in V:
        for W in V:
            full = nabla(setup, U, W, p, cfg)
            splits = max(splits, _max_norm(full - oneill_T(setup, U, W, p, cfg) - sp.vert(full)))
        for Y in X:
            full = nabla(setup, U, Y, p, cfg)
            splits = max(splits, _max_norm(full - oneill_T(setup, U, Y, p, cfg) - sp.hor(full)))
            basic_vertical = max(basic_vertical, _max_norm(sp.hor(full) - oneill_A(setup, Y, U, p, cfg)))
    Gam2 = codomain_christoffel(setup, p, cfg)
    eye = np.eye(setup.map.m2)
    for a, Y1 in enumerate(X):
        for U in V:
            full = nabla(setup, Y1, U, p, cfg)
            splits = max(splits, _max_norm(full - sp.vert(full) - oneill_A(setup, Y1, U, p, cfg)))
        for b, Y2 in enumerate(X):
            full = nabla(setup, Y1, Y2, p, cfg)
            splits = max(splits, _max_norm(full - oneill_A(setup, Y1, Y2, p, cfg) - sp.hor(full)))
            target = contract_christoffel(Gam2, eye[a], eye[b])
            projectable = max(projectable, _max_norm(sp.jacobian @ sp.hor(full) - target))
    return {"splits": splits, "basic_vertical": basic_vertical, "projectable": projectable}


def check_fundamental_equations(setup: SubmersionSetup, points, cfg: FDConfig) -> list[CheckEntry]:
    per = [fundamental_equation_residuals(setup, p, cfg) for p in points]
    sev = severities(setup, points, cfg, ISO_NEIGHBOURHOOD)
    return [
        entry_from_residuals("oneill.fundamental_equations", points, [r["splits"] for r in per],
                             cfg.algebraic_tol, FAIL),
        entry_from_residuals("oneill.basic_vertical", points, [r["basic_vertical"] for r in per],
                             cfg.derivative_tol, FAIL),
        entry_from_residuals("oneill.basic_projectable", points, [r["projectable"] for r in per],
                             cfg.derivative_tol, sev),
    ]


def check_second_fundamental_form_symmetry(setup: SubmersionSetup, points, cfg: FDConfig) -> CheckEntry:
    resid = []
    for p in points:
        sp = split(setup, p, cfg)
        frame = [vertical_field(setup, v, cfg) for v in sp.vertical_basis] + basic_frame_fields(setup, cfg)
        r = 0.0
        for i, A in enumerate(frame):
            for B in frame[i + 1:]:
                r = max(r, _max_norm(second_fundamental_form(setup, A, B, p, cfg)
                                     - second_fundamental_form(setup, B, A, p, cfg)))
        resid.append(r)
    return entry_from_residuals("second_fundamental_form.symmetric", points, resid, cfg.derivative_tol, FAIL)
