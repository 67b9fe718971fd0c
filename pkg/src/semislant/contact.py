"""Almost contact metric structures and their defining identities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .checks import FAIL, FINDING, CheckEntry, entry_from_residuals, register
from .diffgeo import (
    CovectorField,
    EndomorphismField,
    FDConfig,
    MetricField,
    VectorField,
    covariant_derivative,
    christoffel,
    exterior_derivative_1form,
    lie_bracket,
)

AS_PRINTED = "as_printed"
CORRECTED = "corrected"
VARIANTS = (AS_PRINTED, CORRECTED)

# Φ = CONTACT_SCALE · dη with dη taken without the 1/2 factor; fixed by
# check_contact_metric on the standard structure.
CONTACT_SCALE = 0.5
SCALE_CANDIDATES = (1.0, 0.5, 2.0)
FRAME_RANDOM_VECTORS = 10
FRAME_SEED = 20240601

register("contact.phi_squared", "φ²=−I+η⊗ξ, η(ξ)=1", "φ² = −I + η⊗ξ as matrices", "contact")
register("contact.eta_xi", "φ²=−I+η⊗ξ, η(ξ)=1", "η(ξ) = 1", "contact")
register("contact.phi_xi", "φξ=0", "φξ = 0", "contact")
register("contact.eta_phi", "η∘φ=0", "η∘φ = 0", "contact")
register("contact.metric_compat", "g_M(φX,φY)=g_M(X,Y)−η(X)η(Y)",
         "g(φX,φY) = g(X,Y) − η(X)η(Y) on a frame", "contact")
register("contact.duality", "g_M(φX,φY)=g_M(X,Y)−η(X)η(Y)",
         "φ g-skew, g(ξ,ξ) = 1 and η = g(·,ξ)", "contact")
register("contact.fundamental_form", "Φ(X,Y)=dη(X,Y)",
         "Φ(X,Y) = g(X,φY) equals s·dη(X,Y) for a fitted s", "contact")
register("contact.normality", "[φ,φ]+2dη⊗ξ=0", "Nijenhuis tensor plus 2dη⊗ξ vanishes", "contact")
register("sasaki.nabla_phi", "(∇_X φ)Y = g_M(X,Y)ξ − η(Y)X",
         "(∇_X φ)Y = g(X,Y)ξ − η(Y)X", "contact")
register("sasaki.nabla_xi", "∇_X ξ = −φX", "∇_X ξ = −φX", "contact")


@dataclass(frozen=True, eq=False)
class AlmostContactStructure:
    phi: EndomorphismField
    xi: VectorField
    eta: CovectorField
    g: MetricField
    dim: int
    variant: Optional[str] = None
    name: str = "structure"
    # coordinate indices of y^1..y^n for the standard structure (slice detection)
    y_indices: tuple = ()

    def __post_init__(self):
        if self.dim < 1 or self.dim % 2 == 0:
            raise ValueError(f"almost contact structures live in odd dimension, got {self.dim}")

    def on_slice(self, p, tol: float = 1e-12) -> bool:
        """True when all y-coordinates vanish (always true if none are declared)."""
        if not self.y_indices:
            return True
        return bool(np.all(np.abs(np.asarray(p)[list(self.y_indices)]) <= tol))


def standard_sasakian(n: int, variant: str = CORRECTED) -> AlmostContactStructure:
    """Standard Sasakian structure on R^(2n+1), coordinates (x^1..x^n, y^1..y^n, z).

    η = (dz − Σ y^i dx^i)/2, ξ = 2∂z, g = η⊗η + (1/4)Σ(dx^i⊗dx^i + dy^i⊗dy^i).
    ``as_printed`` uses φ(X_i∂x_i + Y_i∂y_i + Z∂z) = Σ(Y_i∂x_i − X_i∂y_i);
    ``corrected`` adds the Σ Y_i y^i ∂z term needed for φ² = −I + η⊗ξ off y = 0.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"invalid dimension parameter n={n!r}; need n >= 1")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    dim = 2 * n + 1
    xs, ys, iz = slice(0, n), slice(n, 2 * n), 2 * n
    flat = np.diag([0.25] * (2 * n) + [0.0])
    base_phi = np.zeros((dim, dim))
    for i in range(n):
        base_phi[i, n + i] = 1.0    # ∂y_i -> ∂x_i
        base_phi[n + i, i] = -1.0   # ∂x_i -> -∂y_i
    xi_vec = np.zeros(dim)
    xi_vec[iz] = 2.0
    xi_vec.setflags(write=False)

    def eta(p):
        e = np.zeros(dim)
        e[xs] = -0.5 * p[ys]
        e[iz] = 0.5
        return e

    def g(p):
        e = eta(p)
        return np.outer(e, e) + flat

    if variant == CORRECTED:
        def phi(p):
            m = base_phi.copy()
            m[iz, ys] = p[ys]
            return m
    else:
        def phi(p):
            return base_phi.copy()

    return AlmostContactStructure(
        phi=EndomorphismField(phi, "phi"),
        xi=VectorField(lambda p: xi_vec, lambda p: np.zeros((dim, dim)), "xi"),
        eta=CovectorField(eta, "eta"),
        g=MetricField(g, dim, "sasakian"),
        dim=dim,
        variant=variant,
        name=f"standard_sasakian(n={n}, {variant})",
        y_indices=tuple(range(n, 2 * n)),
    )


def structure_frame(dim: int, count: int = FRAME_RANDOM_VECTORS, seed: int = FRAME_SEED) -> np.ndarray:
    """Coordinate frame followed by ``count`` seeded random vectors (rows)."""
    rng = np.random.default_rng(seed)
    return np.vstack([np.eye(dim), rng.uniform(-1.0, 1.0, size=(count, dim))])


def _severity(s: AlmostContactStructure) -> str:
    # the printed φ is known to break the identities away from y = 0
    return FINDING if s.variant == AS_PRINTED else FAIL


def check_almost_contact(s: AlmostContactStructure, points: Sequence[np.ndarray],
                         cfg: FDConfig) -> list[CheckEntry]:
    frame = structure_frame(s.dim)
    res = {k: [] for k in ("phi_squared", "eta_xi", "phi_xi", "eta_phi", "metric_compat")}
    for p in points:
        P, G, xi, eta = s.phi(p), s.g(p), s.xi(p), s.eta(p)
        target = -np.eye(s.dim) + np.outer(xi, eta)
        res["phi_squared"].append(np.abs(P @ P - target).max())
        res["eta_xi"].append(abs(eta @ xi - 1.0))
        res["phi_xi"].append(np.abs(P @ xi).max())
        res["eta_phi"].append(np.abs(eta @ P).max())
        PF = frame @ P.T
        ef = frame @ eta
        lhs = PF @ G @ PF.T
        rhs = frame @ G @ frame.T - np.outer(ef, ef)
        res["metric_compat"].append(np.abs(lhs - rhs).max())
    sev = _severity(s)
    info = {"variant": s.variant, "structure": s.name}
    return [entry_from_residuals(f"contact.{k}", points, v, cfg.algebraic_tol, sev, info)
            for k, v in res.items()]


def check_duality(s: AlmostContactStructure, points, cfg: FDConfig) -> CheckEntry:
    resid = []
    for p in points:
        P, G, xi, eta = s.phi(p), s.g(p), s.xi(p), s.eta(p)
        skew = np.abs(G @ P + P.T @ G).max()
        unit = abs(xi @ G @ xi - 1.0)
        dual = np.abs(G @ xi - eta).max()
        resid.append(max(skew, unit, dual))
    return entry_from_residuals("contact.duality", points, resid, cfg.algebraic_tol, _severity(s),
                                {"variant": s.variant})


def fundamental_form_residuals(s: AlmostContactStructure, p, cfg: FDConfig) -> dict[float, float]:
    """Max over coordinate pairs of |Φ(X,Y) − s·dη(X,Y)| for each candidate s."""
    G, P = s.g(p), s.phi(p)
    Phi = G @ P  # Φ(e_i, e_j) = g(e_i, φ e_j)
    deta = np.zeros((s.dim, s.dim))
    eye = np.eye(s.dim)
    for i in range(s.dim):
        for j in range(i + 1, s.dim):
            deta[i, j] = exterior_derivative_1form(s.eta, eye[i], eye[j], p, cfg)
            deta[j, i] = -deta[i, j]
    return {c: float(np.abs(Phi - c * deta).max()) for c in SCALE_CANDIDATES}


def check_contact_metric(s: AlmostContactStructure, points, cfg: FDConfig) -> CheckEntry:
    per_scale = {c: [] for c in SCALE_CANDIDATES}
    for p in points:
        for c, r in fundamental_form_residuals(s, p, cfg).items():
            per_scale[c].append(r)
    best = min(SCALE_CANDIDATES, key=lambda c: (max(per_scale[c], default=0.0), SCALE_CANDIDATES.index(c)))
    details = {
        "best_scale": best,
        "scale_max_residuals": {str(c): max(v, default=0.0) for c, v in per_scale.items()},
        "variant": s.variant,
    }
    return entry_from_residuals("contact.fundamental_form", points, per_scale[best],
                                cfg.derivative_tol, _severity(s), details)


def nijenhuis_residual(s: AlmostContactStructure, X, Y, p, cfg: FDConfig,
                       scale: float = CONTACT_SCALE) -> np.ndarray:
    """φ²[X,Y] + [φX,φY] − φ[φX,Y] − φ[X,φY] + 2·scale·dη(X,Y)ξ at p."""
    Xf = X if isinstance(X, VectorField) else VectorField.constant(X)
    Yf = Y if isinstance(Y, VectorField) else VectorField.constant(Y)
    phiX = VectorField(lambda q: s.phi(q) @ Xf(q))
    phiY = VectorField(lambda q: s.phi(q) @ Yf(q))
    P = s.phi(p)
    n = (P @ P @ lie_bracket(Xf, Yf, p, cfg)
         + lie_bracket(phiX, phiY, p, cfg)
         - P @ lie_bracket(phiX, Yf, p, cfg)
         - P @ lie_bracket(Xf, phiY, p, cfg))
    return n + 2.0 * scale * exterior_derivative_1form(s.eta, Xf, Yf, p, cfg) * s.xi(p)


def check_normality(s: AlmostContactStructure, points, cfg: FDConfig) -> CheckEntry:
    eye = np.eye(s.dim)
    resid = []
    for p in points:
        r = 0.0
        for i in range(s.dim):
            for j in range(i + 1, s.dim):
                r = max(r, np.abs(nijenhuis_residual(s, eye[i], eye[j], p, cfg)).max())
        resid.append(r)
    return entry_from_residuals("contact.normality", points, resid, cfg.derivative_tol, _severity(s),
                                {"variant": s.variant, "deta_scale": CONTACT_SCALE})


def sasakian_residuals(s: AlmostContactStructure, p, cfg: FDConfig, frame=None) -> tuple[float, float]:
    """Max-norm residuals of the two Sasakian identities over frame pairs at p."""
    if frame is None:
        frame = structure_frame(s.dim)
    gamma = christoffel(s.g, p, cfg)
    P, G, xi, eta = s.phi(p), s.g(p), s.xi(p), s.eta(p)
    r_phi = r_xi = 0.0
    for X in frame:
        r_xi = max(r_xi, np.abs(covariant_derivative(s.g, X, s.xi, p, cfg, gamma) + P @ X).max())
        for Y in frame:
            phiY = VectorField(lambda q, Y=Y: s.phi(q) @ Y)
            lhs = (covariant_derivative(s.g, X, phiY, p, cfg, gamma)
                   - P @ covariant_derivative(s.g, X, Y, p, cfg, gamma))
            rhs = (X @ G @ Y) * xi - (eta @ Y) * X
            r_phi = max(r_phi, np.abs(lhs - rhs).max())
    return r_phi, r_xi


def check_sasakian(s: AlmostContactStructure, points, cfg: FDConfig) -> list[CheckEntry]:
    frame = structure_frame(s.dim)
    r_phi, r_xi = [], []
    for p in points:
        a, b = sasakian_residuals(s, p, cfg, frame)
        r_phi.append(a)
        r_xi.append(b)
    sev = _severity(s)
    info = {"variant": s.variant}
    return [entry_from_residuals("sasaki.nabla_phi", points, r_phi, cfg.derivative_tol, sev, info),
            entry_from_residuals("sasaki.nabla_xi", points, r_xi, cfg.derivative_tol, sev, info)]
