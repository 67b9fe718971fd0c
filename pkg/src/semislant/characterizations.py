"""Integrability, parallelism and geodesic-map conditions checked against direct geometry.

Every condition is evaluated on frame tuples in three ways:

* ``printed``  the condition exactly as displayed (LHS − RHS, or the displayed
  vector expression);
* ``complete`` the same expansion with every term kept that the displayed form
  drops because it only vanishes when the hypotheses hold on a neighbourhood
  (derivatives of η(V) along the fibre, ∇^π of non-basic pushforwards, the
  slant-operator defect off p) and with sign slips repaired; it equals
  ``factor · direct`` pointwise;
* ``direct``   the geometric quantity the condition is meant to detect
  (a bracket or connection component, or a value of ∇π*).

A condition "holds" when its residual is below ``cfg.derivative_tol``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .checks import FAIL, FINDING, CheckEntry, entry_from_residuals, register
from .diffgeo import FDConfig, VectorField, as_field, directional_derivative, lie_bracket
from .submersion import (
    POINTWISE,
    SubmersionSetup,
    basic_field,
    basic_frame_fields,
    nabla,
    oneill_A,
    oneill_T,
    pullback_derivative,
    register_cache,
    second_fundamental_form,
    severities,
    split,
    vertical_field,
)
from .semislant import d1_field, d2_field, detect_semi_slant, hor_phi_field, phi_field, vert_phi_field


# --- evaluation context ------------------------------------------------------------------

def _memo(F: VectorField) -> VectorField:
    """Same field, remembering values at the displaced points finite differences revisit."""
    cache: dict[bytes, np.ndarray] = {}

    def ev(q):
        key = np.asarray(q, dtype=float).tobytes()
        if key not in cache:
            cache[key] = F(q)
        return cache[key]

    return VectorField(ev, F.jacobian, F.name)


class _Ctx:
    """Everything a condition needs at one point."""

    def __init__(self, setup: SubmersionSetup, p, cfg: FDConfig):
        self.setup, self.cfg = setup, cfg
        self.sp = split(setup, p, cfg)
        self.p = self.sp.point
        self.ssd = detect_semi_slant(setup, self.p, cfg)
        s = setup.domain_structure
        self.phi = s.phi(self.p)
        self.xi = s.xi(self.p)
        self.eta_p = s.eta(self.p)
        self.J = self.sp.jacobian
        self.G2 = setup.codomain_metric(setup.map(self.p))
        theta = self.ssd.theta if self.ssd.theta is not None else np.pi / 2
        self.c2, self.s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
        self.k = self.ssd.dim_d1
        self._frames: dict[str, list[VectorField]] = {}
        self._fields: dict[tuple, tuple] = {}

    # frames
    def frame(self, kind: str) -> list[VectorField]:
        if kind not in self._frames:
            setup, cfg, k = self.setup, self.cfg, self.k
            if kind == "D1":
                fr = [d1_field(setup, u, k, cfg) for u in self.ssd.D1_basis]
            elif kind == "D2":
                fr = [d2_field(setup, w, k, cfg) for w in self.ssd.D2_basis]
            elif kind == "V":
                fr = [vertical_field(setup, v, cfg) for v in self.sp.vertical_basis]
            elif kind == "H":
                fr = basic_frame_fields(setup, cfg)
            else:
                raise ValueError(f"unknown frame kind {kind!r}")
            self._frames[kind] = [_memo(F) for F in fr]
        return self._frames[kind]

    # pointwise algebra
    def g(self, a, b) -> float:
        return self.sp.inner(self._v(a), self._v(b))

    def g2(self, a, b) -> float:
        return float(np.asarray(a) @ self.G2 @ np.asarray(b))

    def eta(self, a) -> float:
        return float(self.eta_p @ self._v(a))

    def push(self, a) -> np.ndarray:
        return self.J @ self._v(a)

    def V(self, a) -> np.ndarray:
        return self.sp.vert(self._v(a))

    def H(self, a) -> np.ndarray:
        return self.sp.hor(self._v(a))

    def omega(self, v) -> np.ndarray:
        return self.sp.hor(self.phi @ self.sp.vert(v))

    def C(self, h) -> np.ndarray:
        return self.sp.hor(self.phi @ self.sp.hor(h))

    def _v(self, a) -> np.ndarray:
        return a(self.p) if callable(a) else np.asarray(a, dtype=float)

    # fields
    def _derived(self, tag: str, F, make) -> VectorField:
        key = (tag, id(F))
        if key not in self._fields:
            self._fields[key] = (F, _memo(make()))  # F kept alive so its id stays unique
        return self._fields[key][1]

    def vphi(self, F) -> VectorField:
        return self._derived("v", F, lambda: vert_phi_field(self.setup, F, self.cfg))

    def hphi(self, F) -> VectorField:
        return self._derived("h", F, lambda: hor_phi_field(self.setup, F, self.cfg))

    def phiF(self, F) -> VectorField:
        return self._derived("p", F, lambda: phi_field(self.setup, F))

    def slant_defect(self, W) -> VectorField:
        """φ̂φ̂W + cos²θ(p) W, zero at p but not nearby unless the angle persists."""
        hh = self.vphi(self.vphi(W))
        W = as_field(W)
        return VectorField(lambda q: hh(q) + self.c2 * W(q))

    # derivatives
    def nab(self, E, F) -> np.ndarray:
        return nabla(self.setup, E, F, self.p, self.cfg)

    def T(self, E, F) -> np.ndarray:
        return oneill_T(self.setup, E, F, self.p, self.cfg)

    def A(self, E, F) -> np.ndarray:
        return oneill_A(self.setup, E, F, self.p, self.cfg)

    def sff(self, E, F) -> np.ndarray:
        return second_fundamental_form(self.setup, E, F, self.p, self.cfg)

    def pb(self, E, F) -> np.ndarray:
        return pullback_derivative(self.setup, E, F, self.p, self.cfg)

    def bracket(self, E, F) -> np.ndarray:
        return lie_bracket(E, F, self.p, self.cfg)

    def d(self, E, f: Callable[[np.ndarray], float]) -> float:
        """Derivative of a scalar function along E(p)."""
        return float(directional_derivative(f, self.p, self._v(E), self.cfg.step))

    def d_inner(self, E, F1, F2) -> float:
        """E(g(F1, F2))."""
        g = self.setup.g1
        F1, F2 = as_field(F1), as_field(F2)
        return self.d(E, lambda q: float(F1(q) @ g(q) @ F2(q)))

    def d_eta(self, E, F) -> float:
        """E(η(F))."""
        F = as_field(F)
        eta = self.setup.domain_structure.eta
        return self.d(E, lambda q: float(eta(q) @ F(q)))

    def size(self, value) -> float:
        v = np.asarray(value, dtype=float)
        if v.ndim == 0:
            return abs(float(v))
        return float(np.sqrt(max(v @ self.G2 @ v, 0.0)))


# --- the conditions ----------------------------------------------------------------------
# Each returns (printed, complete, direct, factor) with complete == factor * direct.

def _d1_integrable(c: _Ctx, U, V, Z):
    JoZ = c.push(c.hphi(Z))
    pU, pV = c.phiF(U), c.phiF(V)
    printed = c.g2(c.sff(U, pV) - c.sff(V, pU), JoZ)
    complete = printed - c.g2(c.pb(U, pV) - c.pb(V, pU), JoZ)
    return printed, complete, c.g(c.bracket(U, V), Z), -c.s2


def _d2_integrable(c: _Ctx, Z, W, U):
    pU = c.phiF(U)
    JoW, JoZ = c.push(c.hphi(W)), c.push(c.hphi(Z))
    t1, t2 = c.g2(JoW, c.sff(Z, pU)), c.g2(JoZ, c.sff(W, pU))
    v1 = c.g(c.vphi(W), c.V(c.nab(Z, pU)))
    v2 = c.g(c.vphi(Z), c.V(c.nab(W, pU)))
    printed = t1 + t2 - v1 - v2
    complete = (t1 - t2) - (v1 - v2) - (c.g2(JoW, c.pb(Z, pU)) - c.g2(JoZ, c.pb(W, pU)))
    return printed, complete, c.g(c.bracket(Z, W), U), 1.0


def _d1_parallel_d2(c: _Ctx, U, V, Z):
    JoZ = c.push(c.hphi(Z))
    pV = c.phiF(V)
    printed = c.g2(c.sff(U, pV), JoZ) - c.g(c.T(U, c.hphi(c.vphi(Z))), V)
    complete = printed - c.g2(c.pb(U, pV), JoZ)
    return printed, complete, c.g(c.nab(U, V), Z), -c.s2


def _d1_parallel_h(c: _Ctx, U, V, X):
    BX = c.vphi(X)
    JCX = c.push(c.hphi(X))
    pV = c.phiF(V)
    L = -c.g2(c.sff(U, pV), JCX)
    R = (c.g(V, c.V(c.nab(U, c.vphi(BX)))) + c.g(V, c.T(U, c.hphi(BX)))
         + c.g(V, c.phi @ c._v(U)) * c.eta(X))
    N = (-c.d_inner(U, V, c.phiF(BX)) + c.g2(c.pb(U, pV), JCX) + c.d_eta(U, V) * c.eta(X))
    return L - R, L + R + N, c.g(c.nab(U, V), X), 1.0


def _d2_parallel_d1(c: _Ctx, Z, W, U):
    pU = c.phiF(U)
    JoW = c.push(c.hphi(W))
    printed = c.g2(JoW, c.sff(Z, pU)) - c.g(c.vphi(W), c.V(c.nab(Z, pU)))
    complete = printed - c.g2(JoW, c.pb(Z, pU))
    return printed, complete, c.g(c.nab(Z, W), U), 1.0


def _d2_parallel_h(c: _Ctx, Z, W, X):
    oW, ophW = c.hphi(W), c.hphi(c.vphi(W))
    BX = c.vphi(X)
    JX, JCX = c.push(X), c.push(c.hphi(X))
    s_o, s_oph = c.sff(Z, oW), c.sff(Z, ophW)
    TZoW_BX = c.g(c.T(Z, oW), BX)
    printed = (c.g2(s_o, JX) - c.g2(s_oph, JX) - TZoW_BX - c.g(W, c.phi @ c._v(Z)) * c.eta(X))
    complete = (c.g2(s_oph, JX) - c.g2(s_o, JCX) + TZoW_BX - c.g(c.T(Z, c.slant_defect(W)), X)
                - c.g2(c.pb(Z, ophW), JX) + c.g2(c.pb(Z, oW), JCX) + c.d_eta(Z, W) * c.eta(X))
    return printed, complete, c.g(c.nab(Z, W), X), c.s2


def _horizontal_bracket_d1_part(c: _Ctx, X, Y, V) -> float:
    """g(∇_X Y, V) for V ∈ D₁ at p, expanded through φ."""
    CY = c.hphi(Y)
    pV = c.phiF(V)
    JCY = c.push(CY)
    return (c.d_inner(X, CY, pV) + c.g(c.vphi(V), c.V(c.nab(X, c.vphi(Y))))
            + c.g2(JCY, c.sff(X, pV)) - c.g2(JCY, c.pb(X, pV)))


def _h_integrable_d1(c: _Ctx, X, Y, V):
    phV = c.vphi(V)
    JX = c.push(X)
    printed = (c.g2(c.sff(Y, phV), JX) + c.g2(c.sff(X, phV), JX)
               - c.g(phV, c.V(c.nab(X, c.vphi(Y)) + c.nab(Y, c.vphi(X)))))
    complete = _horizontal_bracket_d1_part(c, X, Y, V) - _horizontal_bracket_d1_part(c, Y, X, V)
    return printed, complete, c.g(c.bracket(X, Y), V), 1.0


def _h_integrable_d2(c: _Ctx, X, Y, W):
    oW = c.hphi(W)
    JoW, JophW = c.push(oW), c.push(c.hphi(c.vphi(W)))
    BX, BY, CX, CY = c.vphi(X), c.vphi(Y), c.hphi(X), c.hphi(Y)
    s_diff = c.g2(c.sff(X, CY) - c.sff(Y, CX), JoW)
    AXBY, AYBX = c.g(c.A(X, BY), oW), c.g(c.A(Y, BX), oW)
    eta_terms = c.eta(Y) * c.g(X, oW) - c.eta(X) * c.g(Y, oW)
    printed = s_diff - (AXBY + AYBX) - eta_terms
    complete = (-c.g2(c.pb(X, Y) - c.pb(Y, X), JophW) + (AXBY - AYBX)
                + c.g2(c.pb(X, CY) - c.pb(Y, CX), JoW) - s_diff + eta_terms)
    return printed, complete, c.g(c.bracket(X, Y), W), c.s2


def _h_parallel_d1(c: _Ctx, X, Y, V):
    BY, CY = c.vphi(Y), c.hphi(Y)
    pV = c.phiF(V)
    JCY = c.push(CY)
    printed = (c.g(V, c.V(c.nab(X, c.vphi(BY))) + c.A(X, c.hphi(BY))) - c.g2(JCY, c.sff(X, pV)))
    N = c.d_inner(X, CY, pV) - c.g2(JCY, c.pb(X, pV))
    return printed, printed - N, c.g(c.nab(X, Y), V), -1.0


def _h_parallel_d2(c: _Ctx, X, Y, W):
    oW = c.hphi(W)
    JoW, JophW = c.push(oW), c.push(c.hphi(c.vphi(W)))
    BY, CY = c.vphi(Y), c.hphi(Y)
    s_xy, s_xcy = c.g2(c.sff(X, Y), JophW), c.g2(c.sff(X, CY), JoW)
    eta_term = c.eta(Y) * c.g(X, oW)
    printed = c.g(c.A(X, oW), BY) + eta_term - s_xy + s_xcy
    complete = (-c.g2(c.pb(X, Y), JophW) + s_xy + c.g(c.A(X, BY), oW)
                + c.g2(c.pb(X, CY), JoW) - s_xcy + eta_term)
    return printed, complete, c.g(c.nab(X, Y), W), c.s2


def _vertical_parallel(c: _Ctx, U, V, X):
    oV, ophV = c.hphi(V), c.hphi(c.vphi(V))
    BX = c.vphi(X)
    JX, JCX, JoV = c.push(X), c.push(c.hphi(X)), c.push(oV)
    printed = (c.g(oV, c.T(U, BX)) + c.g(V, c.vphi(U)) * c.eta(X)
               - c.g2(c.sff(U, c.hphi(X)), JoV) + c.g2(c.sff(U, X), c.push(ophV)))
    complete = (-c.g(c.T(U, c.slant_defect(V)), X) - c.g2(c.pb(U, ophV), JX) + c.g2(c.sff(U, ophV), JX)
                + c.g(c.T(U, oV), BX) + c.g2(c.pb(U, oV), JCX) - c.g2(c.sff(U, oV), JCX)
                + c.d_eta(U, V) * c.eta(X))
    return printed, complete, c.g(c.nab(U, V), X), c.s2


def _geodesic_expansion(c: _Ctx, X, Z):
    """∇π*(X, Z) through the φ-decomposition of ∇_X φZ, Z = Z₁ + Z₂."""
    setup, cfg = c.setup, c.cfg
    Zf = as_field(Z)
    Z1 = VectorField(lambda q: split(setup, q, cfg).vert(Zf(q)))
    Z2 = VectorField(lambda q: split(setup, q, cfg).hor(Zf(q)))
    phZ1, oZ1, BZ2, CZ2 = c.vphi(Z1), c.hphi(Z1), c.vphi(Z2), c.hphi(Z2)
    A_ph, H_o = c.A(X, phZ1), c.H(c.nab(X, oZ1))
    A_B, H_C = c.A(X, BZ2), c.H(c.nab(X, CZ2))
    V_ph, A_o = c.V(c.nab(X, phZ1)), c.A(X, oZ1)
    V_B, A_C = c.V(c.nab(X, BZ2)), c.A(X, CZ2)
    CX = c.C(c._v(X))
    eta_nab = c.d_eta(X, Zf) + c.g(Zf, c.phi @ c._v(X))
    complete_vec = (c.C(A_ph + H_o + A_B + H_C) + c.omega(V_ph + A_o + V_B + A_C)
                    + c.eta(Zf) * CX - eta_nab * c.xi)
    printed_vec = (c.C(H_o - A_ph + A_B + H_C) + c.omega(A_o - V_ph + V_B + A_C)
                   - c.eta(Z2) * CX - (c.d_eta(X, Z2) + c.g(Z2, CX)) * c.xi)
    base = c.pb(X, Z2)
    return base + c.J @ printed_vec, base + c.J @ complete_vec, c.sff(X, Zf), 1.0


def _geodesic_d1(c: _Ctx, U, V, Z):
    BZ, CZ = c.vphi(Z), c.hphi(Z)
    pV = c.phiF(V)
    nUpV = c.nab(U, pV)
    gVphU = c.g(V, c.vphi(U))
    printed = c.g(c.V(nUpV), BZ) - c.g(c.T(U, CZ), pV) + gVphU * c.eta(Z)
    complete = (-c.g(c.V(nUpV), BZ) - c.g(c.H(nUpV), CZ) - gVphU * c.eta(Z) - c.d_eta(U, V) * c.eta(Z))
    return printed, complete, c.g2(c.sff(U, V), c.push(Z)), 1.0


def _geodesic_d2(c: _Ctx, U, V, Z):
    oV, ophV = c.hphi(V), c.hphi(c.vphi(V))
    BZ = c.vphi(Z)
    JZ, JCZ = c.push(Z), c.push(c.hphi(Z))
    s_oph, s_o = c.sff(U, ophV), c.sff(U, oV)
    TUoV_BZ = c.g(c.T(U, oV), BZ)
    printed = c.g2(s_oph, JZ) + c.g2(s_o, JZ) - TUoV_BZ - c.g(V, c.vphi(U)) * c.eta(Z)
    complete = (c.g(c.T(U, c.slant_defect(V)), Z) + c.g2(c.pb(U, ophV), JZ) - c.g2(s_oph, JZ) - TUoV_BZ
                - c.g2(c.pb(U, oV), JCZ) + c.g2(s_o, JCZ) - c.d_eta(U, V) * c.eta(Z))
    return printed, complete, c.g2(c.sff(U, V), c.push(Z)), c.s2


def _geodesic_mixed(c: _Ctx, U, X, Y):
    BX, CX = c.vphi(X), c.hphi(X)
    BY = c.vphi(Y)
    JY, JCY = c.push(Y), c.push(c.hphi(Y))
    phBX, oBX = c.vphi(BX), c.hphi(BX)
    s_cx, s_obx = c.g2(c.sff(U, CX), JCY), c.g2(c.sff(U, oBX), JY)
    T_phBX, T_CX = c.g(c.T(U, phBX), Y), c.g(c.T(U, CX), BY)
    QU = c.ssd.Q_proj @ c._v(U)
    printed = (s_cx - s_obx - (T_phBX - T_CX + c.eta(X) * c.g(QU, c.phi @ c._v(Y))
                                - c.eta(Y) * (c.d_eta(U, X) + c.g(X, c.hphi(U)))))
    complete = (c.g2(c.pb(U, X), JY) + T_phBX + c.g2(c.pb(U, oBX), JY) - s_obx - T_CX
                - c.g2(c.pb(U, CX), JCY) + s_cx - c.eta(X) * c.g(U, BY) - c.d_eta(U, X) * c.eta(Y))
    return printed, complete, c.g2(c.sff(U, X), JY), 1.0


def _vertical_pair_vector(c: _Ctx, U, V):
    """ℋ∇_U V through φ, so that π* of it is −∇π*(U, V)."""
    phV, oV = c.vphi(V), c.hphi(V)
    T_ph, H_o = c.T(U, phV), c.H(c.nab(U, oV))
    V_ph, T_o = c.V(c.nab(U, phV)), c.T(U, oV)
    return T_ph, H_o, V_ph, T_o


def _geodesic_vv(c: _Ctx, U, V):
    T_ph, H_o, V_ph, T_o = _vertical_pair_vector(c, U, V)
    body = c.C(T_ph + H_o) + c.omega(V_ph + T_o)
    eta_nab = c.d_eta(U, V) + c.g(V, c.phi @ c._v(U))
    PV = c.ssd.P_proj @ c._v(V)
    printed = c.J @ (body + c.g(PV, c.vphi(U)) * c.xi)
    complete = c.J @ (body - eta_nab * c.xi)
    return printed, complete, c.sff(U, V), 1.0


def _geodesic_hv(c: _Ctx, X, U):
    phU, oU = c.vphi(U), c.hphi(U)
    body = c.C(c.A(X, phU) + c.H(c.nab(X, oU))) + c.omega(c.A(X, oU) + c.V(c.nab(X, phU)))
    BX = c.vphi(X)
    QU = c.ssd.Q_proj @ c._v(U)
    printed = c.J @ (body + c.g(QU, BX) * c.xi)
    complete = c.J @ (body - (c.d_eta(X, U) + c.g(U, BX)) * c.xi)
    return printed, complete, c.sff(X, U), 1.0


def _geodesic_d1d2(c: _Ctx, U, V):
    T_ph, H_o, V_ph, T_o = _vertical_pair_vector(c, U, V)
    printed = c.J @ (c.C(T_ph + T_ph) + c.omega(T_o + V_ph))
    eta_nab = c.d_eta(U, V) + c.g(V, c.phi @ c._v(U))
    complete = c.J @ (c.C(T_ph + H_o) + c.omega(V_ph + T_o) - eta_nab * c.xi)
    return printed, complete, c.sff(U, V), 1.0


# --- registry ----------------------------------------------------------------------------

IFF, SUFFICIENT = "iff", "sufficient"


@dataclass(frozen=True)
class Condition:
    id: str
    anchor: str
    description: str
    theorem: str
    frame: tuple
    evaluate: Callable
    kind: str = IFF


CONDITIONS: dict[str, Condition] = {}
THEOREMS: dict[str, tuple] = {}


def _add(cid, anchor, description, theorem, frame, fn, kind=IFF):
    CONDITIONS[cid] = Condition(cid, anchor, description, theorem, frame, fn, kind)
    THEOREMS.setdefault(theorem, ())
    THEOREMS[theorem] = THEOREMS[theorem] + (cid,)


_add("integrability.D1", "(∇π*)(U,φV)−(∇π*)(V,φU) ∉ Γ(π*μ)",
     "g₂(∇π*(U,φV) − ∇π*(V,φU), π*ωZ) = 0 for U,V ∈ D₁, Z ∈ D₂", "D1_integrable",
     ("D1", "D1", "D2"), _d1_integrable)
_add("integrability.D2", "g₂(π*ωW,(∇π*)(Z,φU)) + g₂(π*ωZ,(∇π*)(W,φU))",
     "antisymmetrized ∇π* condition for Z,W ∈ D₂ against U ∈ D₁", "D2_integrable",
     ("D2", "D2", "D1"), _d2_integrable)
_add("parallel.D1.slant_part", "g₂((∇π*)(U,φV), π*ωZ) = g₁(𝒯_U ωφZ, V)",
     "D₁ parallel, component along D₂", "D1_parallel", ("D1", "D1", "D2"), _d1_parallel_d2)
_add("parallel.D1.horizontal_part", "−g₂((∇π*)(U,φV), π*𝒞X) = g₁(V, ∇̂_U φℬX + 𝒯_U ωℬX) + g₁(V,φU)η(X)",
     "D₁ parallel, horizontal component", "D1_parallel", ("D1", "D1", "H"), _d1_parallel_h)
_add("parallel.D2.invariant_part", "g₂(π*ωW, (∇π*)(Z,φU)) = g₁(φW, ∇̂_Z φU)",
     "D₂ parallel, component along D₁", "D2_parallel", ("D2", "D2", "D1"), _d2_parallel_d1)
_add("parallel.D2.horizontal_part", "g₂((∇π*)(Z,ωW) − (∇π*)(Z,ωφW), π*X) = g₁(𝒯_Z ωW, ℬX) + g₁(W,φZ)η(X)",
     "D₂ parallel, horizontal component", "D2_parallel", ("D2", "D2", "H"), _d2_parallel_h)
_add("integrability.horizontal.invariant_part", "(∇π*)(Y,φV) + (∇π*)(X,φV) = g₁(φV, 𝒱(∇_XℬY + ∇_YℬX))",
     "horizontal distribution integrable, component along D₁", "horizontal_integrable",
     ("H", "H", "D1"), _h_integrable_d1)
_add("integrability.horizontal.slant_part",
     "g₂((∇π*)(X,𝒞Y) − (∇π*)(Y,𝒞X), π*ωW) = g₁(𝒜_XℬY + 𝒜_YℬX, ωW) + η(Y)g₁(X,ωW) − η(X)g₁(Y,ωW)",
     "horizontal distribution integrable, component along D₂", "horizontal_integrable",
     ("H", "H", "D2"), _h_integrable_d2)
_add("parallel.horizontal.invariant_part", "g₁(V, ∇̂_X φℬY + 𝒜_X ωℬY) = g₂(π*𝒞Y, (∇π*)(X,φV))",
     "horizontal distribution parallel, component along D₁", "horizontal_parallel",
     ("H", "H", "D1"), _h_parallel_d1)
_add("parallel.horizontal.slant_part",
     "g₁(𝒜_X ωW, ℬY) + η(Y)g₁(X,ωW) = g₂((∇π*)(X,Y), π*ωφW) − g₂((∇π*)(X,𝒞Y), π*ωW)",
     "horizontal distribution parallel, component along D₂", "horizontal_parallel",
     ("H", "H", "D2"), _h_parallel_d2)
_add("parallel.vertical", "g₁(ωV, 𝒯_U ℬX) + g₁(V,φU)η(X)",
     "fibres totally geodesic, tested on U ∈ D₁, V ∈ D₂", "vertical_parallel",
     ("D1", "D2", "H"), _vertical_parallel)
_add("geodesic.expansion", "−∇^π_X π*Z₂ = π*(𝒞(ℋ∇_X ωZ₁ ...",
     "∇π*(X,Z) rebuilt from the φ-decomposition of ∇_X φZ", "geodesic_sufficient",
     ("H", "V+H"), _geodesic_expansion, SUFFICIENT)
_add("geodesic.D1_pairs", "g₁(∇̂_{U₁}φV₁, ℬZ) = g₁(𝒯_{U₁}𝒞Z, φV₁) − g₁(V₁,φU₁)η(Z)",
     "∇π* on D₁ × D₁", "totally_geodesic_components", ("D1", "D1", "H"), _geodesic_d1)
_add("geodesic.D2_pairs", "g₂((∇π*)(U₂,ωφV₂) + (∇π*)(U₂,ωV₂), π*Z) = g₁(𝒯_{U₂}ωV₂, ℬZ) + g₁(V₂,φU₂)η(Z)",
     "∇π* on D₂ × D₂", "totally_geodesic_components", ("D2", "D2", "H"), _geodesic_d2)
_add("geodesic.mixed_pairs", "g₂((∇π*)(U,𝒞X), π*𝒞Y) − g₂((∇π*)(U,ωℬX), π*Y)",
     "∇π* on vertical × horizontal", "totally_geodesic_components", ("V", "H", "H"), _geodesic_mixed)
_add("geodesic.vertical_pairs", "𝒞(𝒯_UφV + ∇_U ωV) + ω(∇̂_UφV + 𝒯_UωV) + g₁(𝒫V,φU)ξ = 0",
     "∇π* on vertical × vertical as a vector", "totally_geodesic_vectors", ("V", "V"), _geodesic_vv)
_add("geodesic.horizontal_vertical", "𝒞(𝒜_XφU + ℋ∇_X ωU) + ω(𝒜_X ωU + 𝒱∇_X φU) + g₁(𝒬U, ℬX)ξ = 0",
     "∇π* on horizontal × vertical as a vector", "totally_geodesic_vectors", ("H", "V"), _geodesic_hv)
_add("geodesic.invariant_slant", "𝒞(𝒯_{U₁}φV₁ + ℋ∇_{U₁}φV₁) + ω(𝒯_{U₁}ωV₁ + ∇̂_{U₁}φV₁) = 0",
     "∇π* on D₁ × D₂ as a vector", "totally_geodesic_vectors", ("D1", "D2"), _geodesic_d1d2)

THEOREM_DESCRIPTIONS = {
    "D1_integrable": "D₁ integrable",
    "D2_integrable": "D₂ integrable",
    "D1_parallel": "D₁ parallel",
    "D2_parallel": "D₂ parallel",
    "horizontal_integrable": "horizontal distribution integrable",
    "horizontal_parallel": "horizontal distribution parallel",
    "vertical_parallel": "vertical distribution parallel (totally geodesic fibres)",
    "geodesic_sufficient": "sufficient condition for a totally geodesic map",
    "totally_geodesic_components": "totally geodesic map via scalar components",
    "totally_geodesic_vectors": "totally geodesic map via vector expressions",
}

for _c in CONDITIONS.values():
    register(f"char.{_c.id}", _c.anchor, f"{_c.description}: complete form agrees with the direct verdict",
             "characterization")
    register(f"char.{_c.id}.identity", _c.anchor, f"{_c.description}: complete form equals factor × direct",
             "characterization")
    register(f"char.{_c.id}.printed", _c.anchor, f"{_c.description}: displayed form agrees with the direct verdict",
             "characterization")
for _t, _desc in THEOREM_DESCRIPTIONS.items():
    register(f"theorem.{_t}", _desc, f"{_desc}: all conditions hold exactly when the property holds",
             "characterization")
register("integrability.D1", "[D₁, D₁] ⊂ D₁", "component of [U,V] outside D₁ for U,V ∈ D₁", "characterization")
register("integrability.D2", "[D₂, D₂] ⊂ D₂", "component of [Z,W] outside D₂ for Z,W ∈ D₂", "characterization")
register("integrability.horizontal", "[(ker π*)⊥, (ker π*)⊥] ⊂ (ker π*)⊥",
         "vertical component of [X,Y] for basic X,Y", "characterization")
register("integrability.vertical", "[ker π*, ker π*] ⊂ ker π*",
         "horizontal component of [U,V] for vertical U,V", "characterization")
register("umbilical.residual", "𝒯_V W = g₁(V,W)H", "max ‖𝒯_{Vᵢ}Vⱼ − δᵢⱼ H‖ over a vertical ONB",
         "characterization")
register("umbilical.mean_curvature_in_omega_D2", "H ∈ Γ(ωD₂)",
         "component of H outside ωD₂ when the fibres are umbilical", "characterization")
register("umbilical.frame_invariance", "H", "H from a rotated vertical ONB", "characterization")
register("geodesic.map", "∇π* = 0", "max ‖∇π*(E,F)‖ over frame pairs", "characterization")


def condition_ids() -> list[str]:
    return list(CONDITIONS)


def theorem_ids() -> list[str]:
    return list(THEOREMS)


def _condition(condition_id: str) -> Condition:
    if condition_id not in CONDITIONS:
        raise KeyError(f"unknown condition {condition_id!r}; valid ids: {', '.join(CONDITIONS)}")
    return CONDITIONS[condition_id]


def _tuples(c: _Ctx, frame: Sequence[str]):
    lists = [c.frame("V") + c.frame("H") if kind == "V+H" else c.frame(kind) for kind in frame]
    return product(*lists)


@dataclass(frozen=True)
class ConditionValues:
    """Maxima over frame tuples at one point."""

    printed: float
    complete: float
    direct: float
    identity: float
    tuples: int


def condition_values(setup: SubmersionSetup, condition_id: str, p, cfg: FDConfig) -> ConditionValues:
    _condition(condition_id)
    return _condition_values_cached(setup, condition_id, tuple(np.asarray(p, dtype=float).tolist()), cfg)


@lru_cache(maxsize=4096)
def _condition_values_cached(setup, condition_id, key, cfg) -> ConditionValues:
    cond = CONDITIONS[condition_id]
    c = _Ctx(setup, np.array(key), cfg)
    pr = co = di = ident = 0.0
    n = 0
    for fields in _tuples(c, cond.frame):
        printed, complete, direct, factor = cond.evaluate(c, *fields)
        pr = max(pr, c.size(printed))
        co = max(co, c.size(complete))
        di = max(di, c.size(direct))
        ident = max(ident, c.size(np.asarray(complete) - factor * np.asarray(direct)))
        n += 1
    return ConditionValues(pr, co, di, ident, n)


register_cache(_condition_values_cached)


def evaluate_condition_tuple(setup: SubmersionSetup, condition_id: str, p, vectors, cfg: FDConfig):
    """(printed, complete, direct, factor) for explicit frame vectors, extended as in the frames."""
    cond = _condition(condition_id)
    c = _Ctx(setup, p, cfg)
    if len(vectors) != len(cond.frame):
        raise ValueError(f"{condition_id} takes {len(cond.frame)} vectors")
    fields = []
    for kind, v in zip(cond.frame, vectors):
        if kind == "D1":
            fields.append(d1_field(setup, v, c.k, cfg))
        elif kind == "D2":
            fields.append(d2_field(setup, v, c.k, cfg))
        elif kind == "H":
            fields.append(basic_field(setup, c.J @ np.asarray(v, dtype=float), cfg))
        else:
            fields.append(vertical_field(setup, v, cfg))
    return cond.evaluate(c, *fields)


def _verdict(value: float, cfg: FDConfig) -> bool:
    return value < cfg.derivative_tol


def _agrees(kind: str, condition_holds: bool, property_holds: bool) -> bool:
    if kind == SUFFICIENT:
        return property_holds or not condition_holds
    return condition_holds == property_holds


def evaluate_characterization(setup: SubmersionSetup, condition_id: str, points, cfg: FDConfig) -> list[CheckEntry]:
    """Three entries: verdict agreement, the complete-form identity and the displayed form."""
    cond = _condition(condition_id)
    vals = [condition_values(setup, condition_id, p, cfg) for p in points]
    sev = severities(setup, points, cfg, POINTWISE)
    agree, printed_agree = [], []
    for v in vals:
        d = _verdict(v.direct, cfg)
        agree.append(0.0 if _agrees(cond.kind, _verdict(v.complete, cfg), d) else 1.0)
        printed_agree.append(0.0 if _agrees(cond.kind, _verdict(v.printed, cfg), d) else 1.0)
    per_point = [{"printed": v.printed, "complete": v.complete, "direct": v.direct, "identity": v.identity}
                 for v in vals]
    details = {
        "kind": cond.kind,
        "theorem": cond.theorem,
        "frame": list(cond.frame),
        "tuples_per_point": vals[0].tuples if vals else 0,
        "max_printed": max((v.printed for v in vals), default=0.0),
        "max_complete": max((v.complete for v in vals), default=0.0),
        "max_direct": max((v.direct for v in vals), default=0.0),
        "direct_holds_at": sum(_verdict(v.direct, cfg) for v in vals),
        "values": per_point[:20],
    }
    return [
        entry_from_residuals(f"char.{condition_id}", points, agree, 0.5, sev, details),
        entry_from_residuals(f"char.{condition_id}.identity", points, [v.identity for v in vals],
                             cfg.derivative_tol, sev),
        entry_from_residuals(f"char.{condition_id}.printed", points, printed_agree, 0.5, FINDING,
                             {"max_printed": details["max_printed"]}),
    ]


# --- direct properties -------------------------------------------------------------------

def _property_residual(c: _Ctx, theorem: str) -> float:
    """Size of the geometric obstruction to the property at p."""
    vals = []
    if theorem in ("vertical_parallel",):
        Vs = c.frame("V")
        vals = [c.sp.norm(c.T(U, V)) for U in Vs for V in Vs]
    elif theorem in ("totally_geodesic_components", "totally_geodesic_vectors", "geodesic_sufficient"):
        E = c.frame("V") + c.frame("H")
        vals = [c.size(c.sff(a, b)) for a in E for b in E]
    else:
        vals = [condition_values(c.setup, cid, c.p, c.cfg).direct for cid in THEOREMS[theorem]]
    return max(vals, default=0.0)


def check_theorem(setup: SubmersionSetup, theorem: str, points, cfg: FDConfig) -> CheckEntry:
    """All conditions of one characterization against the full geometric property."""
    if theorem not in THEOREMS:
        raise KeyError(f"unknown theorem {theorem!r}; valid ids: {', '.join(THEOREMS)}")
    cids = THEOREMS[theorem]
    kind = CONDITIONS[cids[0]].kind
    residuals, rows = [], []
    for p in points:
        c = _Ctx(setup, p, cfg)
        prop = _property_residual(c, theorem)
        conds = [condition_values(setup, cid, p, cfg) for cid in cids]
        cond_holds = all(_verdict(v.complete, cfg) for v in conds)
        printed_holds = all(_verdict(v.printed, cfg) for v in conds)
        prop_holds = _verdict(prop, cfg)
        residuals.append(0.0 if _agrees(kind, cond_holds, prop_holds) else 1.0)
        rows.append({"property_residual": prop, "property_holds": prop_holds,
                     "conditions_hold": cond_holds, "printed_conditions_hold": printed_holds})
    # a disagreement here means the conditions do not cover the whole property
    details = {"conditions": list(cids), "kind": kind, "values": rows[:20],
               "printed_disagreements": sum(r["printed_conditions_hold"] != r["property_holds"] for r in rows)}
    return entry_from_residuals(f"theorem.{theorem}", points, residuals, 0.5, FINDING, details)


def check_characterizations(setup: SubmersionSetup, points, cfg: FDConfig) -> list[CheckEntry]:
    entries = []
    for cid in CONDITIONS:
        entries.extend(evaluate_characterization(setup, cid, points, cfg))
    for t in THEOREMS:
        entries.append(check_theorem(setup, t, points, cfg))
    return entries


def check_integrability_direct(setup: SubmersionSetup, which: str, points, cfg: FDConfig) -> CheckEntry:
    """Component of brackets of frame fields outside the distribution (g₁-norm)."""
    kinds = {"D1": ("D1", "D2"), "D2": ("D2", "D1"), "horizontal": ("H", "V"), "vertical": ("V", "H")}
    if which not in kinds:
        raise KeyError(f"unknown distribution {which!r}; valid: {', '.join(kinds)}")
    own, other = kinds[which]
    residuals = []
    for p in points:
        c = _Ctx(setup, p, cfg)
        F = c.frame(own)
        worst = 0.0
        for i, a in enumerate(F):
            for b in F[i + 1:]:
                br = c.bracket(a, b)
                if which == "horizontal":
                    out = c.V(br)
                elif which == "vertical":
                    out = c.H(br)
                else:
                    P_own = c.ssd.P_proj if which == "D1" else c.ssd.Q_proj
                    out = br - P_own @ c.V(br)
                worst = max(worst, c.sp.norm(out))
        residuals.append(worst)
    # only the fibres are integrable by theory; the others are measurements
    sev = severities(setup, points, cfg, ()) if which == "vertical" else FINDING
    return entry_from_residuals(f"integrability.{which}", points, residuals, cfg.derivative_tol, sev)


def mean_curvature(setup: SubmersionSetup, p, cfg: FDConfig, basis=None) -> np.ndarray:
    """H = (1/dim fibre) Σ 𝒯_{Vᵢ}Vᵢ over a vertical ONB."""
    sp = split(setup, p, cfg)
    B = sp.vertical_basis if basis is None else np.asarray(basis, dtype=float)
    if B.shape[0] == 0:
        return np.zeros(sp.point.size)
    Vs = [vertical_field(setup, v, cfg) for v in B]
    return sum(oneill_T(setup, V, V, sp.point, cfg) for V in Vs) / len(Vs)


def check_totally_umbilical(setup: SubmersionSetup, points, cfg: FDConfig, seed: int = 0) -> list[CheckEntry]:
    rng = np.random.default_rng(seed)
    umb, member, invariance, rows = [], [], [], []
    for p in points:
        c = _Ctx(setup, p, cfg)
        Vs = c.frame("V")
        H = mean_curvature(setup, c.p, cfg)
        r = 0.0
        for i, a in enumerate(Vs):
            for j, b in enumerate(Vs):
                r = max(r, c.sp.norm(c.T(a, b) - (H if i == j else 0.0)))
        umb.append(r)
        # component of H outside ωD₂
        OB = c.ssd.omegaD2_basis
        P_om = OB.T @ OB @ c.sp.metric if OB.shape[0] else np.zeros((c.p.size, c.p.size))
        out = c.sp.norm(H - P_om @ H)
        member.append(out if r < cfg.derivative_tol else 0.0)
        m = c.sp.vertical_basis.shape[0]
        if m:
            Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
            H2 = mean_curvature(setup, c.p, cfg, Q @ c.sp.vertical_basis)
            invariance.append(c.sp.norm(H2 - H))
        else:
            invariance.append(0.0)
        rows.append({"H_norm": c.sp.norm(H), "mu_component": c.sp.norm(c.ssd.mu_proj @ H),
                     "outside_omega_D2": out, "umbilical": r < cfg.derivative_tol})
    sev = severities(setup, points, cfg, POINTWISE)
    return [
        entry_from_residuals("umbilical.residual", points, umb, cfg.derivative_tol, FINDING, {"values": rows[:20]}),
        entry_from_residuals("umbilical.mean_curvature_in_omega_D2", points, member, cfg.derivative_tol, sev),
        entry_from_residuals("umbilical.frame_invariance", points, invariance, cfg.algebraic_tol, FAIL),
    ]


def check_totally_geodesic_map(setup: SubmersionSetup, points, cfg: FDConfig) -> CheckEntry:
    """max ‖∇π*(E,F)‖ over vertical and basic frame pairs, with the condition verdicts alongside."""
    residuals, rows = [], []
    for p in points:
        c = _Ctx(setup, p, cfg)
        r = _property_residual(c, "totally_geodesic_components")
        residuals.append(r)
        rows.append({t: all(_verdict(condition_values(setup, cid, p, cfg).complete, cfg) for cid in THEOREMS[t])
                     for t in ("totally_geodesic_components", "totally_geodesic_vectors")})
    agree = sum(all(v == (r < cfg.derivative_tol) for v in row.values()) for r, row in zip(residuals, rows))
    return entry_from_residuals("geodesic.map", points, residuals, cfg.derivative_tol, FINDING,
                                {"conditions_agree_at": agree, "conditions": rows[:20]})
