import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import _christoffel_exprs, sasakian_christoffel
from semislant.contact import standard_sasakian
from semislant.diffgeo import (
    DegenerateMetricError,
    FDConfig,
    MetricField,
    VectorField,
    as_point,
    christoffel,
    covariant_derivative,
    exterior_derivative_1form,
    lie_bracket,
    orthonormalize,
    projector,
)

CFG = FDConfig()
coords = st.floats(-1, 1, allow_nan=False)


def _poly_field(C, D):
    """X(q) = C q + D (q*q), an arbitrary quadratic field with exact Jacobian."""
    return VectorField(lambda q: C @ q + D @ (q * q), lambda q: C + 2 * D * q)


@pytest.mark.parametrize("n", [1, 2])
def test_christoffel_matches_symbolic(n):
    g = standard_sasakian(n).g
    oracle = sasakian_christoffel(n)
    for p in np.random.default_rng(n).uniform(-1, 1, size=(5, 2 * n + 1)):
        assert np.abs(christoffel(g, p, CFG) - oracle(p)).max() < 1e-8


def test_christoffel_polar_plane():
    r, t = sp.symbols("r t")
    exact = _christoffel_exprs(sp.diag(1, r ** 2), [r, t])
    assert exact[0][1][1] == -r and exact[1][0][1] == 1 / r
    g = MetricField(lambda p: np.diag([1.0, p[0] ** 2]), 2)
    G = christoffel(g, np.array([2.0, 0.3]), CFG)
    assert G[0, 1, 1] == pytest.approx(-2.0, abs=1e-8)
    assert G[1, 0, 1] == pytest.approx(0.5, abs=1e-8)


def test_levi_civita_is_metric_compatible_and_torsion_free():
    g = standard_sasakian(2).g
    rng = np.random.default_rng(0)
    p = rng.uniform(-1, 1, 5)
    X, Y, Z = (_poly_field(rng.normal(size=(5, 5)), rng.normal(size=(5, 5))) for _ in range(3))
    nab = lambda A, B: covariant_derivative(g, A, B, p, CFG)
    torsion = nab(X, Y) - nab(Y, X) - lie_bracket(X, Y, p, CFG)
    assert np.abs(torsion).max() < 1e-8
    gYZ = lambda q: Y(q) @ g(q) @ Z(q)
    lhs = (gYZ(p + 1e-5 * X(p)) - gYZ(p - 1e-5 * X(p))) / 2e-5
    rhs = nab(X, Y) @ g(p) @ Z(p) + Y(p) @ g(p) @ nab(X, Z)
    assert lhs == pytest.approx(rhs, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(arrays(float, (3, 3), elements=coords), arrays(float, (3, 3), elements=coords),
       arrays(float, (3, 3), elements=coords), arrays(float, 3, elements=coords))
def test_bracket_antisymmetric(C1, D1, C2, p):
    X, Y = _poly_field(C1, D1), _poly_field(C2, np.zeros((3, 3)))
    assert np.allclose(lie_bracket(X, Y, p, CFG), -lie_bracket(Y, X, p, CFG), atol=1e-12)


def test_bracket_of_coordinate_fields_vanishes_and_fd_matches_analytic():
    p = np.array([0.2, -0.4, 0.7])
    assert np.allclose(lie_bracket(np.eye(3)[0], np.eye(3)[2], p, CFG), 0)
    rng = np.random.default_rng(1)
    X, Y = (_poly_field(rng.normal(size=(3, 3)), rng.normal(size=(3, 3))) for _ in range(2))
    bare = lie_bracket(lambda q: X(q), lambda q: Y(q), p, CFG)
    assert np.allclose(bare, lie_bracket(X, Y, p, CFG), atol=1e-8)


def test_exterior_derivative_of_contact_form():
    s = standard_sasakian(1)
    p = np.array([0.3, 0.5, -0.2])
    e = np.eye(3)
    # η = (dz − y dx)/2 so dη(∂x, ∂y) = 1/2 without a normalizing factor
    assert exterior_derivative_1form(s.eta, e[0], e[1], p, CFG) == pytest.approx(0.5, abs=1e-9)
    assert exterior_derivative_1form(s.eta, e[0], e[2], p, CFG) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(arrays(float, (4, 4), elements=st.floats(-2, 2)), st.integers(1, 4))
def test_orthonormalize_and_projector(M, k):
    G = M @ M.T + np.eye(4)
    basis = np.random.default_rng(k).normal(size=(k, 4))
    Q = orthonormalize(basis, G, CFG)
    assert Q.shape == (k, 4)
    assert np.allclose(Q @ G @ Q.T, np.eye(k), atol=1e-9)
    P = projector(Q, G)
    assert np.allclose(P @ P, P, atol=1e-9)
    comp = orthonormalize([(np.eye(4) - P) @ e for e in np.eye(4)], G, CFG, scale=np.sqrt(np.diag(G).max()))
    assert comp.shape[0] == 4 - k
    assert np.allclose(P + projector(comp, G), np.eye(4), atol=1e-8)


def test_orthonormalize_drops_dependent_vectors():
    G = np.eye(3)
    Q = orthonormalize([[1, 0, 0], [2, 0, 0], [0, 1, 0]], G, CFG)
    assert Q.shape == (2, 3)
    assert orthonormalize([], G, CFG).shape == (0, 3)
    assert orthonormalize([[0, 0, 0]], G, CFG).shape == (0, 3)


def test_degenerate_metric_rejected():
    g = MetricField(lambda p: np.diag([1.0, 0.0]), 2)
    with pytest.raises(DegenerateMetricError):
        christoffel(g, np.zeros(2), CFG)
    with pytest.raises(DegenerateMetricError):
        christoffel(MetricField(lambda p: np.array([[1.0, 2.0], [0.0, 1.0]]), 2), np.zeros(2), CFG)


def test_config_and_point_validation():
    with pytest.raises(ValueError):
        FDConfig(step=0)
    with pytest.raises(ValueError):
        FDConfig(rank_threshold=2)
    with pytest.raises(ValueError):
        as_point([0, np.nan])
    with pytest.raises(ValueError):
        as_point([0, 1], dim=3)
