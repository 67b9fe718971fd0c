import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import warped_setup
from semislant.checks import FAIL, FINDING, PASS
from semislant.diffgeo import FDConfig
from semislant.examples import EXAMPLES, affine_setup, registry_example
from semislant.submersion import (
    AffineMap,
    SmoothMap,
    basic_field,
    check_fundamental_equations,
    check_oneill,
    check_rank,
    check_riemannian_submersion,
    check_second_fundamental_form_symmetry,
    check_xi_horizontal,
    horizontal_lift,
    oneill_A,
    oneill_T,
    second_fundamental_form,
    split,
    vertical_field,
)

CFG = FDConfig()
point3 = arrays(float, 3, elements=st.floats(-1, 1))


@pytest.fixture(scope="module")
def heisenberg():
    # (x, y, z) -> (x, y): the fibres are the Reeb orbits
    return affine_setup([[1, 0, 0], [0, 1, 0]], 1, name="heisenberg")


def test_heisenberg_lifts_and_oneill_tensors(heisenberg):
    p = np.array([0.3, 0.4, 0.1])
    X, Y = basic_field(heisenberg, [1, 0], CFG), basic_field(heisenberg, [0, 1], CFG)
    # the lift of ∂x is ∂x + y∂z because it must annihilate η
    assert np.allclose(X(p), [1, 0, 0.4])
    assert np.allclose(Y(p), [0, 1, 0])
    # A_XY = ½𝒱[X, Y] = −½∂z
    assert np.allclose(oneill_A(heisenberg, X, Y, p, CFG), [0, 0, -0.5], atol=1e-8)
    Z = vertical_field(heisenberg, [0, 0, 1], CFG)
    assert np.allclose(oneill_T(heisenberg, Z, Z, p, CFG), 0, atol=1e-8)


def test_heisenberg_xi_is_vertical(heisenberg):
    on_slice = check_xi_horizontal(heisenberg, [np.array([0.3, 0.0, 0.1])], CFG)
    off_slice = check_xi_horizontal(heisenberg, [np.array([0.3, 0.4, 0.1])], CFG)
    assert on_slice.status == FAIL
    assert off_slice.status == FINDING


@settings(max_examples=25, deadline=None)
@given(point3, arrays(float, 2, elements=st.floats(-2, 2)))
def test_lift_is_horizontal_and_projects(heisenberg, p, w):
    sp = split(heisenberg, p, CFG)
    X = horizontal_lift(heisenberg, w, p, CFG)
    assert np.allclose(sp.jacobian @ X, w, atol=1e-10)
    assert np.allclose(sp.vert(X), 0, atol=1e-10)
    assert np.allclose(sp.vertical_projector + sp.horizontal_projector, np.eye(3), atol=1e-10)


@pytest.mark.parametrize("ex,alpha", [("ex6_3", 1.0), ("ex6_4", None), ("ex6_5", 0.5), ("ex6_6", None)])
def test_registered_examples_are_riemannian_submersions_on_the_slice(ex, alpha):
    s = registry_example(ex, alpha)
    pts = [np.zeros(s.map.m1), np.r_[np.full(EXAMPLES[ex].n, 0.2), np.zeros(EXAMPLES[ex].n), 0.3]]
    for check in (check_rank, check_riemannian_submersion, check_xi_horizontal,
                  check_second_fundamental_form_symmetry):
        e = check(s, pts, CFG)
        assert e.status == PASS, (e.id, e.max_residual)


def test_euclidean_codomain_is_not_isometric():
    e = check_riemannian_submersion(registry_example("ex6_4", codomain="euclidean"), [np.zeros(7)], CFG)
    assert e.status == FAIL and e.max_residual == pytest.approx(3.0)


def test_xi_leaves_horizontal_space_off_slice():
    s = registry_example("ex6_3", 1.0)
    e = check_xi_horizontal(s, [np.array([0, 0, 0, 0, 0.3, 0.2, 0.1, 0.4, 0])], CFG)
    assert e.status == FINDING and e.max_residual > 0.1


def test_oneill_checks_on_nonlinear_map():
    s = warped_setup()
    pts = [np.zeros(7), np.array([0.3, -0.2, 0.4, 0, 0, 0, 0.1])]
    for e in check_oneill(s, pts, CFG) + check_fundamental_equations(s, pts, CFG):
        if e.id != "oneill.basic_projectable":
            assert e.status == PASS, (e.id, e.max_residual)
    assert check_second_fundamental_form_symmetry(s, pts, CFG).status == PASS


def test_second_fundamental_form_symmetric_for_random_fields():
    s = warped_setup()
    rng = np.random.default_rng(2)
    p = rng.uniform(-0.3, 0.3, 7)
    a, b = rng.normal(size=(2, 7))
    assert np.allclose(second_fundamental_form(s, a, b, p, CFG), second_fundamental_form(s, b, a, p, CFG),
                       atol=1e-6)


def test_rank_deficient_map():
    bad = affine_setup([[1, 0, 0], [2, 0, 0]], 1)
    p = np.array([0.3, 0.4, 0.1])
    assert check_rank(bad, [p], CFG).status == FAIL
    with pytest.raises(np.linalg.LinAlgError):
        horizontal_lift(bad, [1, 0], p, CFG)


def test_map_validation():
    with pytest.raises(ValueError):
        SmoothMap(lambda p: p, 2, 2)
    with pytest.raises(ValueError):
        AffineMap([[1, 0, 0]], offset=[1, 2])
    wrong = SmoothMap(lambda p: p[:2], 3, 2, jacobian=lambda p: np.eye(3))
    with pytest.raises(ValueError):
        wrong.jacobian(np.zeros(3), CFG)
    with pytest.raises(ValueError):
        affine_setup([[1, 0]], 1)


def test_fd_jacobian_matches_analytic():
    s = warped_setup()
    p = np.array([0.1, 0.2, -0.3, 0.4, 0.5, -0.1, 0.2])
    fd = SmoothMap(s.map.evaluator, 7, 3)
    assert np.allclose(fd.jacobian(p, CFG), s.map.jacobian(p, CFG), atol=1e-8)
