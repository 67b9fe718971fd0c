import numpy as np
import pytest

from semislant.checks import FAIL, FINDING, PASS
from semislant.contact import (
    AS_PRINTED,
    CONTACT_SCALE,
    CORRECTED,
    check_almost_contact,
    check_contact_metric,
    check_duality,
    check_normality,
    check_sasakian,
    fundamental_form_residuals,
    nijenhuis_residual,
    standard_sasakian,
)
from semislant.diffgeo import FDConfig

CFG = FDConfig()


def _points(n, count=6, seed=0):
    return list(np.random.default_rng(seed).uniform(-1, 1, size=(count, 2 * n + 1)))


@pytest.mark.parametrize("n", [1, 3])
def test_corrected_structure_passes_everything(n):
    s = standard_sasakian(n, CORRECTED)
    pts = _points(n)
    entries = (check_almost_contact(s, pts, CFG) + [check_duality(s, pts, CFG), check_contact_metric(s, pts, CFG),
                                                   check_normality(s, pts, CFG)] + check_sasakian(s, pts, CFG))
    assert all(e.status == PASS for e in entries), [(e.id, e.max_residual) for e in entries if e.status != PASS]


def test_printed_structure_breaks_off_the_slice_only():
    s = standard_sasakian(2, AS_PRINTED)
    off = check_almost_contact(s, _points(2), CFG)
    sq = next(e for e in off if e.id == "contact.phi_squared")
    assert sq.status == FINDING
    on = [np.array([0.3, -0.2, 0.0, 0.0, 0.5])]
    assert all(e.status == PASS for e in check_almost_contact(s, on, CFG))


def test_corrected_phi_squared_at_explicit_point():
    s = standard_sasakian(1)
    p = np.array([0.1, 0.7, -0.3])
    P = s.phi(p)
    assert np.allclose(P @ P, -np.eye(3) + np.outer(s.xi(p), s.eta(p)))


def test_fundamental_form_selects_half_scale():
    s = standard_sasakian(2)
    res = fundamental_form_residuals(s, _points(2)[0], CFG)
    assert res[CONTACT_SCALE] < 1e-8
    assert res[1.0] > 0.1 and res[2.0] > 0.1
    assert check_contact_metric(s, _points(2), CFG).details["best_scale"] == CONTACT_SCALE


def test_normality_needs_the_matching_scale():
    s = standard_sasakian(1)
    p = _points(1)[0]
    e = np.eye(3)
    assert np.abs(nijenhuis_residual(s, e[0], e[1], p, CFG)).max() < 1e-8
    assert np.abs(nijenhuis_residual(s, e[0], e[1], p, CFG, scale=1.0)).max() > 0.1


def test_severity_depends_on_variant():
    bad = check_duality(standard_sasakian(1, AS_PRINTED), _points(1), CFG)
    assert bad.status in (PASS, FINDING)
    assert check_duality(standard_sasakian(1), _points(1), CFG).status != FAIL


@pytest.mark.parametrize("args", [(0,), (1.5,), (2, "nope")])
def test_invalid_structure_arguments(args):
    with pytest.raises(ValueError):
        standard_sasakian(*args)
