"""Acceptance criteria 1-8; each test records one PASS/FAIL line."""

import numpy as np
import pytest

from conftest import record
from oracles import monolithic_sff, sasakian_christoffel, warped_codomain_christoffel, warped_setup
from semislant.characterizations import CONDITIONS, THEOREMS, check_characterizations
from semislant.checks import FINDING, PASS
from semislant.cli import main
from semislant.contact import AS_PRINTED, CORRECTED, check_almost_contact, check_sasakian, standard_sasakian
from semislant.diffgeo import FDConfig, VectorField, christoffel
from semislant.examples import registry_example
from semislant.report import RunConfig, SampleConfig, emit_report, run_suite, sample_points
from semislant.semislant import ALGEBRAIC_IDS, DERIVATIVE_IDS, check_structure_lemmas, detect_semi_slant
from semislant.submersion import check_oneill, second_fundamental_form

SLICE = SampleConfig(count=100, seed=42)


def _slice_points(setup, count, seed=42):
    return sample_points(setup, SampleConfig(count=count, seed=seed))


def test_criterion_1_slant_angles(cfg):
    cases = [(ex, a, a) for ex in ("ex6_3", "ex6_5") for a in (np.pi / 6, np.pi / 4, np.pi / 3)]
    cases += [("ex6_4", None, np.pi / 4), ("ex6_6", None, np.pi / 4)]
    worst = 0.0
    bad = []
    for ex, alpha, expected in cases:
        s = registry_example(ex, alpha)
        for p in sample_points(s, SLICE):
            d = detect_semi_slant(s, p, cfg)
            err = np.inf if d.theta is None else abs(d.theta - expected)
            worst = max(worst, err)
            if err > 1e-6 or d.classification != "semi-slant":
                bad.append((ex, alpha, p))
    ok = not bad
    record(1, ok, f"slant angle over {len(cases)} configurations x 100 slice points, max |θ−expected| = {worst:.1e}")
    assert ok, bad[:3]


def test_criterion_2_spectrum(cfg):
    s = registry_example("ex6_3", np.pi / 3)
    d = detect_semi_slant(s, np.zeros(9), cfg)
    eig = np.sort(d.eigenvalues)[::-1]
    err = np.abs(eig - [1.0, 1.0, 0.25, 0.25]).max()
    ok = err <= 1e-8 and d.dim_d1 == 2 and d.dim_d2 == 2
    record(2, ok, f"eigenvalues of −φ̂² at the origin {np.round(eig, 12).tolist()}, error {err:.1e}, "
                  f"dims ({d.dim_d1}, {d.dim_d2})")
    assert ok


def test_criterion_3_sasakian(cfg):
    pts = list(np.random.default_rng(3).uniform(-1, 1, size=(100, 5)))
    good = standard_sasakian(2, CORRECTED)
    algebraic = check_almost_contact(good, pts, cfg)
    sasaki = check_sasakian(good, pts, cfg)
    alg_ok = all(e.status == PASS and e.max_residual <= 1e-9 for e in algebraic)
    sas_ok = all(e.status == PASS and e.max_residual <= 1e-4 for e in sasaki)
    printed = {e.id: e for e in check_almost_contact(standard_sasakian(2, AS_PRINTED), pts, cfg)}
    sq = printed["contact.phi_squared"]
    off_slice = [f for f in sq.per_point_failures if np.abs(np.asarray(f["point"])[2:4]).max() > 0]
    printed_ok = sq.status == FINDING and sq.max_residual > 1e-9 and bool(off_slice)
    ok = alg_ok and sas_ok and printed_ok
    record(3, ok, f"corrected: algebraic max {max(e.max_residual for e in algebraic):.1e}, Sasakian max "
                  f"{max(e.max_residual for e in sasaki):.1e}; printed φ² residual {sq.max_residual:.2f} "
                  f"reported as {sq.status}")
    assert ok


def test_criterion_4_oneill(cfg):
    s = registry_example("ex6_4")
    entries = check_oneill(s, _slice_points(s, 50), cfg)
    wanted = {"oneill.T_symmetric", "oneill.A_alternating", "oneill.A_half_bracket"}
    got = {e.id: e for e in entries if e.id in wanted}
    ok = set(got) == wanted and all(e.status == PASS and e.max_residual <= 1e-4 for e in got.values())
    record(4, ok, "O'Neill symmetries on 50 ex6_4 points: "
                  + ", ".join(f"{k.split('.')[1]} {v.max_residual:.1e}" for k, v in sorted(got.items())))
    assert ok


def test_criterion_5_lemmas(cfg):
    s = registry_example("ex6_3", np.pi / 3)
    entries = {e.id: e for e in check_structure_lemmas(s, _slice_points(s, 20), cfg)}
    core = [entries[i] for i in ALGEBRAIC_IDS + DERIVATIVE_IDS]
    core_ok = all(e.status == PASS for e in core)
    deriv_ok = all(entries[i].max_residual <= 1e-4 for i in DERIVATIVE_IDS)
    printed = entries["lemma.square_horizontal_printed"]
    printed_ok = printed.status == FINDING and printed.max_residual > cfg.algebraic_tol
    ok = core_ok and deriv_ok and printed_ok
    record(5, ok, f"{len(core)} structure identities pass on 20 ex6_3 slice points "
                  f"(max {max(e.max_residual for e in core):.1e}); printed square identity off by "
                  f"{printed.max_residual:.2f} and reported as {printed.status}")
    assert ok


@pytest.mark.slow
def test_criterion_6_characterizations(cfg):
    equation_bad, theorem_bad = [], []
    for ex, alpha in (("ex6_3", np.pi / 3), ("ex6_4", None)):
        s = registry_example(ex, alpha)
        entries = {e.id: e for e in check_characterizations(s, _slice_points(s, 8), cfg)}
        for cid in CONDITIONS:
            if entries[f"char.{cid}"].status != PASS:
                equation_bad.append(f"{ex}:{cid}")
        for t in THEOREMS:
            if entries[f"theorem.{t}"].status != PASS:
                theorem_bad.append(f"{ex}:{t}")
    n_eq = 2 * len(CONDITIONS)
    n_th = 2 * len(THEOREMS)
    # the condition-by-condition comparison is the part that must hold without exception
    assert not equation_bad, equation_bad
    if theorem_bad:
        record(6, False, f"{n_eq}/{n_eq} condition verdicts agree; theorem level disagrees in "
                         f"{len(theorem_bad)}/{n_th}: {', '.join(theorem_bad)} (the parallel-fibre condition "
                         "only constrains D1 x D2 pairs while T_U φU never vanishes on D1)")
        pytest.xfail("fibre parallelism condition does not cover D1 x D1 pairs: " + ", ".join(theorem_bad))
    record(6, True, f"{n_eq} condition verdicts and {n_th} theorem verdicts agree")


def test_criterion_7_oracles(cfg):
    rng = np.random.default_rng(7)
    chris_err = 0.0
    for n in (1, 2):
        g = standard_sasakian(n).g
        oracle = sasakian_christoffel(n)
        for p in rng.uniform(-1, 1, size=(20, 2 * n + 1)):
            chris_err = max(chris_err, np.abs(christoffel(g, p, cfg) - oracle(p)).max())

    sff_err = 0.0
    setups = [(registry_example("ex6_3", np.pi / 3), lambda q: np.zeros((5, 5, 5))),
              (warped_setup(), warped_codomain_christoffel())]
    for s, gamma2 in setups:
        n = (s.map.m1 - 1) // 2
        gamma1 = sasakian_christoffel(n)
        for p in rng.uniform(-0.5, 0.5, size=(10, s.map.m1)):
            a, b = rng.normal(size=(2, s.map.m1))
            M = rng.normal(size=(s.map.m1, s.map.m1))
            Y = VectorField(lambda q, b=b, M=M: b + M @ q, lambda q, M=M: M)
            engine = second_fundamental_form(s, a, Y, p, cfg)
            ref = monolithic_sff(s.map, lambda q: s.map.jacobian(q, cfg), gamma1, gamma2, p, a, b, M)
            sff_err = max(sff_err, np.abs(engine - ref).max())
    ok = chris_err <= 1e-8 and sff_err <= 1e-4
    record(7, ok, f"Christoffel vs symbolic oracle {chris_err:.1e}; second fundamental form vs monolithic "
                  f"formula {sff_err:.1e}")
    assert ok


def test_criterion_8_determinism(tmp_path):
    config = RunConfig(example_id="ex6_3", alpha=np.pi / 3, sample=SampleConfig(count=5, seed=11))
    first = emit_report(run_suite(config), "json")
    second = emit_report(run_suite(config), "json")
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        main(["verify", "--example", "ex6_4", "--points", "4", "--seed", "5", "--out", str(out)])
        outs.append(out.read_bytes())
    ok = first == second and outs[0] == outs[1]
    record(8, ok, f"two library runs and two CLI runs give byte-identical JSON ({len(first)} and "
                  f"{len(outs[0])} bytes)")
    assert ok
