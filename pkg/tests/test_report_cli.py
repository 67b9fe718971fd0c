import json

import numpy as np
import pytest

from semislant.checks import FAIL, PASS, CheckEntry, all_specs, register, spec_for
from semislant.cli import main
from semislant.examples import EXAMPLES, registry_example
from semislant.report import (
    ConfigError,
    RunConfig,
    SampleConfig,
    VerificationReport,
    emit_report,
    load_config,
    run_suite,
    sample_points,
)

SMALL = SampleConfig(count=3, seed=1)


def test_registry_matrices():
    A = registry_example("ex6_4").map.matrix
    r = 1 / np.sqrt(2)
    assert np.allclose(A, [[0, r, 0, 0, 0, -r, 0], [0, 0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 0, 1]])
    B = registry_example("ex6_3", np.pi / 4).map.matrix
    assert np.allclose(B[2, 2:4], [np.sin(np.pi / 4), -np.cos(np.pi / 4)])
    s = registry_example("ex6_6")
    assert (s.map.m1, s.map.m2) == (13, 7)


@pytest.mark.parametrize("args,exc", [(("ex9_9",), KeyError), (("ex6_3",), ValueError),
                                      (("ex6_5", 2.0), ValueError)])
def test_registry_errors(args, exc):
    with pytest.raises(exc):
        registry_example(*args)


def test_check_registry():
    ids = [s.id for s in all_specs()]
    assert len(ids) == len(set(ids))
    assert all(s.anchor for s in all_specs())
    with pytest.raises(KeyError):
        spec_for("no.such.check")
    with pytest.raises(ValueError):
        register("contact.phi_squared", "x", "duplicate", "contact")


def test_sampling_modes():
    s = registry_example("ex6_4")
    pts = sample_points(s, SampleConfig(count=10, seed=3))
    assert all(np.all(p[3:6] == 0) for p in pts)
    box = sample_points(s, SampleConfig(mode="box", count=10, seed=3, box_halfwidth=0.2))
    assert max(np.abs(p).max() for p in box) <= 0.2
    assert any(np.abs(p[3:6]).max() > 0 for p in box)
    again = sample_points(s, SampleConfig(count=10, seed=3))
    assert all(np.array_equal(a, b) for a, b in zip(pts, again))


def test_run_suite_classification_and_selection():
    rep = run_suite(RunConfig(example_id="ex6_3", alpha=np.pi / 3, sample=SMALL,
                              checks=("contact", "submersion.rank")))
    assert rep.classification["class"] == "semi-slant"
    assert rep.classification["theta"] == pytest.approx(np.pi / 3, abs=1e-6)
    ids = [e.id for e in rep.checks]
    assert "submersion.rank" in ids and "contact.phi_squared" in ids
    assert not any(i.startswith(("oneill", "char", "lemma")) for i in ids)
    assert len(ids) == len(set(ids))
    assert rep.exit_code == 0


def test_box_sampling_produces_findings_not_failures():
    rep = run_suite(RunConfig(example_id="ex6_3", alpha=1.0, sample=SampleConfig(mode="box", count=2, seed=0),
                              checks=("submersion", "contact")))
    xi = next(e for e in rep.checks if e.id == "submersion.xi_horizontal")
    assert xi.status == "finding"
    assert rep.exit_code == 0


def test_json_round_trip_and_empty_report():
    rep = run_suite(RunConfig(example_id="ex6_4", sample=SMALL, checks=("submersion",)))
    data = json.loads(emit_report(rep, "json"))
    back = VerificationReport.from_dict(data)
    assert back.to_dict() == json.loads(json.dumps(rep.to_dict()))
    empty = VerificationReport(rep.meta, rep.classification, [])
    assert json.loads(emit_report(empty, "json"))["checks"] == []
    assert "summary" in emit_report(empty, "text").decode()
    with pytest.raises(ValueError):
        emit_report(rep, "yaml")


def test_failing_check_sets_exit_code():
    entry = CheckEntry("submersion.rank", "rank π* = m₂", 1, 2.0, 0.5, FAIL)
    rep = VerificationReport({}, {}, [entry])
    assert rep.exit_code == 1
    rep.checks[0].status = PASS
    assert rep.exit_code == 0


@pytest.mark.parametrize("bad,field", [
    ({}, "example_id"),
    ({"example_id": "ex6_4", "colour": 1}, "colour"),
    ({"example_id": "ex6_3"}, "alpha"),
    ({"example_id": "ex6_3", "alpha": 2.0}, "alpha"),
    ({"example_id": "ex6_4", "sample": {"count": 0}}, "sample.count"),
    ({"example_id": "ex6_4", "sample": {"mode": "sphere"}}, "sample.mode"),
    ({"example_id": "ex6_4", "sample": {"size": 3}}, "sample.size"),
    ({"example_id": "ex6_4", "tolerances": {"step": -1}}, "tolerances"),
    ({"example_id": "ex6_4", "tolerances": {"speed": 1}}, "tolerances.speed"),
    ({"example_id": "ex6_4", "checks": ["nope"]}, "checks"),
    ({"example_id": "ex6_4", "variant": "other"}, "variant"),
    ({"custom": {"matrix": [[1, 0, 0]]}}, "n"),
    ({"custom": {"matrix": [[1, 0]]}, "n": 1}, "custom.matrix"),
    ({"custom": {"matrix": [[1, 0, 0]], "offset": [1, 2]}, "n": 1}, "custom.offset"),
])
def test_config_validation(bad, field):
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict(bad)
    assert err.value.field == field


def test_custom_map_config_runs():
    cfg = RunConfig.from_dict({"custom": {"matrix": [[1, 0, 0], [0, 1, 0]]}, "n": 1,
                               "sample": {"count": 2}, "checks": ["submersion.rank"]})
    rep = run_suite(cfg)
    assert [e.id for e in rep.checks] == ["submersion.rank"]
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_json_errors_report_position(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{\n  "example_id": "ex6_4",\n  "alpha": ,\n}')
    with pytest.raises(ConfigError) as err:
        load_config(str(path))
    assert "line 3" in str(err.value)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["list-examples"]) == 0
    listing = capsys.readouterr().out
    assert all(k in listing for k in EXAMPLES)
    assert main(["list-checks"]) == 0
    assert "oneill.T_symmetric" in capsys.readouterr().out
    assert main(["verify", "--example", "ex6_4", "--points", "2", "--checks", "submersion,contact",
                 "--format", "text"]) == 0
    assert "summary" in capsys.readouterr().out
    assert main(["verify", "--example", "ex6_3", "--points", "2"]) == 2
    assert main(["verify", "--example", "ex6_4", "--points", "0"]) == 2
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["frobnicate"]) == 2
    # the Euclidean codomain breaks the isometry at every slice point
    assert main(["verify", "--example", "ex6_4", "--codomain", "euclidean", "--points", "2",
                 "--checks", "submersion.isometry"]) == 1


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    out = tmp_path / "out.json"
    cfg.write_text(json.dumps({"example_id": "ex6_4", "sample": {"count": 2, "seed": 9},
                               "checks": ["submersion"]}))
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["meta"]["seed"] == 9
    assert {c["id"] for c in report["checks"]} == {"submersion.rank", "submersion.isometry",
                                                   "submersion.xi_horizontal"}
    assert all("anchor" in c for c in report["checks"])
