"""Canonical JSON, digests, CSV/SVG writers, sweep driver, and the CLI.

Determinism is the load-bearing property here: rerunning any writer or any
CLI command must reproduce its output byte for byte.
"""
from __future__ import annotations

import io
import json
import sys
import xml.etree.ElementTree as ET

import pytest

from crosswitch import (
    CLASS_C1,
    CLASS_C32,
    CLASS_PH,
    CLASS_RF,
    make_system,
    normal_form,
    phase_portrait,
    system_to_obj,
)
from crosswitch.cli import main
from crosswitch.report import (
    SweepRecord,
    canonical_json,
    classification_report,
    portrait_svg,
    return_map_report,
    sweep_csv,
    sweep_family,
    system_digest,
    trajectory_csv,
)
from crosswitch.classify import UnfoldingVerification, VerifyCheck


# ---------------------------------------------------------------------------
# canonical JSON
# ---------------------------------------------------------------------------

def test_canonical_json_sorts_keys():
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_canonical_json_float_format():
    assert canonical_json(0.1) == "1.000000000000e-01"
    assert canonical_json(-2.5) == "-2.500000000000e+00"


def test_canonical_json_normalizes_negative_zero():
    assert canonical_json(-0.0) == canonical_json(0.0) == "0.000000000000e+00"


def test_canonical_json_scalars():
    assert canonical_json(True) == "true"
    assert canonical_json(None) == "null"
    assert canonical_json(7) == "7"
    assert canonical_json([1, (2, 3)]) == "[1,[2,3]]"


def test_canonical_json_escapes_strings():
    assert canonical_json('a"b\\c') == '"a\\"b\\\\c"'
    assert canonical_json("x\ny") == '"x\\u000ay"'


def test_canonical_json_rejects_non_finite():
    with pytest.raises(ValueError):
        canonical_json(float("inf"))
    with pytest.raises(ValueError):
        canonical_json({"v": float("nan")})


def test_canonical_json_rejects_unknown_types():
    with pytest.raises(TypeError):
        canonical_json({"v": object()})
    with pytest.raises(TypeError):
        canonical_json({1: "non-string key"})


# ---------------------------------------------------------------------------
# digests
# ---------------------------------------------------------------------------

def test_system_digest_is_stable_and_sensitivity():
    Z = make_system({(0, 0): 1.0, (1, 0): 2.0}, 1.0, -1.0, -2.0)
    # same polynomial entered in a different term order
    Z2 = make_system({(1, 0): 2.0, (0, 0): 1.0}, 1.0, -1.0, -2.0)
    Z3 = make_system({(0, 0): 1.0, (1, 0): 2.0000001}, 1.0, -1.0, -2.0)
    d, d2, d3 = system_digest(Z), system_digest(Z2), system_digest(Z3)
    assert d == d2
    assert d != d3
    assert len(d) == 64 and set(d) <= set("0123456789abcdef")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def test_classification_report_structure():
    Z = normal_form(CLASS_C32, {"a": 1, "b": 1, "c": 1})
    rep = classification_report(Z)
    assert rep["schema"] == 1
    assert rep["tool"]["name"] == "crosswitch"
    assert rep["classification"]["class"] == CLASS_C32
    assert rep["classification"]["signs"] == {"a": 1, "b": 1, "c": 1}
    assert rep["system"] == system_to_obj(Z)
    assert set(rep["sigma"]["kinds_outward"]) == {
        "sigma1_plus", "sigma1_minus", "sigma2_plus", "sigma2_minus"}
    canonical_json(rep)  # must serialize


def test_classification_report_fold_kinds():
    # X = (1, x1 - 0.3), Y = (1, 1): fold splits sigma2_plus into "sc"
    Z = make_system(1.0, {(0, 0): -0.3, (1, 0): 1.0}, 1.0, 1.0)
    rep = classification_report(Z)
    assert rep["sigma"]["kinds_outward"]["sigma2_plus"] == "sc"
    assert len(rep["sigma"]["tangencies"]) == 1
    t = rep["sigma"]["tangencies"][0]
    assert t["field"] == "X" and abs(t["s"] - 0.3) < 1e-9
    assert t["visibility"] == "visible"


def test_classification_report_lists_pseudo_equilibria():
    # linear-determinant example at mu = 0.1: one pseudo-equilibrium per branch
    Z = make_system({(0, 0): 0.9, (1, 0): 1.0}, 1.0,
                    {(0, 0): -1.0, (0, 1): 1.0}, -1.0)
    rep = classification_report(Z)
    pes = rep["pseudo_equilibria"]
    assert sorted(p["branch"] for p in pes) == [1, 2]
    for p in pes:
        assert abs(p["s"] - 0.1) < 1e-9


def test_return_map_report_values():
    Z = normal_form(CLASS_C32, {"a": 1, "b": 1, "c": 1})
    rep = return_map_report(Z)
    assert rep["return_map"]["alpha"] == -0.5
    assert rep["return_map"]["attractive"] is True
    assert rep["return_map"]["half_map_x"]["source"] == "jet"


def test_return_map_report_numeric_agreement():
    Z = normal_form(CLASS_PH, {"a": 1, "b": 1, "c": 1})
    rep = return_map_report(Z, include_numeric=True)
    gaps = rep["jet_vs_numeric"]
    assert gaps["alpha"] < 1e-7
    assert gaps["beta"] < 1e-6
    assert gaps["c3"] < 1e-5


# ---------------------------------------------------------------------------
# CSV and sweep
# ---------------------------------------------------------------------------

def test_trajectory_csv_format():
    from crosswitch import integrate
    Z = make_system(1.0, 1.0, 1.0, 2.0)
    tr = integrate(Z, (0.5, -0.15), t_max=0.05)
    text = trajectory_csv([tr])
    lines = text.strip().split("\n")
    assert lines[0] == "t,x1,x2,mode"
    assert len(lines) == 1 + len(tr.samples)
    cells = lines[1].split(",")
    assert cells[0] == "0.000000000000e+00"
    assert cells[3] == "SmoothY"
    with_id = trajectory_csv([tr, tr], with_id=True)
    first = with_id.strip().split("\n")
    assert first[0] == "trajectory,t,x1,x2,mode"
    assert first[1].startswith("0,") and first[1 + len(tr.samples)].startswith("1,")


def test_sweep_family_order_and_csv():
    deltas = [-0.3, 0.0, 0.3]
    records = sweep_family(CLASS_RF, {"a": 1, "b": 1}, deltas, jobs=3)
    assert [r.delta for r in records] == deltas  # thread map preserves order
    text = sweep_csv(records)
    lines = text.strip().split("\n")
    assert lines[0] == ("delta,family,predicted_class,observed_class,ok,"
                        "signs,failed_checks")
    assert len(lines) == 4
    assert all(line.split(",")[4] == "true" for line in lines[1:])
    assert lines[2].split(",")[3] == CLASS_RF  # delta = 0 row
    # repeated run is identical
    assert sweep_csv(sweep_family(CLASS_RF, {"a": 1, "b": 1}, deltas)) == text


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

def _portrait_pieces():
    Z = normal_form(CLASS_C32, {"a": 1, "b": 1, "c": 1})
    trajectories = phase_portrait(Z, box=0.5, seeds_per_quadrant=1,
                                  seeds_per_branch=1, t_max=0.5)
    return Z, trajectories


def test_portrait_svg_well_formed_and_deterministic():
    from crosswitch import sigma_decomposition
    Z, trajectories = _portrait_pieces()
    dec = sigma_decomposition(Z, 0.5)
    svg = portrait_svg(Z, trajectories, box=0.5, decomposition=dec, title="t")
    assert svg == portrait_svg(Z, trajectories, box=0.5, decomposition=dec,
                               title="t")
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    body = svg
    assert "<polyline" in body
    assert "#2ca02c" in body or "#b0b0b0" in body  # switching-set styling


def test_portrait_svg_without_decomposition_draws_axes():
    Z, trajectories = _portrait_pieces()
    svg = portrait_svg(Z, trajectories, box=0.5)
    ET.fromstring(svg)
    assert svg.count("<line") == 2


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

@pytest.fixture()
def c32_file(tmp_path):
    Z = normal_form(CLASS_C32, {"a": 1, "b": 1, "c": 1})
    p = tmp_path / "c32.json"
    p.write_text(json.dumps(system_to_obj(Z)))
    return str(p)


def test_cli_classify_roundtrip_and_determinism(c32_file, tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["classify", "--system", c32_file, "--out", str(out1)]) == 0
    assert main(["classify", "--system", c32_file, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rep = json.loads(out1.read_text())
    assert rep["classification"]["class"] == CLASS_C32
    assert rep["system_digest"] == system_digest(
        normal_form(CLASS_C32, {"a": 1, "b": 1, "c": 1}))


def test_cli_classify_reads_stdin(monkeypatch, capsys):
    Z = normal_form(CLASS_C1, {"a": 1, "b": -1})
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(system_to_obj(Z))))
    assert main(["classify", "--system", "-", "--no-sigma"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["classification"]["class"] == CLASS_C1
    assert "sigma" not in rep


def test_cli_normal_form_pipes_into_classify(tmp_path, capsys):
    assert main(["normal-form", "stable_c32", "--signs", "a=1,b=-1,c=-1"]) == 0
    sys_json = capsys.readouterr().out
    p = tmp_path / "sys.json"
    p.write_text(sys_json)
    assert main(["classify", "--system", str(p), "--no-sigma"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["classification"]["class"] == CLASS_C32
    assert rep["classification"]["signs"] == {"a": 1, "b": -1, "c": -1}


def test_cli_normal_form_delta_builds_unfolding(capsys):
    assert main(["normal-form", "codim1_regularfold", "--signs", "a=1,b=1",
                 "--delta", "0.25"]) == 0
    obj = json.loads(capsys.readouterr().out)
    x2 = {(t["i"], t["j"]): t["c"] for t in obj["X"]["f2"]}
    assert x2 == {(0, 0): -0.25, (1, 0): 1.0}


def test_cli_error_exit_codes(tmp_path, capsys):
    # unknown class
    assert main(["normal-form", "nope", "--signs", "a=1"]) == 2
    # invalid signs
    assert main(["normal-form", "stable_c1", "--signs", "a=1,b=0"]) == 2
    # --delta on a stable class
    assert main(["normal-form", "stable_c1", "--signs", "a=1,b=1",
                 "--delta", "0.1"]) == 2
    # missing file
    assert main(["classify", "--system", str(tmp_path / "missing.json")]) == 2
    # malformed JSON
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["classify", "--system", str(bad)]) == 2
    # schema violation
    bad.write_text('{"X": {}}')
    assert main(["classify", "--system", str(bad)]) == 2
    capsys.readouterr()


def test_cli_non_finite_coefficients_exit_3(tmp_path, capsys):
    p = tmp_path / "inf.json"
    p.write_text('{"X": {"f1": [{"c": Infinity, "i": 0, "j": 0}], '
                 '"f2": [{"c": 1.0, "i": 0, "j": 0}]}, '
                 '"Y": {"f1": [{"c": 1.0, "i": 0, "j": 0}], '
                 '"f2": [{"c": 1.0, "i": 0, "j": 0}]}}')
    assert main(["classify", "--system", str(p)]) == 3
    assert "error" in capsys.readouterr().err


def test_cli_return_map(c32_file, capsys):
    assert main(["return-map", "--system", c32_file]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["return_map"]["alpha"] == -0.5


def test_cli_return_map_rejects_non_transient(tmp_path, capsys):
    Z = normal_form(CLASS_C1, {"a": 1, "b": 1})
    p = tmp_path / "c1.json"
    p.write_text(json.dumps(system_to_obj(Z)))
    assert main(["return-map", "--system", str(p)]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_integrate_csv_and_events(tmp_path, capsys):
    p = tmp_path / "sys.json"
    p.write_text(json.dumps(system_to_obj(make_system(1.0, 1.0, 1.0, 2.0))))
    ev = tmp_path / "events.json"
    out = tmp_path / "traj.csv"
    assert main(["integrate", "--system", str(p), "--seed", "0.5,-0.15",
                 "--t-max", "1.0", "--events", str(ev), "--out", str(out)]) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "t,x1,x2,mode"
    assert len(lines) > 10
    events = json.loads(ev.read_text())
    kinds = [e["kind"] for e in events["events"]]
    assert "BranchCross" in kinds
    assert events["direction"] == 1


def test_cli_integrate_rejects_bad_seed(c32_file, capsys):
    assert main(["integrate", "--system", c32_file, "--seed", "zero,0"]) == 2
    assert main(["integrate", "--system", c32_file, "--seed", "99,99"]) == 2
    capsys.readouterr()


def test_cli_portrait_deterministic(c32_file, tmp_path):
    svg1, svg2 = tmp_path / "p1.svg", tmp_path / "p2.svg"
    csv1 = tmp_path / "p1.csv"
    args = ["portrait", "--system", c32_file, "--box", "0.5",
            "--t-max", "0.5", "--seeds-per-quadrant", "1",
            "--seeds-per-branch", "1"]
    assert main(args + ["--svg", str(svg1), "--csv", str(csv1)]) == 0
    assert main(args + ["--svg", str(svg2)]) == 0
    assert svg1.read_bytes() == svg2.read_bytes()
    ET.fromstring(svg1.read_text())
    assert csv1.read_text().startswith("trajectory,t,x1,x2,mode")


def test_cli_sweep_ok(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--family", "codim1_regularfold",
                 "--signs", "a=-1,b=1", "--deltas=-0.3:0.3:3",
                 "--out", str(out)]) == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 4
    assert lines[1].split(",")[0] == "-3.000000000000e-01"
    # rerun: byte identical
    out2 = tmp_path / "sweep2.csv"
    assert main(["sweep", "--family", "codim1_regularfold",
                 "--signs", "a=-1,b=1", "--deltas=-0.3:0.3:3",
                 "--out", str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()


def test_cli_sweep_requires_zero_in_grid(capsys):
    assert main(["sweep", "--family", "codim1_regularfold",
                 "--signs", "a=1,b=1", "--deltas", "0.1:0.3:3"]) == 2
    assert main(["sweep", "--family", "codim1_regularfold",
                 "--signs", "a=1,b=1", "--delta-list", "0.1,0.2"]) == 2
    assert "delta = 0" in capsys.readouterr().err


def test_cli_sweep_rejects_stable_family(capsys):
    assert main(["sweep", "--family", "stable_c1", "--signs", "a=1,b=1",
                 "--deltas=-0.1:0.1:3"]) == 2
    capsys.readouterr()


def test_cli_sweep_mismatch_exits_4(monkeypatch, tmp_path, capsys):
    bad = UnfoldingVerification(
        CLASS_RF, {"a": 1, "b": 1}, 0.1, "Stable_C1", "Stable_C2",
        (VerifyCheck("fold_location", False, "off by 1"),))

    def fake_sweep(family, signs, deltas, check_fixed_points=True, jobs=1):
        return [SweepRecord(0.1, bad)]

    monkeypatch.setattr("crosswitch.cli.sweep_family", fake_sweep)
    out = tmp_path / "s.csv"
    assert main(["sweep", "--family", "codim1_regularfold",
                 "--signs", "a=1,b=1", "--deltas=-0.1:0.1:3",
                 "--out", str(out)]) == 4
    err = capsys.readouterr().err
    assert "mismatch" in err and "fold_location" in err
    assert out.exists()  # the CSV is still written before the failure exit
