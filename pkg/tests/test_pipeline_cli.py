import json
import os
from pathlib import Path

import numpy as np
import pytest

from motionrisk.cli import main
from motionrisk.fixtures import make_neutral_stand
from motionrisk.motion_io import load_motion_file
from motionrisk.pipeline import (
    SessionConfig,
    analyze,
    export_streams,
    run_analysis,
    streams_to_csv,
)
from motionrisk.types import MetricStream

from conftest import FIXTURE_DIR, FIXTURE_NAMES, GOLDEN_DIR


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_analyze_neutral_fixture_no_incidents(tmp_path):
    rc = run_cli("analyze", "--in", FIXTURE_DIR / "neutral_stand.bvh", "--mass", 70, "--out", tmp_path)
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["totals"]["incidents"] == 0


def test_analyze_achilles_fixture_flags_overload(tmp_path):
    rc = run_cli("analyze", "--in", FIXTURE_DIR / "achilles_sweep.bvh", "--mass", 70, "--out", tmp_path)
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    overloads = [i for i in report["incidents"] if i["label"] == "achilles_overload"]
    assert overloads
    assert overloads[0]["peak_value"] >= 40.0


def test_analyze_outputs_are_deterministic_and_match_goldens(tmp_path):
    for name in FIXTURE_NAMES:
        out1, out2 = tmp_path / f"{name}_1", tmp_path / f"{name}_2"
        for out in (out1, out2):
            assert run_cli("analyze", "--in", FIXTURE_DIR / f"{name}.bvh", "--mass", 70, "--out", out) == 0
        for produced in ("report.json", "streams.csv", "incidents.csv"):
            assert (out1 / produced).read_bytes() == (out2 / produced).read_bytes()
        golden = (GOLDEN_DIR / f"{name}.report.json").read_bytes()
        assert (out1 / "report.json").read_bytes() == golden, f"golden drift for {name}"


def test_analyze_missing_rules_file_fails_with_path(tmp_path, capsys):
    rc = run_cli(
        "analyze",
        "--in", FIXTURE_DIR / "neutral_stand.bvh",
        "--out", tmp_path,
        "--rules", tmp_path / "no_such_rules.json",
    )
    assert rc == 1
    err = capsys.readouterr().err
    assert "no_such_rules.json" in err


def test_analyze_failure_leaves_no_partial_outputs(tmp_path):
    bad = tmp_path / "bad.bvh"
    bad.write_text("HIERARCHY\nROOT a\n{\n", encoding="utf-8")
    out = tmp_path / "out"
    rc = run_cli("analyze", "--in", bad, "--out", out)
    assert rc == 1
    assert not out.exists() or not any(out.iterdir())


def test_analyze_respects_custom_rules(tmp_path):
    rules = {
        "rules": [
            {
                "id": "custom",
                "label": "custom",
                "region": "ankle_l",
                "conditions": [
                    {"measure": "left_ankle_dorsiflexion_deg", "comparator": "gt",
                     "threshold": 80.0, "unit": "deg"}
                ],
            }
        ]
    }
    rules_path = tmp_path / "rules.json"
    rules_path.write_text(json.dumps(rules), encoding="utf-8")
    out = tmp_path / "out"
    rc = run_cli("analyze", "--in", FIXTURE_DIR / "achilles_sweep.bvh", "--out", out, "--rules", rules_path)
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["totals"]["incidents"] == 0  # threshold above the sweep peak


def test_config_file_and_flag_precedence(tmp_path, monkeypatch):
    config = {"body_mass_kg": 100.0, "out_dir": str(tmp_path / "from_config")}
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config), encoding="utf-8")
    monkeypatch.setenv("MOTIONRISK_CONFIG", str(config_path))

    rc = run_cli("analyze", "--in", FIXTURE_DIR / "neutral_stand.bvh")
    assert rc == 0
    report = json.loads((tmp_path / "from_config" / "report.json").read_text())
    assert report["session"]["body_mass_kg"] == 100.0

    # flags override the config
    rc = run_cli("analyze", "--in", FIXTURE_DIR / "neutral_stand.bvh", "--mass", 55, "--out", tmp_path / "flag_out")
    assert rc == 0
    report = json.loads((tmp_path / "flag_out" / "report.json").read_text())
    assert report["session"]["body_mass_kg"] == 55.0


def test_convert_bvh_to_interchange_round_trip(tmp_path):
    src = FIXTURE_DIR / "achilles_sweep.bvh"
    mid = tmp_path / "mid.json"
    back = tmp_path / "back.bvh"
    assert run_cli("convert", "--in", src, "--out", mid) == 0
    assert run_cli("convert", "--in", mid, "--out", back) == 0
    sk1, seq1 = load_motion_file(src)
    sk2, seq2 = load_motion_file(back)
    assert sk1.names == sk2.names
    assert np.allclose(seq1.root_translation, seq2.root_translation, atol=1e-7)


def test_export_stream_table_shape(tmp_path):
    out = tmp_path / "streams.csv"
    rc = run_cli("export", "--in", FIXTURE_DIR / "neutral_stand.bvh", "--out", out)
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("time_s,")
    assert "left_ankle_dorsiflexion_deg (deg)" in lines[0]
    assert "left_ankle_force_bw (BW)" in lines[0]
    assert len(lines) == 1 + 120  # header + one row per frame


def test_export_streams_examples(tmp_path):
    a = MetricStream("a", "deg", [1.0, 2.0, 3.0], 30.0)
    b = MetricStream("b", "N", [4.0, 5.0, 6.0], 30.0)
    path = tmp_path / "t.csv"
    export_streams([a, b], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == "time_s,a (deg),b (N)"

    export_streams([], path)
    assert path.read_text() == "time_s\n"

    export_streams([a, b], tmp_path / "t2.csv")
    export_streams([a, b], tmp_path / "t3.csv")
    assert (tmp_path / "t2.csv").read_bytes() == (tmp_path / "t3.csv").read_bytes()


def test_export_misaligned_streams_rejected():
    a = MetricStream("a", "deg", [1.0, 2.0], 30.0)
    b = MetricStream("b", "deg", [1.0, 2.0, 3.0], 30.0)
    with pytest.raises(ValueError, match="aligned"):
        streams_to_csv([a, b])


def test_session_config_validation():
    with pytest.raises(ValueError):
        SessionConfig(input_path="", out_dir="x")
    with pytest.raises(ValueError):
        SessionConfig(input_path="x", out_dir="x", body_mass_kg=0.0)


def test_single_frame_session_analyzes(tmp_path):
    skeleton, seq = make_neutral_stand(frames=1)
    result = run_analysis(skeleton, seq, source="one", body_mass_kg=70.0)
    assert result.report.totals["incidents"] == 0
    for stream in result.streams.values():
        assert len(stream) == 1


def test_nonhumanoid_rig_analyzes_with_defaults_skipped():
    from motionrisk.types import JointDef, PoseSequence, Skeleton

    skeleton = Skeleton(
        (JointDef("a", None, [0.0, 0.0, 0.0]), JointDef("b", 0, [1.0, 0.0, 0.0]))
    )
    seq = PoseSequence(30.0, np.zeros((4, 3)), np.tile([1.0, 0, 0, 0], (4, 2, 1)))
    result = run_analysis(skeleton, seq, source="chain", body_mass_kg=70.0)
    assert result.streams == {}  # no binding or segment applies to this rig
    assert result.report.totals["incidents"] == 0


def test_explicit_bindings_for_missing_joint_still_error(tmp_path):
    bindings = {"m_deg": {"joint": "NoSuchJoint", "order": "ZXY", "component": 0}}
    path = tmp_path / "bindings.json"
    path.write_text(json.dumps(bindings), encoding="utf-8")
    rc = run_cli(
        "analyze",
        "--in", FIXTURE_DIR / "neutral_stand.bvh",
        "--out", tmp_path / "out",
        "--bindings", path,
    )
    assert rc == 1
    assert not (tmp_path / "out" / "report.json").exists()


def test_unknown_command_usage_error(capsys):
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_serve_strict_rejects_port_zero(capsys):
    rc = run_cli("serve", "--port", 0, "--strict")
    assert rc == 2
    assert "port 0" in capsys.readouterr().err


def test_config_filter_settings_apply(tmp_path):
    config = {"cutoff_hz": 1.0, "order": 6}
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config), encoding="utf-8")
    out = tmp_path / "out"
    rc = run_cli(
        "--config", config_path,
        "analyze", "--in", FIXTURE_DIR / "achilles_sweep.bvh", "--out", out,
    )
    assert rc == 0
    default_out = tmp_path / "default_out"
    assert run_cli("analyze", "--in", FIXTURE_DIR / "achilles_sweep.bvh", "--out", default_out) == 0
    # the configured filter changes the computed streams
    assert (out / "streams.csv").read_bytes() != (default_out / "streams.csv").read_bytes()
