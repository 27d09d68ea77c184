"""Acceptance suite: one test per release criterion, at fixed tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion. Every expected value here is pinned: computed by an oracle
that is independent of the code path under test (brute-force matrix FK,
analytic derivatives, Fourier analysis, naive run/merge enumeration) or
asserted directly from closed-form arithmetic.
"""
import json
import time
from pathlib import Path

import numpy as np
import pytest

from motionrisk import quat
from motionrisk.cli import main as cli_main
from motionrisk.bvh import ParseError, parse_mocap_text, serialize_mocap_text
from motionrisk.dynamics import (
    GRAVITY_MPS2,
    default_segment_table,
    detect_contact,
    joint_load_stream,
    segment_parameters,
)
from motionrisk.fixtures import humanoid_skeleton, make_neutral_stand
from motionrisk.kinematics import forward_kinematics
from motionrisk.risk import (
    Condition,
    RiskRule,
    default_rules,
    detect_incidents,
    evaluate_rule,
    evaluate_session,
)
from motionrisk.signals import FilterSpec, differentiate, smooth
from motionrisk.types import MetricStream, PoseSequence, ROTATION_ORDERS

from conftest import FIXTURE_DIR, FIXTURE_NAMES, GOLDEN_DIR
from helpers import (
    fk_matrix_oracle,
    incident_spans_oracle,
    random_skeleton,
    random_unit_quats,
)
from test_mocap_parser import MALFORMED_CASES, TWO_JOINT


def _ok(name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE PASS: {name}{suffix}")


def test_fk_oracle_1000_random_skeletons():
    rng = np.random.default_rng(20240101)
    started = time.monotonic()
    worst = 0.0
    for _ in range(1000):
        skeleton = random_skeleton(rng, max_joints=10)
        rotations = random_unit_quats(rng, skeleton.joint_count)
        root = rng.uniform(-5, 5, size=3)
        pose = forward_kinematics(skeleton, root, rotations)
        expected = fk_matrix_oracle(skeleton, root, rotations)
        worst = max(worst, float(np.max(np.abs(pose.positions - expected))))
    elapsed = time.monotonic() - started
    assert worst < 1e-9, f"worst FK deviation {worst:.3e} m"
    assert elapsed < 5.0, f"FK oracle sweep took {elapsed:.2f} s"
    _ok("FK oracle", f"1000 skeletons, worst {worst:.2e} m, {elapsed:.2f} s")


def test_euler_round_trip_10000_quaternions():
    rng = np.random.default_rng(20240202)
    per_order = 10000 // len(ROTATION_ORDERS) + 1
    worst = 0.0
    total = 0
    for order in ROTATION_ORDERS:
        q = random_unit_quats(rng, per_order)
        total += per_order
        angles = quat.to_euler_deg(q, order)
        err = quat.angle_between_rad(q, quat.from_euler_deg(angles, order))
        worst = max(worst, float(err.max()))
    assert total >= 10000
    assert worst < 1e-6, f"worst recomposition error {worst:.3e} rad"

    worst_lock = 0.0
    for order in ROTATION_ORDERS:
        n = 2000
        middle = np.where(rng.random(n) < 0.5, 90.0, -90.0) + np.degrees(
            rng.uniform(-1e-3, 1e-3, size=n)
        )
        angles_in = np.stack(
            [rng.uniform(-180, 180, n), middle, rng.uniform(-180, 180, n)], axis=-1
        )
        q = quat.from_euler_deg(angles_in, order)
        angles = quat.to_euler_deg(q, order)
        err = quat.angle_between_rad(q, quat.from_euler_deg(angles, order))
        worst_lock = max(worst_lock, float(err.max()))
    assert worst_lock < 1e-4, f"worst near-lock error {worst_lock:.3e} rad"
    _ok("Euler round-trip", f"worst {worst:.2e} rad, near-lock {worst_lock:.2e} rad")


def test_derivative_accuracy():
    rate = 100.0
    t = np.arange(300) / rate
    angle = MetricStream("a", "deg", 30.0 * np.sin(2 * np.pi * t), rate)
    velocity = differentiate(angle)
    analytic = 30.0 * 2 * np.pi * np.cos(2 * np.pi * t)
    rms = float(np.sqrt(np.mean((velocity.samples - analytic) ** 2)))
    assert rms < 0.01 * 188.5, f"RMS error {rms:.3f} deg/s"

    ramp = MetricStream("r", "deg", 3.0 * t, rate)
    d = differentiate(ramp)
    assert np.allclose(d.samples[1:-1], 3.0, atol=1e-12)
    _ok("Derivative accuracy", f"sinusoid RMS {rms:.3f} deg/s vs 1.885 budget; ramp exact")


def test_filter_behavior():
    spec = FilterSpec(cutoff_hz=6.0, order=4)
    rate = 100.0

    constant = MetricStream("c", "deg", np.full(400, 5.0), rate)
    assert np.allclose(smooth(constant, spec).samples, 5.0, atol=1e-9)

    t = np.arange(1000) / rate
    mixed = np.sin(2 * np.pi * 1.0 * t) + np.sin(2 * np.pi * 20.0 * t)
    out = smooth(MetricStream("m", "deg", mixed, rate), spec)
    freqs = np.fft.rfftfreq(len(t), 1 / rate)
    bin20 = int(np.argmin(np.abs(freqs - 20.0)))
    attenuation = 1.0 - float(
        np.abs(np.fft.rfft(out.samples))[bin20] / np.abs(np.fft.rfft(mixed))[bin20]
    )
    assert attenuation >= 0.90, f"20 Hz attenuation only {attenuation:.1%}"

    center = 150
    pulse = np.exp(-0.5 * ((np.arange(301) - center) / 5.0) ** 2)
    smoothed = smooth(MetricStream("p", "deg", pulse, rate), spec)
    assert int(np.argmax(smoothed.samples)) == center
    _ok("Filter behavior", f"DC exact, 20 Hz attenuated {attenuation:.1%}, peak index kept")


def test_dynamics_criteria():
    skeleton, seq = make_neutral_stand(frames=120)
    model = segment_parameters(skeleton, 70.0)
    contact = detect_contact(skeleton, seq)
    loads = {s.measure_id: s for s in joint_load_stream(skeleton, seq, model, contact)}
    static_n = loads["left_ankle_force_n"].samples
    static_bw = loads["left_ankle_force_bw"].samples
    assert np.allclose(static_n, 343.35, atol=0.1)
    assert np.allclose(static_bw, 0.5, atol=0.1 / (70 * GRAVITY_MPS2))

    fractions = sum(s.mass_fraction for s in default_segment_table().segments)
    assert abs(fractions - 1.0) < 1e-6

    frames, rate = 120, 60.0
    t = np.arange(frames) / rate
    translation = np.tile([0.0, 0.95, 0.0], (frames, 1))
    translation[:, 1] = 5.0 - 0.5 * GRAVITY_MPS2 * t**2
    rot = np.tile(quat.identity(), (frames, skeleton.joint_count, 1))
    fall = PoseSequence(rate, translation, rot)
    fall_contact = detect_contact(skeleton, fall)
    assert not fall_contact.flags.any()
    fall_loads = joint_load_stream(skeleton, fall, model, fall_contact, filter_spec=None)
    worst_fall = max(float(np.max(np.abs(s.samples[2:-2]))) for s in fall_loads)
    assert worst_fall < 0.5, f"free-fall residual {worst_fall:.3f} N"

    heavy = segment_parameters(skeleton, 140.0)
    loads_heavy = {
        s.measure_id: s for s in joint_load_stream(skeleton, seq, heavy, contact)
    }
    for mid, light in loads.items():
        if light.unit == "N":
            np.testing.assert_allclose(
                loads_heavy[mid].samples, 2.0 * light.samples, rtol=1e-9
            )
        else:
            np.testing.assert_allclose(loads_heavy[mid].samples, light.samples, rtol=1e-9)
    _ok(
        "Dynamics",
        f"static ankle {static_n[0]:.2f} N = {static_bw[0]:.3f} BW, "
        f"free fall <= {worst_fall:.2f} N, fractions sum {fractions:.6f}, mass scaling exact",
    )


def test_rule_engine_fires_on_threshold_fixtures():
    rules = default_rules()

    def incidents_for(path):
        skeleton, seq = parse_mocap_text(path.read_text(encoding="utf-8"))
        from motionrisk.pipeline import run_analysis

        return run_analysis(skeleton, seq, source=path.name, body_mass_kg=70.0).incidents

    achilles = incidents_for(FIXTURE_DIR / "achilles_sweep.bvh")
    achilles_hits = [i for i in achilles if i.label == "achilles_overload"]
    assert achilles_hits, "achilles_overload did not fire on the sweep fixture"
    assert achilles_hits[0].peak_value >= 40.0

    acl = incidents_for(FIXTURE_DIR / "acl_collapse.bvh")
    acl_hits = [i for i in acl if i.label == "acl_valgus_collapse"]
    assert acl_hits, "acl_valgus_collapse did not fire on the collapse fixture"

    neutral = incidents_for(FIXTURE_DIR / "neutral_stand.bvh")
    assert neutral == ()

    # BW rule fires exactly where load > 3.6 BW
    rate = 60.0
    bw = np.concatenate([np.linspace(0.5, 5.0, 80), np.linspace(5.0, 0.5, 80)])
    streams = {"left_ankle_force_bw": MetricStream("left_ankle_force_bw", "BW", bw, rate)}
    force_rule = next(r for r in rules if r.id == "ankle_force_overload_left")
    mask = evaluate_rule(streams, force_rule)
    assert np.array_equal(mask, bw > 3.6)
    _ok(
        "Rule engine vs thresholds",
        f"achilles peak {achilles_hits[0].peak_value:.1f} deg, acl {len(acl_hits)} incident(s), "
        f"neutral none, BW mask exact",
    )


def test_incident_segmentation_oracle_10000_masks():
    rng = np.random.default_rng(20240303)
    rate = 30.0
    for trial in range(10000):
        n = int(rng.integers(1, 40))
        mask = rng.random(n) < rng.uniform(0.15, 0.85)
        margins = rng.normal(size=n)
        min_dur = float(rng.choice([0.0, 0.05, 0.1, 0.2]))
        gap = float(rng.choice([0.0, 0.05, 0.1, 0.2, 0.4]))
        rule = RiskRule(
            id="r",
            region="ankle_l",
            label="r",
            conditions=(Condition("x", "gt", threshold=0.0),),
            min_duration_s=min_dur,
            merge_gap_s=gap,
        )
        streams = {"x": MetricStream("x", "deg", margins, rate)}
        got = detect_incidents(mask, rule, streams, rate)
        expected = incident_spans_oracle(mask, rate, min_dur, gap, margins=margins)
        assert [(i.start_frame, i.end_frame, i.peak_frame) for i in got] == [
            (e["start"], e["end"], e["peak"]) for e in expected
        ], f"trial {trial}"
        assert [i.bridged_gaps for i in got] == [tuple(e["gaps"]) for e in expected]

    # hand-built semantics checks
    rule = RiskRule(
        id="r",
        region="ankle_l",
        label="r",
        conditions=(Condition("x", "gt", threshold=0.0),),
        min_duration_s=0.1,
        merge_gap_s=0.2,
    )
    mask = np.zeros(30, bool)
    mask[10:16] = True  # 6 frames at 30 Hz = 0.2 s
    streams = {"x": MetricStream("x", "deg", np.ones(30), 30.0)}
    assert len(detect_incidents(mask, rule, streams, 30.0)) == 1
    mask2 = np.zeros(40, bool)
    mask2[5:11] = True
    mask2[14:20] = True  # 0.1 s gap < 0.2 s merge gap
    streams2 = {"x": MetricStream("x", "deg", np.ones(40), 30.0)}
    merged = detect_incidents(mask2, rule, streams2, 30.0)
    assert len(merged) == 1 and merged[0].bridged_gaps == ((11, 13),)
    _ok("Incident segmentation", "10000 random masks equal the brute-force oracle")


def test_end_to_end_determinism_and_goldens(tmp_path):
    for name in FIXTURE_NAMES:
        outs = []
        for run in (1, 2):
            out = tmp_path / f"{name}_{run}"
            rc = cli_main(
                ["analyze", "--in", str(FIXTURE_DIR / f"{name}.bvh"), "--mass", "70",
                 "--out", str(out)]
            )
            assert rc == 0
            outs.append(out)
        report1 = (outs[0] / "report.json").read_bytes()
        assert report1 == (outs[1] / "report.json").read_bytes()
        assert (outs[0] / "streams.csv").read_bytes() == (outs[1] / "streams.csv").read_bytes()
        golden = (GOLDEN_DIR / f"{name}.report.json").read_bytes()
        assert report1 == golden, f"report for {name} diverges from the golden file"
    _ok("End-to-end determinism", "3 fixtures x 2 runs byte-identical and equal to goldens")


def test_parser_robustness_corpus():
    assert len(MALFORMED_CASES) >= 15
    for desc, text in MALFORMED_CASES:
        try:
            parse_mocap_text(text)
        except ParseError as e:
            assert e.line >= 1, desc
            assert str(e).startswith("line "), desc
        else:
            raise AssertionError(f"malformed case not rejected: {desc}")

    # round-trip property on all valid fixtures
    for name in FIXTURE_NAMES:
        text = (FIXTURE_DIR / f"{name}.bvh").read_text(encoding="utf-8")
        skeleton, seq = parse_mocap_text(text)
        skeleton2, seq2 = parse_mocap_text(serialize_mocap_text(skeleton, seq))
        assert np.allclose(skeleton2.offsets, skeleton.offsets, atol=1e-7)
        assert np.allclose(seq2.root_translation, seq.root_translation, atol=1e-7)
        err = quat.angle_between_rad(seq.rotations, seq2.rotations)
        assert float(err.max()) < 1e-6
    skeleton, seq = parse_mocap_text(TWO_JOINT, scale=0.01)
    skeleton2, seq2 = parse_mocap_text(serialize_mocap_text(skeleton, seq, 0.01), scale=0.01)
    assert np.allclose(skeleton2.offsets, skeleton.offsets, atol=1e-7)
    _ok(
        "Parser robustness",
        f"{len(MALFORMED_CASES)} malformed cases rejected with line numbers; round-trips hold",
    )
