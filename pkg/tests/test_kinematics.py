import time

import numpy as np
import pytest

from motionrisk import quat
from motionrisk.kinematics import (
    AnatomicalBinding,
    anatomical_angle_stream,
    default_bindings,
    extract_all_streams,
    forward_kinematics,
    forward_kinematics_sequence,
    to_euler,
)
from motionrisk.fixtures import humanoid_skeleton, make_neutral_stand
from motionrisk.types import JointDef, PoseSequence, Skeleton

from helpers import fk_matrix_oracle, random_skeleton, random_unit_quats


def chain_skeleton():
    return Skeleton(
        (
            JointDef("a", None, [0.0, 0.0, 0.0]),
            JointDef("b", 0, [1.0, 0.0, 0.0]),
            JointDef("c", 1, [1.0, 0.0, 0.0]),
        )
    )


def identity_rots(n):
    return np.tile([1.0, 0.0, 0.0, 0.0], (n, 1))


def test_fk_identity_chain_accumulates_offsets():
    pose = forward_kinematics(chain_skeleton(), [0.0, 0.0, 0.0], identity_rots(3))
    assert np.allclose(pose.positions, [[0, 0, 0], [1, 0, 0], [2, 0, 0]])


def test_fk_rotated_root_swings_chain():
    rots = identity_rots(3)
    rots[0] = quat.from_axis_angle_deg(2, 90.0)
    pose = forward_kinematics(chain_skeleton(), [0.0, 0.0, 0.0], rots)
    assert np.allclose(pose.positions, [[0, 0, 0], [0, 1, 0], [0, 2, 0]], atol=1e-12)


def test_fk_translation_equivariance():
    base = forward_kinematics(chain_skeleton(), [0.0, 0.0, 0.0], identity_rots(3))
    moved = forward_kinematics(chain_skeleton(), [0.0, 0.0, 5.0], identity_rots(3))
    assert np.allclose(moved.positions, base.positions + [0.0, 0.0, 5.0])


def test_fk_joint_count_mismatch():
    with pytest.raises(ValueError):
        forward_kinematics(chain_skeleton(), [0, 0, 0], identity_rots(2))


def test_fk_matches_matrix_oracle():
    rng = np.random.default_rng(123)
    for _ in range(200):
        skeleton = random_skeleton(rng)
        rots = random_unit_quats(rng, skeleton.joint_count)
        root = rng.uniform(-2, 2, size=3)
        pose = forward_kinematics(skeleton, root, rots)
        expected = fk_matrix_oracle(skeleton, root, rots)
        assert np.allclose(pose.positions, expected, atol=1e-9)


def test_fk_sequence_matches_per_frame():
    skeleton, seq = make_neutral_stand(frames=5)
    positions, orientations = forward_kinematics_sequence(skeleton, seq)
    for f in range(seq.frame_count):
        pose = forward_kinematics(skeleton, seq.root_translation[f], seq.rotations[f])
        assert np.array_equal(positions[f], pose.positions)
        assert np.array_equal(orientations[f], pose.orientations)


def test_to_euler_requires_unit_quaternion():
    with pytest.raises(ValueError):
        to_euler([0.9, 0.0, 0.0, 0.0], "XYZ")


def test_to_euler_examples():
    assert np.allclose(to_euler([1.0, 0, 0, 0], "ZXY"), [0, 0, 0])
    assert np.allclose(
        to_euler([np.sqrt(2) / 2, np.sqrt(2) / 2, 0, 0], "XYZ"), [90, 0, 0], atol=1e-9
    )


def knee_pose_sequence(skeleton, abduction, flexion, rotation, frames=4):
    rots = np.tile(quat.identity(), (frames, skeleton.joint_count, 1))
    rots[:, skeleton.index_of("LeftLeg")] = quat.from_euler_deg(
        [abduction, flexion, rotation], "ZXY"
    )
    return PoseSequence(60.0, np.tile([0.0, 0.95, 0.0], (frames, 1)), rots)


def test_neutral_pose_gives_zero_stream():
    skeleton, seq = make_neutral_stand(frames=6)
    binding = AnatomicalBinding("left_knee_flexion_deg", "LeftLeg", "ZXY", 1, 1.0, 0.0)
    stream = anatomical_angle_stream(skeleton, seq, binding)
    assert stream.unit == "deg"
    assert len(stream) == 6
    assert np.allclose(stream.samples, 0.0)


def test_acl_posture_reads_back_named_angles():
    skeleton = humanoid_skeleton()
    seq = knee_pose_sequence(skeleton, abduction=95.0, flexion=74.0, rotation=67.0)
    by_id = {b.measure_id: b for b in default_bindings()}
    flexion = anatomical_angle_stream(skeleton, seq, by_id["left_knee_flexion_deg"])
    abduction = anatomical_angle_stream(skeleton, seq, by_id["left_knee_abduction_deg"])
    rotation = anatomical_angle_stream(
        skeleton, seq, by_id["left_knee_internal_rotation_deg"]
    )
    assert flexion.samples[0] == pytest.approx(74.0, abs=0.1)
    assert abduction.samples[0] == pytest.approx(95.0, abs=0.1)
    assert rotation.samples[0] == pytest.approx(67.0, abs=0.1)


def test_binding_sign_flips_component():
    skeleton = humanoid_skeleton()
    seq = knee_pose_sequence(skeleton, abduction=30.0, flexion=0.0, rotation=0.0)
    plus = AnatomicalBinding("m", "LeftLeg", "ZXY", 0, 1.0, 0.0)
    minus = AnatomicalBinding("m", "LeftLeg", "ZXY", 0, -1.0, 0.0)
    assert anatomical_angle_stream(skeleton, seq, plus).samples[0] == pytest.approx(30.0)
    assert anatomical_angle_stream(skeleton, seq, minus).samples[0] == pytest.approx(-30.0)


def test_neutral_offset_shifts_stream():
    skeleton, seq = make_neutral_stand(frames=3)
    binding = AnatomicalBinding("m", "LeftLeg", "ZXY", 1, 1.0, neutral_offset_deg=5.0)
    assert np.allclose(anatomical_angle_stream(skeleton, seq, binding).samples, 5.0)


def test_unknown_joint_rejected():
    skeleton, seq = make_neutral_stand(frames=3)
    binding = AnatomicalBinding("m", "NoSuchJoint")
    with pytest.raises(KeyError):
        anatomical_angle_stream(skeleton, seq, binding)


def test_extract_all_streams_order_and_alignment():
    skeleton, seq = make_neutral_stand(frames=17)
    bindings = default_bindings()
    streams = extract_all_streams(skeleton, seq, bindings)
    assert [s.measure_id for s in streams] == [b.measure_id for b in bindings]
    assert all(len(s) == 17 for s in streams)
    again = extract_all_streams(skeleton, seq, bindings)
    for a, b in zip(streams, again):
        assert np.array_equal(a.samples, b.samples)


def test_extract_empty_bindings():
    skeleton, seq = make_neutral_stand(frames=3)
    assert extract_all_streams(skeleton, seq, []) == []


def test_streams_invariant_to_root_translation_and_yaw():
    skeleton = humanoid_skeleton()
    seq = knee_pose_sequence(skeleton, abduction=40.0, flexion=55.0, rotation=10.0, frames=8)
    yaw = quat.from_axis_angle_deg(1, 73.0)
    moved = PoseSequence(
        seq.frame_rate_hz,
        seq.root_translation + np.array([3.0, -1.0, 2.5]),
        np.concatenate(
            [
                quat.multiply(np.tile(yaw, (8, 1, 1)), seq.rotations[:, :1]),
                seq.rotations[:, 1:],
            ],
            axis=1,
        ),
    )
    for binding in default_bindings():
        a = anatomical_angle_stream(skeleton, seq, binding)
        b = anatomical_angle_stream(skeleton, moved, binding)
        assert np.allclose(a.samples, b.samples, atol=1e-9), binding.measure_id
