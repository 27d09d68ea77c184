"""Deterministic synthetic motion fixtures.

Builds a canonical 21-joint humanoid (Y-up, meters) and three scripted
scenarios used by the golden-report tests, the demos, and the UI:

- neutral_stand: motionless standing; no rule should fire.
- achilles_sweep: left ankle dorsiflexion sweeps 0 -> 45 -> 0 deg while
  the left knee holds ~22.5 deg flexion; trips the Achilles overload rule.
- acl_collapse: the left knee ramps into a held flexion 74 / abduction 95 /
  internal rotation 67 deg valgus-collapse posture; trips the ACL rule.
"""
from __future__ import annotations

import numpy as np

from . import quat
from .types import JointDef, PoseSequence, Skeleton

STAND_ROOT_Y = 0.95

_JOINTS = [
    # name, parent, offset (x: left, y: up, z: forward)
    ("Hips", None, (0.0, 0.0, 0.0)),
    ("Spine", "Hips", (0.0, 0.20, 0.0)),
    ("Neck", "Spine", (0.0, 0.40, 0.0)),
    ("Head", "Neck", (0.0, 0.10, 0.0)),
    ("Head_end", "Head", (0.0, 0.15, 0.0)),
    ("LeftArm", "Spine", (0.20, 0.35, 0.0)),
    ("LeftForeArm", "LeftArm", (0.28, 0.0, 0.0)),
    ("LeftHand", "LeftForeArm", (0.25, 0.0, 0.0)),
    ("LeftHand_end", "LeftHand", (0.18, 0.0, 0.0)),
    ("RightArm", "Spine", (-0.20, 0.35, 0.0)),
    ("RightForeArm", "RightArm", (-0.28, 0.0, 0.0)),
    ("RightHand", "RightForeArm", (-0.25, 0.0, 0.0)),
    ("RightHand_end", "RightHand", (-0.18, 0.0, 0.0)),
    ("LeftUpLeg", "Hips", (0.09, -0.05, 0.0)),
    ("LeftLeg", "LeftUpLeg", (0.0, -0.45, 0.0)),
    ("LeftFoot", "LeftLeg", (0.0, -0.45, 0.0)),
    ("LeftFoot_end", "LeftFoot", (0.0, -0.05, 0.15)),
    ("RightUpLeg", "Hips", (-0.09, -0.05, 0.0)),
    ("RightLeg", "RightUpLeg", (0.0, -0.45, 0.0)),
    ("RightFoot", "RightLeg", (0.0, -0.45, 0.0)),
    ("RightFoot_end", "RightFoot", (0.0, -0.05, 0.15)),
]


def humanoid_skeleton() -> Skeleton:
    """The canonical fixture skeleton; end sites are zero-channel joints."""
    index = {name: i for i, (name, _, _) in enumerate(_JOINTS)}
    joints = tuple(
        JointDef(
            name=name,
            parent=None if parent is None else index[parent],
            offset=np.array(offset),
            channel_order="ZXY",
            site=name.endswith("_end"),
        )
        for name, parent, offset in _JOINTS
    )
    return Skeleton(joints)


def _standing_sequence(skeleton: Skeleton, frames: int, rate_hz: float) -> tuple[np.ndarray, np.ndarray]:
    translation = np.tile([0.0, STAND_ROOT_Y, 0.0], (frames, 1))
    rotations = np.tile(quat.identity(), (frames, skeleton.joint_count, 1))
    return translation, rotations


def _smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def make_neutral_stand(frames: int = 120, rate_hz: float = 60.0) -> tuple[Skeleton, PoseSequence]:
    """Motionless standing pose."""
    skeleton = humanoid_skeleton()
    translation, rotations = _standing_sequence(skeleton, frames, rate_hz)
    return skeleton, PoseSequence(rate_hz, translation, rotations)


def make_achilles_sweep(
    frames: int = 240,
    rate_hz: float = 60.0,
    peak_dorsiflexion_deg: float = 45.0,
    knee_flexion_deg: float = 22.5,
) -> tuple[Skeleton, PoseSequence]:
    """Left-ankle dorsiflexion sweep under constant left-knee flexion.

    The sweep is a half-sine bump spanning the middle of the clip, so the
    dorsiflexion stream crosses the 40 deg rule threshold on a contiguous
    span and peaks at peak_dorsiflexion_deg.
    """
    skeleton = humanoid_skeleton()
    translation, rotations = _standing_sequence(skeleton, frames, rate_hz)

    t = np.arange(frames) / rate_hz
    duration = frames / rate_hz
    t0, t1 = duration / 8.0, duration * 7.0 / 8.0
    phase = np.clip((t - t0) / (t1 - t0), 0.0, 1.0)
    dorsiflexion = peak_dorsiflexion_deg * np.sin(np.pi * phase)

    # measure convention: ZXY order, components (abduction, flexion, rotation)
    ankle = skeleton.index_of("LeftFoot")
    knee = skeleton.index_of("LeftLeg")
    angles = np.zeros((frames, 3))
    angles[:, 1] = dorsiflexion
    rotations[:, ankle] = quat.from_euler_deg(angles, "ZXY")
    knee_angles = np.tile([0.0, knee_flexion_deg, 0.0], (frames, 1))
    rotations[:, knee] = quat.from_euler_deg(knee_angles, "ZXY")

    return skeleton, PoseSequence(rate_hz, translation, rotations)


def make_acl_collapse(
    frames: int = 240,
    rate_hz: float = 60.0,
    flexion_deg: float = 74.0,
    abduction_deg: float = 95.0,
    internal_rotation_deg: float = 67.0,
) -> tuple[Skeleton, PoseSequence]:
    """Left-knee valgus collapse: ramp into a held high-risk posture.

    The knee ramps from neutral into the target (flexion, abduction,
    internal rotation) triple over 0.5 s, holds it for 0.8 s mid-clip,
    and ramps back out.
    """
    skeleton = humanoid_skeleton()
    translation, rotations = _standing_sequence(skeleton, frames, rate_hz)

    target = quat.from_euler_deg(
        [abduction_deg, flexion_deg, internal_rotation_deg], "ZXY"
    )
    t = np.arange(frames) / rate_hz
    ramp_in_start, ramp_s, hold_s = 1.0, 0.5, 0.8
    hold_start = ramp_in_start + ramp_s
    hold_end = hold_start + hold_s
    blend = np.where(
        t < hold_start,
        _smoothstep((t - ramp_in_start) / ramp_s),
        np.where(t <= hold_end, 1.0, 1.0 - _smoothstep((t - hold_end) / ramp_s)),
    )

    knee = skeleton.index_of("LeftLeg")
    identity = quat.identity((frames,))
    targets = np.tile(target, (frames, 1))
    rotations[:, knee] = quat.slerp(identity, targets, blend)

    return skeleton, PoseSequence(rate_hz, translation, rotations)


FIXTURE_BUILDERS = {
    "neutral_stand": make_neutral_stand,
    "achilles_sweep": make_achilles_sweep,
    "acl_collapse": make_acl_collapse,
}


def main(argv=None) -> int:
    """Write the shipped fixtures as mocap text files: python -m motionrisk.fixtures OUT_DIR"""
    import argparse
    from pathlib import Path

    from .bvh import serialize_mocap_text

    parser = argparse.ArgumentParser(description="write the shipped motion fixtures")
    parser.add_argument("out_dir", type=Path)
    args = parser.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, builder in FIXTURE_BUILDERS.items():
        skeleton, seq = builder()
        path = args.out_dir / f"{name}.bvh"
        path.write_text(serialize_mocap_text(skeleton, seq), encoding="utf-8")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
