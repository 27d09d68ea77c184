"""Parse a mocap file and look at the skeleton and world-space geometry.

Walks through the ingestion layer: hierarchical mocap text -> Skeleton +
PoseSequence, then forward kinematics and Euler decompositions of a few
frames.
"""
from pathlib import Path

import numpy as np

from motionrisk import forward_kinematics, parse_mocap_text, to_euler

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

text = (FIXTURES / "achilles_sweep.bvh").read_text(encoding="utf-8")
skeleton, seq = parse_mocap_text(text, scale=0.01)

print(f"parsed {seq.frame_count} frames at {seq.frame_rate_hz:g} Hz, "
      f"{skeleton.joint_count} joints")
print()
print("joint hierarchy:")
for i, joint in enumerate(skeleton.joints):
    parent = "-" if joint.parent is None else skeleton.joints[joint.parent].name
    kind = "site" if joint.site else joint.channel_order
    print(f"  [{i:2d}] {joint.name:<15s} parent={parent:<12s} offset={joint.offset} {kind}")

# world geometry mid-sweep, where the left ankle is deep in dorsiflexion
frame = seq.frame_count // 2
pose = forward_kinematics(skeleton, *seq.frame(frame))
print(f"\nworld joint positions at frame {frame} "
      f"(t = {frame / seq.frame_rate_hz:.2f} s):")
for name in ("Hips", "LeftLeg", "LeftFoot", "LeftFoot_end", "RightFoot"):
    p = pose.positions[skeleton.index_of(name)]
    print(f"  {name:<13s} ({p[0]:+.3f}, {p[1]:+.3f}, {p[2]:+.3f}) m")

# the ankle's local rotation, decomposed the way the binding table reads it
ankle_rotation = seq.rotations[frame, skeleton.index_of("LeftFoot")]
abduction, flexion, rotation = to_euler(ankle_rotation, "ZXY")
print(f"\nleft ankle local rotation at frame {frame} (ZXY decomposition):")
print(f"  abduction {abduction:+.1f} deg, dorsiflexion {flexion:+.1f} deg, "
      f"rotation {rotation:+.1f} deg")

# heights of both ankles across the clip: the sweep never lifts a foot
from motionrisk import forward_kinematics_sequence

positions, _ = forward_kinematics_sequence(skeleton, seq)
for side in ("LeftFoot", "RightFoot"):
    h = positions[:, skeleton.index_of(side), 1]
    print(f"{side}: height range [{h.min():.4f}, {h.max():.4f}] m")
