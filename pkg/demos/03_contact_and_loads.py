"""Foot-contact detection and quasi-static joint loads.

Uses the neutral standing fixture for the closed-form case (each ankle
carries half body weight), then a synthetic hop to show the stance/swing
split and body-weight-multiple reporting.
"""
from pathlib import Path

import numpy as np

from motionrisk import (
    detect_contact,
    joint_load_stream,
    parse_mocap_text,
    segment_parameters,
)
from motionrisk.dynamics import GRAVITY_MPS2
from motionrisk.fixtures import humanoid_skeleton
from motionrisk.types import PoseSequence
from motionrisk import quat

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
BODY_MASS = 70.0

skeleton, seq = parse_mocap_text((FIXTURES / "neutral_stand.bvh").read_text())
model = segment_parameters(skeleton, BODY_MASS)

print("anthropometric table (fractions of body mass):")
for seg in model.segments:
    print(f"  {seg.name:<12s} {seg.mass_fraction:.4f} -> {model.segment_mass_kg(seg.name):6.3f} kg")
print(f"  total {sum(s.mass_fraction for s in model.segments):.6f} -> {model.masses_kg.sum():.3f} kg")

contact = detect_contact(skeleton, seq)
print(f"\nstanding: both feet in contact on {int(contact.flags.all(axis=1).sum())}"
      f"/{seq.frame_count} frames")

loads = {s.measure_id: s for s in joint_load_stream(skeleton, seq, model, contact)}
ankle_n = loads["left_ankle_force_n"].samples[0]
print(f"per-ankle static load: {ankle_n:.2f} N = "
      f"{loads['left_ankle_force_bw'].samples[0]:.3f} BW "
      f"(closed form: {0.5 * BODY_MASS * GRAVITY_MPS2:.2f} N)")

# a vertical hop: the body accelerates upward, leaves the ground, lands
frames, rate = 240, 60.0
t = np.arange(frames) / rate
height = np.where((t > 1.2) & (t < 1.8), 0.45 * np.sin(np.pi * (t - 1.2) / 0.6) ** 2, 0.0)
translation = np.tile([0.0, 0.95, 0.0], (frames, 1))
translation[:, 1] += height
hop = PoseSequence(rate, translation, np.tile(quat.identity(), (frames, skeleton.joint_count, 1)))

hop_contact = detect_contact(skeleton, hop)
airborne = (~hop_contact.flags.any(axis=1)).sum()
print(f"\nhop: airborne on {airborne}/{frames} frames")

hop_loads = {s.measure_id: s for s in joint_load_stream(skeleton, hop, model, hop_contact)}
bw = hop_loads["left_ankle_force_bw"].samples
print(f"left ankle load: peak {bw.max():.2f} BW at t = {bw.argmax() / rate:.2f} s, "
      f"minimum {bw.min():.2f} BW in flight")
