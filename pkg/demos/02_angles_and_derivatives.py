"""Anatomical angle streams, zero-phase smoothing, and derivatives.

Extracts the shipped measures from the Achilles sweep fixture, smooths
them, differentiates twice, and prints a tiny text plot of the left-ankle
dorsiflexion trace with the 40 deg rule threshold marked.
"""
from pathlib import Path

import numpy as np

from motionrisk import (
    FilterSpec,
    default_bindings,
    differentiate,
    extract_all_streams,
    parse_mocap_text,
    smooth,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

skeleton, seq = parse_mocap_text((FIXTURES / "achilles_sweep.bvh").read_text())
bindings = default_bindings()
streams = extract_all_streams(skeleton, seq, bindings)
print(f"extracted {len(streams)} angle streams, {seq.frame_count} samples each")

spec = FilterSpec(cutoff_hz=6.0, order=4)
dorsi_raw = next(s for s in streams if s.measure_id == "left_ankle_dorsiflexion_deg")
dorsi = smooth(dorsi_raw, spec)
vel = differentiate(dorsi)
acc = differentiate(vel)

print(f"\n{dorsi.measure_id}:")
print(f"  raw peak      {dorsi_raw.samples.max():7.2f} deg")
print(f"  smoothed peak {dorsi.samples.max():7.2f} deg (6 Hz zero-phase low-pass)")
print(f"  velocity      {np.abs(vel.samples).max():7.2f} {vel.unit} peak magnitude")
print(f"  acceleration  {np.abs(acc.samples).max():7.2f} {acc.unit} peak magnitude")

print("\ndorsiflexion trace ('#' above the 40 deg threshold):")
width = 60
step = max(1, seq.frame_count // 24)
scale = 45.0
for i in range(0, seq.frame_count, step):
    value = dorsi.samples[i]
    bar = int(round(max(value, 0.0) / scale * width))
    marker = "#" if value > 40.0 else "*"
    t = i / seq.frame_rate_hz
    print(f"  {t:5.2f}s {value:6.1f} |{marker * bar}")
