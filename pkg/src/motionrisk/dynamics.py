"""Simplified rigid-segment load estimation.

Joint loads are quasi-static: no angular inertia and no muscle model.
Per frame, a joint on a limb whose foot is in ground contact carries an
equal share of the whole-body load m_total * |a_com - g|; a joint on a
swing limb carries the inertial+gravitational load of the segments distal
to it, |sum_i m_i * (a_i - g)|. Segment masses come from an anthropometric
fraction table (user-replaceable; fractions sum to 1). Accelerations are
filtered second derivatives of segment center-of-mass positions.

Gravity is (0, -9.81, 0): the world is Y-up. Loads are reported both in
Newtons and in body-weight multiples (N / (m_total * 9.81)).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.ndimage import median_filter

from .kinematics import forward_kinematics_sequence
from .signals import FilterSpec, differentiate_samples, smooth_samples
from .types import MetricStream, PoseSequence, Skeleton

GRAVITY_MPS2 = 9.81
G_VECTOR = np.array([0.0, -GRAVITY_MPS2, 0.0])

MASS_FRACTION_TOL = 1e-6

#: contact heuristic defaults; robust at 30-120 Hz on the shipped fixtures
CONTACT_HEIGHT_TOL_M = 0.05
CONTACT_SPEED_TOL_MPS = 0.2


@dataclass(frozen=True)
class SegmentDef:
    name: str
    proximal: str
    distal: str
    mass_fraction: float
    com_ratio: float


@dataclass(frozen=True)
class LoadJointDef:
    """A joint for which load streams are produced."""

    name: str
    measure_prefix: str
    foot: str  # "left" | "right"
    distal_segments: tuple[str, ...]


@dataclass(frozen=True)
class SegmentTable:
    """Anthropometric configuration: segments, foot joints, load joints."""

    segments: tuple[SegmentDef, ...]
    feet: Mapping[str, str]
    load_joints: tuple[LoadJointDef, ...]

    def segment(self, name: str) -> SegmentDef:
        for s in self.segments:
            if s.name == name:
                return s
        raise KeyError(f"unknown segment {name!r}")


@dataclass(frozen=True)
class SegmentModel:
    """Segment table bound to a subject's body mass."""

    table: SegmentTable
    body_mass_kg: float

    @property
    def segments(self) -> tuple[SegmentDef, ...]:
        return self.table.segments

    def segment_mass_kg(self, name: str) -> float:
        return self.table.segment(name).mass_fraction * self.body_mass_kg

    @property
    def masses_kg(self) -> np.ndarray:
        return np.array([s.mass_fraction for s in self.segments]) * self.body_mass_kg


@dataclass(frozen=True)
class ContactState:
    """Per-frame, per-foot ground contact flags."""

    feet: tuple[str, ...]  # foot keys, e.g. ("left", "right")
    flags: np.ndarray  # (T, n_feet) bool

    def __post_init__(self):
        flags = np.asarray(self.flags, dtype=bool)
        if flags.ndim != 2 or flags.shape[1] != len(self.feet):
            raise ValueError(f"flags must have shape (T, {len(self.feet)})")
        flags.setflags(write=False)
        object.__setattr__(self, "flags", flags)

    def in_contact(self, foot: str) -> np.ndarray:
        return self.flags[:, self.feet.index(foot)]

    @property
    def count(self) -> np.ndarray:
        """Number of feet in contact per frame."""
        return self.flags.sum(axis=1)


def load_segment_table(source: str | Path | Mapping) -> SegmentTable:
    """Read a segment table from a JSON file path, JSON text, or mapping."""
    if isinstance(source, Mapping):
        doc = source
    else:
        s = str(source)
        text = Path(source).read_text(encoding="utf-8") if not s.lstrip().startswith("{") else s
        doc = json.loads(text)
    try:
        segments = tuple(
            SegmentDef(
                name=e["segment"],
                proximal=e["proximal"],
                distal=e["distal"],
                mass_fraction=float(e["mass_fraction"]),
                com_ratio=float(e["com_ratio"]),
            )
            for e in doc["segments"]
        )
        feet = dict(doc["feet"])
        load_joints = tuple(
            LoadJointDef(
                name=e["name"],
                measure_prefix=e["measure_prefix"],
                foot=e["foot"],
                distal_segments=tuple(e["distal_segments"]),
            )
            for e in doc.get("load_joints", [])
        )
    except (KeyError, TypeError) as e:
        raise ValueError(f"segment table: missing or malformed field {e}") from None
    table = SegmentTable(segments=segments, feet=feet, load_joints=load_joints)
    _validate_table(table)
    return table


def default_segment_table() -> SegmentTable:
    text = resources.files("motionrisk.data").joinpath("segments_default.json").read_text()
    return load_segment_table(json.loads(text))


def _validate_table(table: SegmentTable) -> None:
    names = [s.name for s in table.segments]
    if len(set(names)) != len(names):
        raise ValueError("segment table has duplicate segment names")
    total = sum(s.mass_fraction for s in table.segments)
    if any(s.mass_fraction <= 0 for s in table.segments):
        raise ValueError("segment mass fractions must be positive")
    if abs(total - 1.0) > MASS_FRACTION_TOL:
        raise ValueError(f"segment mass fractions must sum to 1.0, got {total!r}")
    for lj in table.load_joints:
        if lj.foot not in table.feet:
            raise ValueError(f"load joint {lj.name!r} references unknown foot {lj.foot!r}")
        for seg in lj.distal_segments:
            table.segment(seg)


def segment_parameters(
    skeleton: Skeleton, body_mass_kg: float, table: SegmentTable | None = None
) -> SegmentModel:
    """Bind the anthropometric table to a skeleton and body mass."""
    if not (body_mass_kg > 0):
        raise ValueError(f"body mass must be > 0 kg, got {body_mass_kg}")
    table = table or default_segment_table()
    missing = sorted(
        {j for s in table.segments for j in (s.proximal, s.distal) if not skeleton.has_joint(j)}
        | {j for j in table.feet.values() if not skeleton.has_joint(j)}
    )
    if missing:
        raise ValueError(f"skeleton is missing joints required by the segment table: {missing}")
    return SegmentModel(table=table, body_mass_kg=body_mass_kg)


def detect_contact(
    skeleton: Skeleton,
    seq: PoseSequence,
    feet: Mapping[str, str] | None = None,
    height_tol_m: float = CONTACT_HEIGHT_TOL_M,
    speed_tol_mps: float = CONTACT_SPEED_TOL_MPS,
) -> ContactState:
    """Heuristic ground contact per foot per frame.

    A foot is in contact when its world height is within height_tol_m of
    the sequence-wide minimum foot height and its vertical speed is below
    speed_tol_mps; flags are median-filtered over 3 frames to drop
    single-frame flicker.
    """
    feet = dict(feet if feet is not None else default_segment_table().feet)
    missing = [j for j in feet.values() if not skeleton.has_joint(j)]
    if missing:
        raise ValueError(f"skeleton is missing foot joints: {missing}")

    positions, _ = forward_kinematics_sequence(skeleton, seq)
    keys = tuple(feet.keys())
    heights = np.stack([positions[:, skeleton.index_of(feet[k]), 1] for k in keys], axis=1)
    floor = float(heights.min())

    if seq.frame_count >= 2:
        speed = np.abs(
            np.stack([differentiate_samples(heights[:, i], seq.frame_rate_hz) for i in range(len(keys))], axis=1)
        )
    else:
        speed = np.zeros_like(heights)

    flags = (heights <= floor + height_tol_m) & (speed < speed_tol_mps)
    if seq.frame_count >= 3:
        flags = median_filter(flags.astype(np.int8), size=(3, 1), mode="nearest") > 0
    return ContactState(feet=keys, flags=flags)


def segment_com_positions(
    skeleton: Skeleton, seq: PoseSequence, model: SegmentModel
) -> np.ndarray:
    """World segment center-of-mass positions, shape (T, S, 3)."""
    positions, _ = forward_kinematics_sequence(skeleton, seq)
    coms = np.empty((seq.frame_count, len(model.segments), 3))
    for s, seg in enumerate(model.segments):
        p = positions[:, skeleton.index_of(seg.proximal)]
        d = positions[:, skeleton.index_of(seg.distal)]
        coms[:, s] = p + seg.com_ratio * (d - p)
    return coms


def _second_derivative(series: np.ndarray, rate_hz: float, spec: FilterSpec | None) -> np.ndarray:
    """Filtered second time derivative along axis 0 of a (T, ...) array."""
    flat = series.reshape(series.shape[0], -1)
    out = np.zeros_like(flat)
    if series.shape[0] >= 2:
        for k in range(flat.shape[1]):
            col = flat[:, k]
            if spec is not None and series.shape[0] >= 3 * spec.order:
                col = smooth_samples(col, rate_hz, spec)
            col = differentiate_samples(col, rate_hz)
            col = differentiate_samples(col, rate_hz)
            out[:, k] = col
    return out.reshape(series.shape)


def joint_load_stream(
    skeleton: Skeleton,
    seq: PoseSequence,
    model: SegmentModel,
    contact: ContactState,
    filter_spec: FilterSpec | None = FilterSpec(),
    joints: Sequence[str] | None = None,
) -> list[MetricStream]:
    """Quasi-static load streams for the configured joints.

    Returns, per load joint in table order, a Newton stream followed by a
    body-weight stream (ids "<prefix>_n" and "<prefix>_bw").
    """
    seq.check_matches(skeleton)
    if contact.flags.shape[0] != seq.frame_count:
        raise ValueError(
            f"contact has {contact.flags.shape[0]} frames, sequence has {seq.frame_count}"
        )
    selected = list(model.table.load_joints)
    if joints is not None:
        known = {lj.name for lj in selected}
        unknown = [j for j in joints if j not in known]
        if unknown:
            raise ValueError(f"unknown load joints: {unknown}")
        selected = [lj for lj in selected if lj.name in set(joints)]

    coms = segment_com_positions(skeleton, seq, model)
    masses = model.masses_kg
    m_total = model.body_mass_kg
    accels = _second_derivative(coms, seq.frame_rate_hz, filter_spec)

    body_com = (coms * masses[None, :, None]).sum(axis=1) / m_total
    a_com = _second_derivative(body_com, seq.frame_rate_hz, filter_spec)
    stance_total = m_total * np.linalg.norm(a_com - G_VECTOR, axis=1)
    n_contact = contact.count

    seg_index = {s.name: i for i, s in enumerate(model.segments)}
    streams: list[MetricStream] = []
    for lj in selected:
        idx = [seg_index[s] for s in lj.distal_segments]
        force_vec = (
            masses[None, idx, None] * (accels[:, idx] - G_VECTOR[None, None, :])
        ).sum(axis=1)
        swing = np.linalg.norm(force_vec, axis=1)

        foot_contact = contact.in_contact(lj.foot)
        share = np.where(n_contact > 0, stance_total / np.maximum(n_contact, 1), 0.0)
        newtons = np.where(foot_contact, share, swing)

        streams.append(
            MetricStream(f"{lj.measure_prefix}_n", "N", newtons, seq.frame_rate_hz)
        )
        streams.append(
            MetricStream(
                f"{lj.measure_prefix}_bw",
                "BW",
                newtons / (m_total * GRAVITY_MPS2),
                seq.frame_rate_hz,
            )
        )
    return streams
