"""Forward kinematics and anatomical joint-angle extraction.

Anatomical measures (flexion/extension, abduction/adduction, internal/
external rotation, dorsiflexion/plantarflexion) are realized as Euler
components of a joint's local rotation under a per-measure decomposition
order, with a sign and neutral offset. The mapping lives in a binding
table so any rig can be remapped without touching code.

The shipped default covers ankle, knee, hip, and trunk for both sides
using the abduction->flexion->rotation (ZXY) ordering with flexion,
abduction, internal rotation, and dorsiflexion positive. Abduction is
deliberately the first axis: the middle Euler angle is confined to
[-90, 90] degrees, and valgus-collapse postures put abduction well past
90 while flexion stays inside the sagittal range.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import quat
from .types import ROTATION_ORDERS, GlobalPose, MetricStream, PoseSequence, Skeleton

QUAT_INPUT_TOL = 1e-6


@dataclass(frozen=True)
class AnatomicalBinding:
    """Maps a measure id onto one Euler component of one joint's rotation."""

    measure_id: str
    joint: str
    order: str = "ZXY"
    component: int = 0
    sign: float = 1.0
    neutral_offset_deg: float = 0.0

    def __post_init__(self):
        if self.order not in ROTATION_ORDERS:
            raise ValueError(f"binding {self.measure_id!r}: invalid order {self.order!r}")
        if self.component not in (0, 1, 2):
            raise ValueError(f"binding {self.measure_id!r}: component must be 0, 1 or 2")
        if self.sign not in (1.0, -1.0):
            raise ValueError(f"binding {self.measure_id!r}: sign must be +1 or -1")
        if not np.isfinite(self.neutral_offset_deg):
            raise ValueError(f"binding {self.measure_id!r}: neutral offset must be finite")


def forward_kinematics(skeleton: Skeleton, root_translation, rotations) -> GlobalPose:
    """World positions and orientations for one frame.

    The root's world position equals root_translation; every child sits at
    its parent's position plus the parent's world orientation applied to
    the child's offset.
    """
    rotations = np.asarray(rotations, dtype=np.float64)
    if rotations.shape != (skeleton.joint_count, 4):
        raise ValueError(
            f"frame has {rotations.shape[0] if rotations.ndim == 2 else '?'} rotations, "
            f"skeleton has {skeleton.joint_count} joints"
        )
    positions = np.empty((skeleton.joint_count, 3))
    orientations = np.empty((skeleton.joint_count, 4))
    positions[0] = np.asarray(root_translation, dtype=np.float64)
    orientations[0] = rotations[0]
    for i, joint in enumerate(skeleton.joints):
        if joint.parent is None:
            continue
        p = joint.parent
        positions[i] = positions[p] + quat.rotate(orientations[p], joint.offset)
        orientations[i] = quat.multiply(orientations[p], rotations[i])
    return GlobalPose(positions, orientations)


def forward_kinematics_sequence(
    skeleton: Skeleton, seq: PoseSequence
) -> tuple[np.ndarray, np.ndarray]:
    """FK over all frames, vectorized across time.

    Returns (positions, orientations) of shapes (T, J, 3) and (T, J, 4).
    """
    seq.check_matches(skeleton)
    n, j = seq.frame_count, skeleton.joint_count
    positions = np.empty((n, j, 3))
    orientations = np.empty((n, j, 4))
    positions[:, 0] = seq.root_translation
    orientations[:, 0] = seq.rotations[:, 0]
    for i, joint in enumerate(skeleton.joints):
        if joint.parent is None:
            continue
        p = joint.parent
        positions[:, i] = positions[:, p] + quat.rotate(orientations[:, p], joint.offset)
        orientations[:, i] = quat.multiply(orientations[:, p], seq.rotations[:, i])
    return positions, orientations


def to_euler(q, order: str) -> np.ndarray:
    """Euler decomposition (degrees) of unit quaternions; see quat.to_euler_deg."""
    q = np.asarray(q, dtype=np.float64)
    norms = np.linalg.norm(q, axis=-1)
    if np.any(np.abs(norms - 1.0) > QUAT_INPUT_TOL):
        raise ValueError("to_euler requires unit quaternions (|q| within 1e-6 of 1)")
    return quat.to_euler_deg(q, order)


def anatomical_angle_stream(
    skeleton: Skeleton, seq: PoseSequence, binding: AnatomicalBinding
) -> MetricStream:
    """Per-frame anatomical angle in degrees for one binding."""
    seq.check_matches(skeleton)
    index = skeleton.index_of(binding.joint)
    angles = quat.to_euler_deg(seq.rotations[:, index], binding.order)
    samples = binding.sign * angles[:, binding.component] + binding.neutral_offset_deg
    return MetricStream(binding.measure_id, "deg", samples, seq.frame_rate_hz)


def extract_all_streams(
    skeleton: Skeleton, seq: PoseSequence, bindings: Iterable[AnatomicalBinding]
) -> list[MetricStream]:
    """One angle stream per binding, in binding declaration order."""
    return [anatomical_angle_stream(skeleton, seq, b) for b in bindings]


def load_binding_table(source: str | Path | Mapping) -> list[AnatomicalBinding]:
    """Load a binding table from a JSON file path, JSON text, or mapping.

    File schema: {measure_id: {joint, order, component, sign,
    neutral_offset_deg}}; order/sign/neutral default to ZXY/+1/0.
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        text = Path(source).read_text(encoding="utf-8") if _looks_like_path(source) else str(source)
        doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("binding table must be a JSON object keyed by measure id")
    bindings = []
    for measure_id, spec in doc.items():
        if not isinstance(spec, dict) or "joint" not in spec:
            raise ValueError(f"binding {measure_id!r}: expected an object with a 'joint' field")
        bindings.append(
            AnatomicalBinding(
                measure_id=measure_id,
                joint=spec["joint"],
                order=spec.get("order", "ZXY"),
                component=spec.get("component", 0),
                sign=float(spec.get("sign", 1.0)),
                neutral_offset_deg=float(spec.get("neutral_offset_deg", 0.0)),
            )
        )
    if not bindings:
        raise ValueError("binding table is empty")
    return bindings


def default_bindings() -> list[AnatomicalBinding]:
    """The shipped binding table (ankle/knee/hip left+right, trunk)."""
    text = resources.files("motionrisk.data").joinpath("bindings_default.json").read_text()
    return load_binding_table(json.loads(text))


def _looks_like_path(source) -> bool:
    if isinstance(source, Path):
        return True
    s = str(source).lstrip()
    return not s.startswith("{")
