"""Motion ingestion: interchange documents, resampling, format dispatch.

The pose interchange format is a JSON document:

    {
      "skeleton": {"joints": [{"name": ..., "parent": null | int,
                               "offset_m": [x, y, z]}, ...]},
      "frame_rate_hz": 60.0,
      "frames": [{"root_translation_m": [x, y, z],
                  "rotations": [[w, x, y, z], ...]}, ...]
    }

Quaternion components are (w, x, y, z); values are taken verbatim and then
normalized. Quaternions with norm below 1e-3 are rejected as degenerate.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import quat
from .bvh import DEFAULT_SCALE, ParseError, parse_mocap_text, serialize_mocap_text
from .types import DEGENERATE_QUAT_NORM, JointDef, PoseSequence, Skeleton

__all__ = [
    "parse_mocap_text",
    "serialize_mocap_text",
    "parse_pose_interchange",
    "write_pose_interchange",
    "resample",
    "load_motion_file",
    "save_motion_file",
    "ParseError",
    "SchemaError",
]


class SchemaError(ValueError):
    """Interchange document violates the schema; message carries the field path."""


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(f"{path}: {message}")


def _vec3(value, path: str) -> np.ndarray:
    _expect(isinstance(value, (list, tuple)) and len(value) == 3, path, "expected a 3-element array")
    _expect(all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value), path, "expected numbers")
    arr = np.asarray(value, dtype=np.float64)
    _expect(bool(np.all(np.isfinite(arr))), path, "values must be finite")
    return arr


def parse_pose_interchange(text: str) -> tuple[Skeleton, PoseSequence]:
    """Parse a pose interchange document into (Skeleton, PoseSequence)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"document: not valid JSON ({e})") from None
    _expect(isinstance(doc, dict), "document", "expected a JSON object")

    sk_block = doc.get("skeleton")
    _expect(isinstance(sk_block, dict), "skeleton", "missing or not an object")
    joints_block = sk_block.get("joints")
    _expect(isinstance(joints_block, list) and joints_block, "skeleton.joints", "missing or empty")

    joints = []
    for i, jb in enumerate(joints_block):
        path = f"skeleton.joints[{i}]"
        _expect(isinstance(jb, dict), path, "expected an object")
        name = jb.get("name")
        _expect(isinstance(name, str) and bool(name), f"{path}.name", "missing or empty")
        parent = jb.get("parent", None)
        _expect(parent is None or isinstance(parent, int), f"{path}.parent", "expected null or an index")
        offset = _vec3(jb.get("offset_m"), f"{path}.offset_m")
        joints.append(JointDef(name=name, parent=parent, offset=offset))
    try:
        skeleton = Skeleton(tuple(joints))
    except ValueError as e:
        raise SchemaError(f"skeleton: {e}") from None

    rate = doc.get("frame_rate_hz")
    _expect(
        isinstance(rate, (int, float)) and not isinstance(rate, bool) and rate > 0,
        "frame_rate_hz",
        "must be a positive number",
    )

    frames_block = doc.get("frames")
    _expect(isinstance(frames_block, list) and frames_block, "frames", "missing or empty")

    n = len(frames_block)
    j = skeleton.joint_count
    translation = np.zeros((n, 3))
    rotations = np.empty((n, j, 4))
    for f, fb in enumerate(frames_block):
        path = f"frames[{f}]"
        _expect(isinstance(fb, dict), path, "expected an object")
        translation[f] = _vec3(fb.get("root_translation_m"), f"{path}.root_translation_m")
        rots = fb.get("rotations")
        _expect(isinstance(rots, list), f"{path}.rotations", "missing or not an array")
        if len(rots) != j:
            raise SchemaError(
                f"{path}.rotations: has {len(rots)} quaternions, skeleton has {j} joints"
            )
        for k, r in enumerate(rots):
            rpath = f"{path}.rotations[{k}]"
            _expect(isinstance(r, (list, tuple)) and len(r) == 4, rpath, "expected a 4-element array")
            arr = np.asarray(r, dtype=np.float64)
            _expect(bool(np.all(np.isfinite(arr))), rpath, "values must be finite")
            norm = float(np.linalg.norm(arr))
            if norm < DEGENERATE_QUAT_NORM:
                raise SchemaError(f"{rpath}: degenerate rotation, norm {norm:.2e} < 1e-3")
            rotations[f, k] = arr / norm

    seq = PoseSequence(frame_rate_hz=float(rate), root_translation=translation, rotations=rotations)
    return skeleton, seq


def write_pose_interchange(skeleton: Skeleton, seq: PoseSequence) -> str:
    """Serialize to the interchange schema (deterministic field order)."""
    seq.check_matches(skeleton)
    doc = {
        "skeleton": {
            "joints": [
                {"name": j.name, "parent": j.parent, "offset_m": [float(v) for v in j.offset]}
                for j in skeleton.joints
            ]
        },
        "frame_rate_hz": seq.frame_rate_hz,
        "frames": [
            {
                "root_translation_m": [float(v) for v in seq.root_translation[f]],
                "rotations": [[float(v) for v in q] for q in seq.rotations[f]],
            }
            for f in range(seq.frame_count)
        ],
    }
    return json.dumps(doc, indent=1)


def resample(seq: PoseSequence, target_rate_hz: float) -> PoseSequence:
    """Resample onto a new frame grid.

    Root translation is linearly interpolated; rotations use shortest-arc
    spherical interpolation. Duration is preserved within one output frame
    period. Resampling to the source rate returns a value-identical copy.
    """
    if not (target_rate_hz > 0):
        raise ValueError(f"target rate must be > 0, got {target_rate_hz}")
    if target_rate_hz == seq.frame_rate_hz:
        return PoseSequence(seq.frame_rate_hz, seq.root_translation, seq.rotations)

    n_src = seq.frame_count
    span_s = (n_src - 1) / seq.frame_rate_hz
    n_out = int(np.floor(span_s * target_rate_hz + 1e-9)) + 1

    times = np.arange(n_out) / target_rate_hz
    x = np.clip(times * seq.frame_rate_hz, 0.0, n_src - 1)
    i0 = np.minimum(x.astype(int), n_src - 1)
    i1 = np.minimum(i0 + 1, n_src - 1)
    frac = x - i0

    translation = seq.root_translation[i0] + frac[:, None] * (
        seq.root_translation[i1] - seq.root_translation[i0]
    )
    rotations = quat.slerp(seq.rotations[i0], seq.rotations[i1], frac[:, None])
    return PoseSequence(target_rate_hz, translation, rotations)


def load_motion_file(path: str | Path, scale: float = DEFAULT_SCALE) -> tuple[Skeleton, PoseSequence]:
    """Parse a motion file, picking the format from its extension.

    .bvh parses as hierarchical mocap text with the given scale; anything
    else is read as a pose interchange document.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() == ".bvh":
            return parse_mocap_text(text, scale=scale)
        return parse_pose_interchange(text)
    except (ParseError, SchemaError) as e:
        raise ValueError(f"{path}: {e}") from None


def save_motion_file(
    skeleton: Skeleton, seq: PoseSequence, path: str | Path, scale: float = DEFAULT_SCALE
) -> None:
    path = Path(path)
    if path.suffix.lower() == ".bvh":
        text = serialize_mocap_text(skeleton, seq, scale=scale)
    else:
        text = write_pose_interchange(skeleton, seq)
    path.write_text(text, encoding="utf-8")
