"""Core data types shared across the toolkit.

All values are immutable after construction: numpy arrays are copied on
ingest and flagged read-only, so instances are safe to share across
concurrent readers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ROTATION_ORDERS = ("XYZ", "XZY", "YXZ", "YZX", "ZXY", "ZYX")

QUAT_NORM_TOL = 1e-6
DEGENERATE_QUAT_NORM = 1e-3


def _frozen_array(values, shape, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if arr.shape != shape:
        raise ValueError(f"expected array of shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class JointDef:
    """One joint in a skeleton hierarchy.

    offset is the parent-relative rest offset in meters. channel_order is
    the rotation-axis permutation declared for the joint (e.g. "ZXY").
    End-effector sites are retained as zero-channel joints (site=True);
    they carry segment-length information but no rotation channels.
    """

    name: str
    parent: int | None
    offset: np.ndarray
    channel_order: str = "ZXY"
    site: bool = False

    def __post_init__(self):
        object.__setattr__(self, "offset", _frozen_array(self.offset, (3,)))
        if self.channel_order not in ROTATION_ORDERS:
            raise ValueError(f"joint {self.name!r}: invalid channel order {self.channel_order!r}")
        if not np.all(np.isfinite(self.offset)):
            raise ValueError(f"joint {self.name!r}: offset is not finite")


@dataclass(frozen=True, eq=False)
class Skeleton:
    """Named joint hierarchy in topological (declaration) order."""

    joints: tuple[JointDef, ...]

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))
        self.validate()

    def validate(self) -> None:
        if not self.joints:
            raise ValueError("skeleton has no joints")
        names = [j.name for j in self.joints]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate joint names: {dupes}")
        roots = [i for i, j in enumerate(self.joints) if j.parent is None]
        if len(roots) != 1:
            raise ValueError(f"skeleton must have exactly one root, found {len(roots)}")
        if roots[0] != 0:
            raise ValueError("root joint must be first in declaration order")
        for i, j in enumerate(self.joints):
            if j.parent is not None and not (0 <= j.parent < i):
                raise ValueError(
                    f"joint {j.name!r}: parent index {j.parent} does not precede position {i}"
                )

    @property
    def joint_count(self) -> int:
        return len(self.joints)

    @property
    def names(self) -> list[str]:
        return [j.name for j in self.joints]

    @property
    def parents(self) -> np.ndarray:
        """Parent indices with -1 for the root."""
        return np.array([-1 if j.parent is None else j.parent for j in self.joints], dtype=int)

    @property
    def offsets(self) -> np.ndarray:
        return np.stack([j.offset for j in self.joints])

    def index_of(self, name: str) -> int:
        for i, j in enumerate(self.joints):
            if j.name == name:
                return i
        raise KeyError(f"unknown joint {name!r}")

    def has_joint(self, name: str) -> bool:
        return any(j.name == name for j in self.joints)

    def children_of(self, index: int) -> list[int]:
        return [i for i, j in enumerate(self.joints) if j.parent == index]


@dataclass(frozen=True, eq=False)
class PoseSequence:
    """Time-ordered pose frames at a fixed frame rate.

    root_translation has shape (T, 3) in meters; rotations has shape
    (T, J, 4) as unit quaternions in (w, x, y, z) order, one per joint.
    """

    frame_rate_hz: float
    root_translation: np.ndarray
    rotations: np.ndarray

    def __post_init__(self):
        if not (self.frame_rate_hz > 0):
            raise ValueError(f"frame rate must be > 0, got {self.frame_rate_hz}")
        rot = np.array(self.rotations, dtype=np.float64)
        if rot.ndim != 3 or rot.shape[2] != 4 or rot.shape[0] < 1:
            raise ValueError(f"rotations must have shape (T, J, 4) with T >= 1, got {rot.shape}")
        trans = _frozen_array(self.root_translation, (rot.shape[0], 3))
        norms = np.linalg.norm(rot, axis=-1)
        if np.any(np.abs(norms - 1.0) > QUAT_NORM_TOL):
            worst = float(np.max(np.abs(norms - 1.0)))
            raise ValueError(f"rotations are not unit quaternions (worst deviation {worst:.2e})")
        rot.setflags(write=False)
        object.__setattr__(self, "root_translation", trans)
        object.__setattr__(self, "rotations", rot)

    @property
    def frame_count(self) -> int:
        return self.rotations.shape[0]

    @property
    def joint_count(self) -> int:
        return self.rotations.shape[1]

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.frame_rate_hz

    def times(self) -> np.ndarray:
        return np.arange(self.frame_count) / self.frame_rate_hz

    def frame(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """(root_translation, rotations) for one frame."""
        return self.root_translation[i], self.rotations[i]

    def check_matches(self, skeleton: Skeleton) -> None:
        if self.joint_count != skeleton.joint_count:
            raise ValueError(
                f"sequence has {self.joint_count} rotations per frame, "
                f"skeleton has {skeleton.joint_count} joints"
            )


@dataclass(frozen=True, eq=False)
class GlobalPose:
    """World-space joint positions (m) and orientations for one frame."""

    positions: np.ndarray
    orientations: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64)
        ori = np.array(self.orientations, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError(f"positions must have shape (J, 3), got {pos.shape}")
        if ori.shape != (pos.shape[0], 4):
            raise ValueError(f"orientations must have shape ({pos.shape[0]}, 4), got {ori.shape}")
        pos.setflags(write=False)
        ori.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "orientations", ori)


@dataclass(frozen=True, eq=False)
class MetricStream:
    """A named, unit-tagged scalar time series aligned to the frame grid."""

    measure_id: str
    unit: str
    samples: np.ndarray
    frame_rate_hz: float

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"stream {self.measure_id!r} contains non-finite samples")
        if not (self.frame_rate_hz > 0):
            raise ValueError(f"frame rate must be > 0, got {self.frame_rate_hz}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.frame_rate_hz

    def with_samples(self, samples, unit: str | None = None) -> "MetricStream":
        return MetricStream(self.measure_id, unit or self.unit, samples, self.frame_rate_hz)
