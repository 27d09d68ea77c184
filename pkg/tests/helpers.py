"""Independent oracles the tests check the library against.

These deliberately avoid the library's own code paths: forward kinematics
is recomputed with explicit 4x4 matrix composition, and incident
segmentation with a naive run/merge enumeration.
"""
from __future__ import annotations

import numpy as np

from motionrisk.types import JointDef, Skeleton


def quat_to_matrix_reference(q):
    """3x3 rotation matrix from a (w, x, y, z) quaternion, written out longhand."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def fk_matrix_oracle(skeleton: Skeleton, root_translation, rotations) -> np.ndarray:
    """World joint positions by brute-force 4x4 world-matrix composition."""
    world = [None] * skeleton.joint_count
    for i, joint in enumerate(skeleton.joints):
        local = np.eye(4)
        local[:3, :3] = quat_to_matrix_reference(rotations[i])
        local[:3, 3] = joint.offset
        if joint.parent is None:
            local[:3, 3] = np.asarray(root_translation, dtype=float)
            world[i] = local
        else:
            world[i] = world[joint.parent] @ local
    return np.stack([m[:3, 3] for m in world])


def random_skeleton(rng: np.random.Generator, max_joints: int = 10) -> Skeleton:
    n = int(rng.integers(1, max_joints + 1))
    joints = []
    for i in range(n):
        parent = None if i == 0 else int(rng.integers(0, i))
        joints.append(
            JointDef(
                name=f"j{i}",
                parent=parent,
                offset=rng.uniform(-1.0, 1.0, size=3),
            )
        )
    return Skeleton(tuple(joints))


def random_unit_quats(rng: np.random.Generator, shape) -> np.ndarray:
    q = rng.normal(size=tuple(np.atleast_1d(shape)) + (4,))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def incident_spans_oracle(
    mask,
    frame_rate_hz: float,
    min_duration_s: float,
    merge_gap_s: float,
    margins=None,
):
    """Naive O(n^2)-style run enumeration, filter, and merge.

    Returns a list of dicts {start, end, gaps, peak} (peak only when a
    margins array is supplied; earliest-frame tie-break).
    """
    mask = [bool(v) for v in mask]
    n = len(mask)

    # enumerate maximal runs the dumb way: every (i, j) candidate
    runs = []
    for i in range(n):
        if not mask[i] or (i > 0 and mask[i - 1]):
            continue
        j = i
        while j + 1 < n and mask[j + 1]:
            j += 1
        runs.append((i, j))

    kept = [r for r in runs if (r[1] - r[0] + 1) / frame_rate_hz >= min_duration_s]

    merged: list[dict] = []
    for run in kept:
        if merged and (run[0] - merged[-1]["end"] - 1) / frame_rate_hz < merge_gap_s:
            merged[-1]["gaps"].append((merged[-1]["end"] + 1, run[0] - 1))
            merged[-1]["end"] = run[1]
        else:
            merged.append({"start": run[0], "end": run[1], "gaps": []})

    if margins is not None:
        for inc in merged:
            best, best_frame = None, None
            for f in range(inc["start"], inc["end"] + 1):
                if not mask[f]:
                    continue
                if best is None or margins[f] > best:
                    best, best_frame = margins[f], f
            inc["peak"] = best_frame
    return merged
