"""Quaternion math and Euler-angle conversions.

Quaternions are stored as (w, x, y, z) float arrays; all functions accept
stacked arrays with the quaternion on the last axis. Euler conversions use
intrinsic rotations applied in the declared axis order, with angles in
degrees. Gimbal-lock convention: the third angle is set to 0 and all
remaining rotation is assigned to the first axis.
"""
from __future__ import annotations

import numpy as np

from .types import ROTATION_ORDERS

_AXIS_INDEX = {"X": 0, "Y": 1, "Z": 2}

# Orders whose axis triple is a cyclic permutation of (X, Y, Z).
_CYCLIC = {"XYZ", "YZX", "ZXY"}

# cos(beta) below which the gimbal-lock branch takes over.
_LOCK_EPS = 1e-10


def identity(shape=()) -> np.ndarray:
    q = np.zeros(shape + (4,))
    q[..., 0] = 1.0
    return q


def normalize(q, eps: float = 0.0) -> np.ndarray:
    """Scale quaternions to unit norm. Norms <= eps raise ValueError."""
    q = np.asarray(q, dtype=np.float64)
    norms = np.linalg.norm(q, axis=-1, keepdims=True)
    if np.any(norms <= eps) or np.any(~np.isfinite(norms)):
        raise ValueError(f"degenerate quaternion: norm <= {eps}")
    return q / norms


def multiply(a, b) -> np.ndarray:
    """Hamilton product a * b (apply b first, then a, for world-frame composition)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def conjugate(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def rotate(q, v) -> np.ndarray:
    """Rotate vectors v (..., 3) by quaternions q (..., 4)."""
    q = np.asarray(q, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    qvec = q[..., 1:]
    w = q[..., :1]
    t = 2.0 * np.cross(qvec, v)
    return v + w * t + np.cross(qvec, t)


def rotation_angle_rad(q) -> np.ndarray:
    """Rotation angle of q in radians, in [0, pi], sign-agnostic."""
    q = np.asarray(q, dtype=np.float64)
    vec = np.linalg.norm(q[..., 1:], axis=-1)
    return 2.0 * np.arctan2(vec, np.abs(q[..., 0]))


def angle_between_rad(a, b) -> np.ndarray:
    """Relative rotation angle between unit quaternions, ignoring sign."""
    return rotation_angle_rad(multiply(conjugate(a), b))


def from_axis_angle_deg(axis: int, angles_deg) -> np.ndarray:
    """Quaternion for a rotation of angles_deg about a coordinate axis (0=x, 1=y, 2=z)."""
    half = np.deg2rad(np.asarray(angles_deg, dtype=np.float64)) / 2.0
    q = np.zeros(half.shape + (4,))
    q[..., 0] = np.cos(half)
    q[..., 1 + axis] = np.sin(half)
    return q


def from_euler_deg(angles_deg, order: str) -> np.ndarray:
    """Compose intrinsic rotations about order's axes, applied in declaration order.

    angles_deg has shape (..., 3): angles_deg[..., k] rotates about axis
    order[k]. Intrinsic composition means q = q0 * q1 * q2.
    """
    _check_order(order)
    angles_deg = np.asarray(angles_deg, dtype=np.float64)
    q = from_axis_angle_deg(_AXIS_INDEX[order[0]], angles_deg[..., 0])
    q = multiply(q, from_axis_angle_deg(_AXIS_INDEX[order[1]], angles_deg[..., 1]))
    q = multiply(q, from_axis_angle_deg(_AXIS_INDEX[order[2]], angles_deg[..., 2]))
    return q


def to_matrix(q) -> np.ndarray:
    """Rotation matrices (..., 3, 3) for unit quaternions."""
    q = np.asarray(q, dtype=np.float64)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    m = np.empty(q.shape[:-1] + (3, 3))
    m[..., 0, 0] = 1 - 2 * (y * y + z * z)
    m[..., 0, 1] = 2 * (x * y - z * w)
    m[..., 0, 2] = 2 * (x * z + y * w)
    m[..., 1, 0] = 2 * (x * y + z * w)
    m[..., 1, 1] = 1 - 2 * (x * x + z * z)
    m[..., 1, 2] = 2 * (y * z - x * w)
    m[..., 2, 0] = 2 * (x * z - y * w)
    m[..., 2, 1] = 2 * (y * z + x * w)
    m[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return m


def to_euler_deg(q, order: str) -> np.ndarray:
    """Decompose unit quaternions into intrinsic Euler angles (degrees).

    Returns angles of shape (..., 3) in the decomposition order: recomposing
    with from_euler_deg(angles, order) recovers q up to sign. The middle
    angle is clamped to its principal range [-90, 90]. At gimbal lock the
    third angle is 0 and all remaining rotation goes to the first axis.
    """
    _check_order(order)
    i = _AXIS_INDEX[order[0]]
    j = _AXIS_INDEX[order[1]]
    k = _AXIS_INDEX[order[2]]
    sign = 1.0 if order in _CYCLIC else -1.0

    m = to_matrix(np.asarray(q, dtype=np.float64))
    sin_beta = np.clip(sign * m[..., i, k], -1.0, 1.0)
    beta = np.arcsin(sin_beta)

    locked = np.abs(sin_beta) >= 1.0 - _LOCK_EPS
    # Regular branch.
    alpha = np.arctan2(-sign * m[..., j, k], m[..., k, k])
    gamma = np.arctan2(-sign * m[..., i, j], m[..., i, i])
    # Lock branch: with the third angle forced to 0, the first angle absorbs
    # the remaining rotation; its sign flips with sin(beta).
    combined = np.arctan2(m[..., j, i], m[..., j, j])
    alpha = np.where(locked, np.sign(sin_beta) * combined, alpha)
    gamma = np.where(locked, 0.0, gamma)

    return np.degrees(np.stack([alpha, beta, gamma], axis=-1))


def slerp(q0, q1, t) -> np.ndarray:
    """Shortest-arc spherical interpolation between unit quaternions.

    t broadcasts against the stacked quaternion shape; t=0 gives q0, t=1
    gives q1 (up to sign).
    """
    q0 = np.asarray(q0, dtype=np.float64)
    q1 = np.array(q1, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)[..., None]

    dot = np.sum(q0 * q1, axis=-1, keepdims=True)
    q1 = np.where(dot < 0.0, -q1, q1)
    dot = np.abs(dot)

    theta = np.arccos(np.clip(dot, -1.0, 1.0))
    sin_theta = np.sin(theta)
    # Fall back to lerp when the arc is too small for a stable sin ratio.
    small = sin_theta < 1e-9
    w0 = np.where(small, 1.0 - t, np.sin((1.0 - t) * theta) / np.where(small, 1.0, sin_theta))
    w1 = np.where(small, t, np.sin(t * theta) / np.where(small, 1.0, sin_theta))
    out = w0 * q0 + w1 * q1
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def _check_order(order: str) -> None:
    if order not in ROTATION_ORDERS:
        raise ValueError(f"invalid rotation order {order!r}; expected one of {ROTATION_ORDERS}")
