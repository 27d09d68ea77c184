import numpy as np
import pytest

from motionrisk import quat
from motionrisk.types import ROTATION_ORDERS

from helpers import random_unit_quats


def test_identity_is_no_rotation():
    v = np.array([1.0, 2.0, 3.0])
    assert np.allclose(quat.rotate(quat.identity(), v), v)


def test_multiply_composes_rotations():
    qz = quat.from_axis_angle_deg(2, 90.0)
    qx = quat.from_axis_angle_deg(0, 90.0)
    v = np.array([1.0, 0.0, 0.0])
    # apply qz first, then qx
    composed = quat.multiply(qx, qz)
    step = quat.rotate(qx, quat.rotate(qz, v))
    assert np.allclose(quat.rotate(composed, v), step, atol=1e-12)


def test_normalize_rejects_degenerate():
    with pytest.raises(ValueError):
        quat.normalize([1e-5, 0.0, 0.0, 0.0], eps=1e-3)


@pytest.mark.parametrize("order", ROTATION_ORDERS)
def test_euler_round_trip_random(order):
    rng = np.random.default_rng(42)
    q = random_unit_quats(rng, 2000)
    angles = quat.to_euler_deg(q, order)
    err = quat.angle_between_rad(q, quat.from_euler_deg(angles, order))
    assert float(err.max()) < 1e-6


@pytest.mark.parametrize("order", ROTATION_ORDERS)
def test_euler_middle_angle_principal_range(order):
    rng = np.random.default_rng(7)
    angles = quat.to_euler_deg(random_unit_quats(rng, 500), order)
    assert np.all(angles[:, 1] >= -90.0 - 1e-9)
    assert np.all(angles[:, 1] <= 90.0 + 1e-9)


def test_euler_identity_all_orders():
    for order in ROTATION_ORDERS:
        assert np.allclose(quat.to_euler_deg(quat.identity(), order), 0.0)


def test_euler_single_axis_90deg():
    q = np.array([np.sqrt(2) / 2, np.sqrt(2) / 2, 0.0, 0.0])
    assert np.allclose(quat.to_euler_deg(q, "XYZ"), [90.0, 0.0, 0.0], atol=1e-9)


@pytest.mark.parametrize("order", ROTATION_ORDERS)
@pytest.mark.parametrize("middle", [90.0, -90.0])
def test_gimbal_lock_third_angle_zero(order, middle):
    q = quat.from_euler_deg([35.0, middle, 25.0], order)
    angles = quat.to_euler_deg(q, order)
    assert angles[2] == 0.0
    err = quat.angle_between_rad(q, quat.from_euler_deg(angles, order))
    assert float(err) < 1e-4


@pytest.mark.parametrize("order", ROTATION_ORDERS)
def test_euler_near_gimbal_lock(order):
    rng = np.random.default_rng(11)
    n = 1000
    offsets_deg = np.degrees(rng.uniform(-1e-3, 1e-3, size=n))
    middle = np.where(rng.random(n) < 0.5, 90.0, -90.0) + offsets_deg
    angles_in = np.stack(
        [rng.uniform(-180, 180, size=n), middle, rng.uniform(-180, 180, size=n)], axis=-1
    )
    q = quat.from_euler_deg(angles_in, order)
    angles = quat.to_euler_deg(q, order)
    err = quat.angle_between_rad(q, quat.from_euler_deg(angles, order))
    assert float(err.max()) < 1e-4


def test_slerp_endpoints_and_midpoint():
    q0 = quat.identity()
    q1 = quat.from_axis_angle_deg(1, 80.0)
    assert np.allclose(quat.slerp(q0, q1, 0.0), q0, atol=1e-12)
    assert np.allclose(quat.slerp(q0, q1, 1.0), q1, atol=1e-12)
    mid = quat.slerp(q0, q1, 0.5)
    assert np.allclose(quat.to_euler_deg(mid, "YXZ"), [40.0, 0.0, 0.0], atol=1e-9)


def test_slerp_takes_shortest_arc():
    q0 = quat.from_axis_angle_deg(2, 10.0)
    q1 = -quat.from_axis_angle_deg(2, 30.0)  # sign-flipped, same rotation family
    mid = quat.slerp(q0, q1, 0.5)
    assert float(quat.angle_between_rad(mid, quat.from_axis_angle_deg(2, 20.0))) < 1e-9


def test_rotation_angle_accuracy_for_tiny_rotations():
    tiny = quat.from_axis_angle_deg(0, 1e-7)
    angle = float(quat.rotation_angle_rad(tiny))
    assert angle == pytest.approx(np.deg2rad(1e-7), rel=1e-6)
