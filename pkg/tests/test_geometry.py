import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastron.geometry import (
    Box,
    KinematicChain,
    Workspace,
    from_input_space,
    kcd_label,
    make_label_fn,
    to_input_space,
    two_dof_rod,
    four_dof_rod,
)

from reference import segment_box_distance


# ----------------------------------------------------------------------
# joint <-> input mapping


def test_mapping_corners_and_center():
    chain = two_dof_rod()
    np.testing.assert_allclose(to_input_space(chain.q_lower, chain), -1.0)
    np.testing.assert_allclose(to_input_space(chain.q_upper, chain), 1.0)
    mid = (chain.q_lower + chain.q_upper) / 2.0
    np.testing.assert_allclose(to_input_space(mid, chain), 0.0)


def test_mapping_out_of_limits_rejected():
    chain = two_dof_rod()
    with pytest.raises(ValueError):
        to_input_space([0.0, -0.5], chain)  # pitch below 0
    with pytest.raises(ValueError):
        from_input_space([0.0, 1.5], chain)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0), min_size=2, max_size=2))
def test_mapping_round_trip(p):
    chain = two_dof_rod()
    p = np.array(p)
    q = from_input_space(p, chain)
    np.testing.assert_allclose(to_input_space(q, chain), p, atol=1e-12)


def test_mapping_round_trip_4dof():
    chain = four_dof_rod()
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = rng.uniform(-1, 1, 4)
        np.testing.assert_allclose(to_input_space(from_input_space(p, chain), chain), p,
                                   atol=1e-12)


# ----------------------------------------------------------------------
# forward kinematics


def test_fk_reference_pose_along_x():
    chain = two_dof_rod(length=1.0)
    link = chain.forward_kinematics([0.0, 0.0])[0]
    assert link.p0 == (0.0, 0.0, 0.0)
    np.testing.assert_allclose(link.p1, (1.0, 0.0, 0.0), atol=1e-15)


def test_fk_yaw_quarter_turn():
    chain = two_dof_rod(length=1.0)
    link = chain.forward_kinematics([math.pi / 2, 0.0])[0]
    np.testing.assert_allclose(link.p1, (0.0, 1.0, 0.0), atol=1e-12)


def test_fk_pitch_vertical():
    chain = two_dof_rod(length=1.0)
    link = chain.forward_kinematics([0.0, math.pi / 2])[0]
    np.testing.assert_allclose(link.p1, (0.0, 0.0, 1.0), atol=1e-12)


def test_fk_matches_spherical_direction_formula():
    chain = two_dof_rod(length=1.0)
    rng = np.random.default_rng(1)
    for _ in range(200):
        yaw = rng.uniform(-math.pi, math.pi)
        pitch = rng.uniform(0.0, math.pi)
        tip = np.array(chain.forward_kinematics([yaw, pitch])[0].p1)
        expected = np.array([
            math.cos(pitch) * math.cos(yaw),
            math.cos(pitch) * math.sin(yaw),
            math.sin(pitch),
        ])
        np.testing.assert_allclose(tip, expected, atol=1e-12)


def test_fk_4dof_zeroed_distal_extends_straight():
    chain4 = four_dof_rod(lengths=(0.5, 0.5))
    chain2 = two_dof_rod(length=0.5, radius=chain4.rods[0][1])
    rng = np.random.default_rng(2)
    for _ in range(100):
        yaw = rng.uniform(-math.pi, math.pi)
        pitch = rng.uniform(0.0, math.pi)
        b1, b2 = chain4.forward_kinematics([yaw, pitch, 0.0, 0.0])
        ref = chain2.forward_kinematics([yaw, pitch])[0]
        np.testing.assert_allclose(b1.p1, ref.p1, atol=1e-12)
        # distal rod continues along the same direction
        d1 = np.array(b1.p1) - np.array(b1.p0)
        d2 = np.array(b2.p1) - np.array(b2.p0)
        np.testing.assert_allclose(d1, d2, atol=1e-12)


def test_fk_out_of_limits_rejected():
    chain = two_dof_rod()
    with pytest.raises(ValueError):
        chain.forward_kinematics([0.0, -0.1])
    with pytest.raises(ValueError):
        chain.forward_kinematics([4.0, 0.1])


def test_fk_lipschitz_continuity():
    # ||tip(q + d) - tip(q)|| <= L ||d|| for total length L
    chain = four_dof_rod(lengths=(0.5, 0.5))
    rng = np.random.default_rng(3)
    eps = 1e-3
    for _ in range(200):
        q = np.array([
            rng.uniform(-math.pi + eps, math.pi - eps),
            rng.uniform(eps, math.pi - eps),
            rng.uniform(-math.pi + eps, math.pi - eps),
            rng.uniform(eps, math.pi - eps),
        ])
        d = rng.normal(0, 1, 4)
        d *= 1e-3 / np.linalg.norm(d)
        tip0 = np.array(chain.forward_kinematics(q)[-1].p1)
        tip1 = np.array(chain.forward_kinematics(q + d)[-1].p1)
        assert np.linalg.norm(tip1 - tip0) <= chain.reach * np.linalg.norm(d) * (1 + 1e-6)


def test_box_link_mode():
    chain = two_dof_rod(length=1.0, link_shape="box")
    link = chain.forward_kinematics([0.0, math.pi / 2])[0]
    assert isinstance(link, Box)
    np.testing.assert_allclose(link.center, (0.0, 0.0, 0.5), atol=1e-12)


def test_chain_validation():
    with pytest.raises(ValueError):
        KinematicChain([])
    with pytest.raises(ValueError):
        KinematicChain([(1.0, 0.0)])
    with pytest.raises(ValueError):
        KinematicChain([(1.0, 0.1)], link_shape="mesh")


# ----------------------------------------------------------------------
# labeling


def test_label_empty_workspace_all_free():
    chain = two_dof_rod()
    ws = Workspace([])
    rng = np.random.default_rng(4)
    for _ in range(50):
        q = from_input_space(rng.uniform(-1, 1, 2), chain)
        assert kcd_label(chain, ws, q) == -1


def test_label_engulfing_obstacle_all_collision():
    chain = two_dof_rod()
    ws = Workspace([Box((0, 0, 0), (2.0, 2.0, 2.0))])
    rng = np.random.default_rng(5)
    for _ in range(50):
        q = from_input_space(rng.uniform(-1, 1, 2), chain)
        assert kcd_label(chain, ws, q) == 1


def test_label_grid_matches_dense_sampling_oracle():
    # one cube, 100x100 configuration grid vs a densely sampled
    # segment-to-box distance check; marginal cells excluded
    chain = two_dof_rod(length=1.0, radius=0.05)
    cube = Box((0.45, 0.1, 0.3), (0.12, 0.12, 0.12))
    ws = Workspace([cube])
    agree = 0
    considered = 0
    for py in np.linspace(-0.999, 0.999, 100):
        for px in np.linspace(-0.999, 0.999, 100):
            q = from_input_space(np.array([px, py]), chain)
            link = chain.forward_kinematics(q)[0]
            dist = segment_box_distance(link.p0, link.p1, cube.center, cube.half, cube.rot)
            if abs(dist - 0.05) < 0.01:
                continue  # marginal contact
            considered += 1
            truth = dist <= 0.05
            if (kcd_label(chain, ws, q) == 1) == truth:
                agree += 1
    assert considered > 5000
    assert agree / considered >= 0.995


def test_label_fn_matches_kcd_label():
    chain = two_dof_rod()
    ws = Workspace([Box((0.5, 0.0, 0.2), (0.15, 0.15, 0.15))])
    label = make_label_fn(chain, ws)
    rng = np.random.default_rng(6)
    for _ in range(300):
        p = rng.uniform(-1, 1, 2)
        q = from_input_space(p, chain)
        assert label(p) == kcd_label(chain, ws, q)


def test_in_collision_set_nonempty_iff_obstacle_reachable():
    chain = two_dof_rod(length=1.0, radius=0.05)
    rng = np.random.default_rng(7)
    grid = [np.array([px, py]) for px in np.linspace(-1, 1, 40)
            for py in np.linspace(-1, 1, 40)]
    for _ in range(10):
        center = rng.uniform(-1.5, 1.5, 3)
        side = rng.uniform(0.1, 0.3)
        cube = Box(center, (side / 2,) * 3)
        ws = Workspace([cube])
        label = make_label_fn(chain, ws)
        any_hit = any(label(p) == 1 for p in grid)
        # swept volume of the arm is the ball of radius reach (upper half
        # dominates); a cube beyond reach + radius can never collide
        closest = max(np.linalg.norm(center) - np.linalg.norm(cube.half), 0.0)
        if closest > chain.reach + 0.05:
            assert not any_hit
        if any_hit:
            assert closest <= chain.reach + 0.05 + 1e-9


# ----------------------------------------------------------------------
# workspace motion


def test_workspace_step_translates_and_bounces():
    box = Box((0.85, 0.0, 0.5), (0.1, 0.1, 0.1))
    ws = Workspace([box], velocities=[(0.1, 0.0, 0.0)], bounds=((-0.9, -0.9, 0.0), (0.9, 0.9, 0.9)))
    ws1 = ws.stepped()
    c1 = ws1.obstacles[0].center
    assert c1[0] == pytest.approx(0.85)  # bounced off 0.9: 0.95 -> 0.85
    assert ws1.velocities[0][0] == pytest.approx(-0.1)
    ws2 = ws1.stepped()
    assert ws2.obstacles[0].center[0] == pytest.approx(0.75)


def test_workspace_without_motion_is_static():
    ws = Workspace([Box((0, 0, 0.2), (0.1, 0.1, 0.1))])
    assert ws.stepped() is ws
