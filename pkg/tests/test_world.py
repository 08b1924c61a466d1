"""Grid world: kinematics, floorplan generation, detector, serialization."""

import numpy as np
import pytest

from gridnav.config import WorldConfig
from gridnav.objects import CLASSES, Role, RoomType, class_by_name, room_targets
from gridnav.world.agent import HEADINGS, Action, AgentPose, heading_dir, spawn, step
from gridnav.world.detector import detect, is_visible, visibility_table
from gridnav.world.floorplan import (
    Floorplan,
    ObjectInstance,
    generate_floorplan,
    load_floorplan,
    save_floorplan,
)


def open_floor(h=8, w=8, objects=None, room=RoomType.Kitchen):
    """Empty room with optional objects, for hand-built scenarios."""
    return Floorplan(
        "test", room, np.zeros((h, w), dtype=bool), 0.25, objects or [], "train"
    )


# ----------------------------------------------------------------- kinematics


def test_pose_validation():
    with pytest.raises(ValueError):
        AgentPose((0, 0), heading=30)
    with pytest.raises(ValueError):
        AgentPose((0, 0), pitch=15)
    AgentPose((0, 0), heading=315, pitch=-30)  # fine


def test_rotate_full_circle():
    fp = open_floor()
    pose = AgentPose((2, 2), heading=0)
    for _ in range(8):
        pose = step(fp, pose, Action.RotateLeft)
    assert pose.heading == 0
    for _ in range(3):
        pose = step(fp, pose, Action.RotateRight)
    assert pose.heading == 225


def test_move_follows_heading():
    fp = open_floor()
    for heading in HEADINGS:
        pose = AgentPose((4, 4), heading=heading)
        di, dj = heading_dir(heading)
        moved = step(fp, pose, Action.MoveAhead)
        assert moved.cell == (4 + di, 4 + dj)


def test_blocked_move_is_noop():
    grid = np.zeros((4, 4), dtype=bool)
    grid[1, 2] = True
    fp = Floorplan("t", RoomType.Kitchen, grid, 0.25, [], "train")
    pose = AgentPose((1, 1), heading=0)  # facing +j into the wall
    assert step(fp, pose, Action.MoveAhead) == pose
    # out of bounds is blocked too
    edge = AgentPose((0, 0), heading=180)
    assert step(fp, edge, Action.MoveAhead) == edge


def test_pitch_clamps():
    fp = open_floor()
    pose = AgentPose((1, 1), pitch=0)
    up = step(fp, step(fp, pose, Action.LookUp), Action.LookUp)
    assert up.pitch == 30
    down = step(fp, step(fp, pose, Action.LookDown), Action.LookDown)
    assert down.pitch == -30


def test_done_keeps_pose():
    fp = open_floor()
    pose = AgentPose((3, 3), heading=90, pitch=30)
    assert step(fp, pose, Action.Done) == pose


def test_spawn_deterministic_and_reachable():
    fp = generate_floorplan(11, RoomType.Bedroom, WorldConfig())
    a = spawn(fp, 7)
    b = spawn(fp, 7)
    assert a == b
    assert a.pitch == 0
    assert tuple(a.cell) in set(map(tuple, fp.reachable_cells))
    seen = {spawn(fp, s).cell for s in range(50)}
    assert len(seen) > 1  # not stuck on one cell


# ------------------------------------------------------------------ floorplan


def test_generation_deterministic():
    cfg = WorldConfig()
    a = generate_floorplan(5, RoomType.Kitchen, cfg)
    b = generate_floorplan(5, RoomType.Kitchen, cfg)
    assert [o.position for o in a.objects] == [o.position for o in b.objects]
    assert np.array_equal(a.grid, b.grid)
    c = generate_floorplan(6, RoomType.Kitchen, cfg)
    assert [o.position for o in a.objects] != [o.position for o in c.objects]


def test_generation_contents():
    cfg = WorldConfig()
    for room in RoomType:
        fp = generate_floorplan(3, room, cfg)
        roles = [CLASSES[o.class_id].role for o in fp.objects]
        n_targets = sum(r is Role.target for r in roles)
        assert n_targets >= 3
        # every class present belongs to the room
        for o in fp.objects:
            assert room in CLASSES[o.class_id].room_types
        # parents block cells, agent still has somewhere to stand
        assert fp.grid.any()
        assert len(fp.reachable_cells) > 0


def test_targets_near_reachable_space():
    cfg = WorldConfig()
    fp = generate_floorplan(9, RoomType.Bathroom, cfg)
    reach = np.array([fp.cell_center(i, j) for i, j in fp.reachable_cells])
    for o in fp.objects:
        if CLASSES[o.class_id].role is Role.target:
            d = np.hypot(reach[:, 0] - o.position[0], reach[:, 1] - o.position[1])
            assert d.min() <= cfg.visibility_distance


def test_beta_zero_vs_one_changes_placement():
    near = WorldConfig()
    near.beta = 1.0
    far = WorldConfig()
    far.beta = 0.0

    def min_parent_dist(fp):
        out = []
        parents = [o for o in fp.objects if CLASSES[o.class_id].role is Role.parent]
        for o in fp.objects:
            if CLASSES[o.class_id].role is Role.target:
                out.append(
                    min(
                        np.hypot(
                            o.position[0] - p.position[0], o.position[1] - p.position[1]
                        )
                        for p in parents
                    )
                )
        return out

    d_near = [d for s in range(25) for d in min_parent_dist(generate_floorplan(s, RoomType.Kitchen, near))]
    d_far = [d for s in range(25) for d in min_parent_dist(generate_floorplan(s, RoomType.Kitchen, far))]
    assert np.mean(d_near) < np.mean(d_far)


def test_floorplan_roundtrip(tmp_path):
    fp = generate_floorplan(13, RoomType.LivingRoom, WorldConfig(), split="test")
    path = tmp_path / "room.floorplan"
    save_floorplan(fp, path)
    back = load_floorplan(path)
    assert back.id == fp.id
    assert back.room_type is fp.room_type
    assert back.split == "test"
    assert np.array_equal(back.grid, fp.grid)
    assert [(o.class_id, o.position, o.footprint) for o in back.objects] == [
        (o.class_id, o.position, o.footprint) for o in fp.objects
    ]


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.floorplan"
    path.write_text("not a floorplan\n")
    with pytest.raises(ValueError):
        load_floorplan(path)


# ------------------------------------------------------------------- detector


def _inst(name, x, y, fw=0.3, fd=0.3):
    return ObjectInstance(class_by_name(name).id, (x, y), (fw, fd))


def test_detect_range_and_fov():
    cfg = WorldConfig()
    mug = class_by_name("Mug").id
    # agent at cell (0,0) center (0.125, 0.125), heading 0 = +x
    pose = AgentPose((0, 0), heading=0)
    ahead = open_floor(20, 24, [_inst("Mug", 1.125, 0.125)])
    assert [d.class_id for d in detect(ahead, pose, cfg)] == [mug]
    behind = open_floor(8, 8, [_inst("Mug", -0.875 + 1.0, 0.125)])  # same cell col
    # directly behind: place at x < agent x
    behind = open_floor(8, 8, [_inst("Mug", 0.0, 0.125)])
    dets = detect(behind, AgentPose((0, 2), heading=0), cfg)
    assert all(d.class_id != mug or d.x_c in (0.0, 1.0) for d in dets)
    # out of range
    far = open_floor(24, 24, [_inst("Mug", 5.625, 0.125)])
    assert detect(far, pose, cfg) == []
    # outside the 90 degree cone: 60 degrees off axis
    off = open_floor(24, 24, [_inst("Mug", 0.125 + np.cos(np.radians(60)), 0.125 + np.sin(np.radians(60)))])
    assert detect(off, pose, cfg) == []
    # inside the cone at 30 degrees
    on = open_floor(24, 24, [_inst("Mug", 0.125 + np.cos(np.radians(30)), 0.125 + np.sin(np.radians(30)))])
    assert [d.class_id for d in detect(on, pose, cfg)] == [mug]


def test_detect_nearest_instance_wins():
    cfg = WorldConfig()
    fp = open_floor(20, 24, [_inst("Mug", 2.125, 0.125), _inst("Mug", 1.125, 0.125)])
    dets = detect(fp, AgentPose((0, 0), heading=0), cfg)
    assert len(dets) == 1
    assert dets[0].distance == pytest.approx(1.0)


def test_detect_pitch_band_gating():
    cfg = WorldConfig()
    # Painting is a high object; Sofa is low
    fp = open_floor(
        20,
        24,
        [_inst("Painting", 1.125, 0.125)],
        room=RoomType.LivingRoom,
    )
    up = AgentPose((0, 0), heading=0, pitch=30)
    level = AgentPose((0, 0), heading=0, pitch=0)
    down = AgentPose((0, 0), heading=0, pitch=-30)
    assert detect(fp, up, cfg)
    assert detect(fp, level, cfg)
    assert detect(fp, down, cfg) == []
    low = open_floor(20, 24, [_inst("Sofa", 1.125, 0.125)], room=RoomType.LivingRoom)
    assert detect(low, down, cfg)
    assert detect(low, up, cfg) == []


def test_detect_fields_in_range():
    cfg = WorldConfig()
    fp = generate_floorplan(2, RoomType.Kitchen, cfg)
    for seed in range(10):
        pose = spawn(fp, seed)
        for d in detect(fp, pose, cfg):
            assert 0.0 <= d.x_c <= 1.0
            assert 0.0 <= d.y_c <= 1.0
            assert 0.0 <= d.bbox_area <= 1.0
            assert d.distance <= cfg.detector_range


def test_bbox_shrinks_with_distance():
    cfg = WorldConfig()
    pose = AgentPose((0, 0), heading=0)
    near = detect(open_floor(20, 24, [_inst("Mug", 1.125, 0.125)]), pose, cfg)[0]
    far = detect(open_floor(20, 24, [_inst("Mug", 3.125, 0.125)]), pose, cfg)[0]
    assert near.bbox_area > far.bbox_area


def test_is_visible_needs_proximity():
    cfg = WorldConfig()
    mug = class_by_name("Mug").id
    pose = AgentPose((0, 0), heading=0)
    close = detect(open_floor(20, 24, [_inst("Mug", 1.125, 0.125)]), pose, cfg)
    assert is_visible(close, mug, cfg.visibility_distance)
    away = detect(open_floor(20, 24, [_inst("Mug", 3.125, 0.125)]), pose, cfg)
    assert not is_visible(away, mug, cfg.visibility_distance)
    assert not is_visible(close, class_by_name("Bread").id, cfg.visibility_distance)


def test_visibility_table_matches_detect():
    cfg = WorldConfig()
    fp = generate_floorplan(4, RoomType.Bedroom, cfg)
    targets = [c.id for c in room_targets(RoomType.Bedroom) if c.id in fp.present_classes()]
    cid = targets[0]
    table = visibility_table(fp, cid, cfg)
    rng = np.random.default_rng(0)
    for _ in range(200):
        i = int(rng.integers(fp.height))
        j = int(rng.integers(fp.width))
        hi = int(rng.integers(8))
        pi = int(rng.integers(3))
        pose = AgentPose((i, j), heading=HEADINGS[hi], pitch=(-30, 0, 30)[pi])
        expect = is_visible(detect(fp, pose, cfg), cid, cfg.visibility_distance)
        assert table[i, j, hi, pi] == expect
