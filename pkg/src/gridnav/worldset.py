"""Train/test floorplan sets and episode draws shared by trainer and eval."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import WorldConfig
from .objects import RoomType, room_targets
from .world.floorplan import Floorplan, generate_floorplan, load_floorplan, save_floorplan


@dataclass
class WorldSet:
    train: dict[RoomType, list[Floorplan]]
    test: dict[RoomType, list[Floorplan]]

    def all_train(self) -> list[Floorplan]:
        return [fp for plans in self.train.values() for fp in plans]


def build_world_set(seed: int, config: WorldConfig | None = None) -> WorldSet:
    """Generate per-room train/test splits; deterministic in (seed, config)."""
    config = config or WorldConfig()
    train: dict[RoomType, list[Floorplan]] = {}
    test: dict[RoomType, list[Floorplan]] = {}
    for room in RoomType:
        train[room] = [
            generate_floorplan(
                seed * 100_000 + k,
                room,
                config,
                split="train",
                plan_id=f"{room.value}_train_{k:02d}",
            )
            for k in range(config.train_per_room)
        ]
        test[room] = [
            generate_floorplan(
                seed * 100_000 + 50_000 + k,
                room,
                config,
                split="test",
                plan_id=f"{room.value}_test_{k:02d}",
            )
            for k in range(config.test_per_room)
        ]
    return WorldSet(train, test)


def draw_episode(
    plans: list[Floorplan], rng: np.random.Generator
) -> tuple[Floorplan, int, int]:
    """(floorplan, target class id, spawn seed) drawn from one seeded stream."""
    fp = plans[int(rng.integers(len(plans)))]
    present = fp.present_classes()
    targets = [c.id for c in room_targets(fp.room_type) if c.id in present]
    target = targets[int(rng.integers(len(targets)))]
    spawn_seed = int(rng.integers(2**62))
    return fp, target, spawn_seed


def save_world_set(ws: WorldSet, out_dir) -> None:
    import os

    os.makedirs(out_dir, exist_ok=True)
    for plans in (ws.train, ws.test):
        for room, fps in plans.items():
            for fp in fps:
                save_floorplan(fp, os.path.join(out_dir, f"{fp.id}.floorplan"))


def load_world_set(in_dir) -> WorldSet:
    import os

    train: dict[RoomType, list[Floorplan]] = {r: [] for r in RoomType}
    test: dict[RoomType, list[Floorplan]] = {r: [] for r in RoomType}
    for name in sorted(os.listdir(in_dir)):
        if not name.endswith(".floorplan"):
            continue
        fp = load_floorplan(os.path.join(in_dir, name))
        (train if fp.split == "train" else test)[fp.room_type].append(fp)
    return WorldSet(train, test)
