"""Procedural floorplans: object placement, occupancy, and serialization.

A floorplan is a small indoor room on a coarse occupancy grid.  Parent
objects (fridge, bed, counter, ...) occupy cells; targets and background
clutter sit anywhere in continuous coordinates and do not block movement.
Generation is a pure function of (seed, room_type, config): targets are
co-placed near their most likely parent with probability ``beta``, which is
what later makes the parent-conditioned reward matrix informative.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..config import WorldConfig
from ..objects import (
    CLASSES,
    HeightBand,
    ObjectClass,
    Role,
    RoomType,
    class_by_name,
    room_background,
    room_parents,
    room_targets,
)


class PlacementError(RuntimeError):
    pass


# nominal footprint ranges (meters) per role
_FOOTPRINT = {
    Role.parent: (0.5, 1.0),
    Role.target: (0.15, 0.35),
    Role.background: (0.3, 0.6),
}

_BAND_IDX = {HeightBand.low: 0, HeightBand.mid: 1, HeightBand.high: 2}


@dataclass(frozen=True)
class ObjectInstance:
    class_id: int
    position: tuple[float, float]   # (x, y) meters; x along j, y along i
    footprint: tuple[float, float]  # (w, d) meters

    def __post_init__(self):
        if self.footprint[0] <= 0 or self.footprint[1] <= 0:
            raise ValueError("footprint must be positive")


@dataclass
class Floorplan:
    id: str
    room_type: RoomType
    grid: np.ndarray            # bool (H, W); True = occupied
    cell_size: float
    objects: list[ObjectInstance]
    split: str = "train"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    def is_free(self, i: int, j: int) -> bool:
        return 0 <= i < self.height and 0 <= j < self.width and not self.grid[i, j]

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return ((j + 0.5) * self.cell_size, (i + 0.5) * self.cell_size)

    @property
    def reachable_mask(self) -> np.ndarray:
        """Largest 8-connected free component; the agent lives here."""
        if "reachable" not in self._cache:
            self._cache["reachable"] = _largest_free_component(self.grid)
        return self._cache["reachable"]

    @property
    def reachable_cells(self) -> list[tuple[int, int]]:
        if "cells" not in self._cache:
            ii, jj = np.nonzero(self.reachable_mask)
            self._cache["cells"] = list(zip(ii.tolist(), jj.tolist()))
        return self._cache["cells"]

    @property
    def object_arrays(self):
        """(class_ids, positions (n,2), areas, band_idx) as numpy arrays."""
        if "arrays" not in self._cache:
            cids = np.array([o.class_id for o in self.objects], dtype=np.int64)
            pos = np.array([o.position for o in self.objects], dtype=np.float64)
            area = np.array(
                [o.footprint[0] * o.footprint[1] for o in self.objects],
                dtype=np.float64,
            )
            band = np.array(
                [_BAND_IDX[CLASSES[o.class_id].height_band] for o in self.objects],
                dtype=np.int64,
            )
            self._cache["arrays"] = (cids, pos.reshape(-1, 2), area, band)
        return self._cache["arrays"]

    def instances_of(self, class_id: int) -> list[ObjectInstance]:
        return [o for o in self.objects if o.class_id == class_id]

    def present_classes(self) -> set[int]:
        return {o.class_id for o in self.objects}


def _largest_free_component(grid: np.ndarray) -> np.ndarray:
    h, w = grid.shape
    seen = np.zeros_like(grid, dtype=bool)
    best: list[tuple[int, int]] = []
    for si in range(h):
        for sj in range(w):
            if grid[si, sj] or seen[si, sj]:
                continue
            comp = []
            q = deque([(si, sj)])
            seen[si, sj] = True
            while q:
                i, j = q.popleft()
                comp.append((i, j))
                for di in (-1, 0, 1):
                    for dj in (-1, 0, 1):
                        ni, nj = i + di, j + dj
                        if (
                            0 <= ni < h
                            and 0 <= nj < w
                            and not grid[ni, nj]
                            and not seen[ni, nj]
                        ):
                            seen[ni, nj] = True
                            q.append((ni, nj))
            if len(comp) > len(best):
                best = comp
    mask = np.zeros_like(grid, dtype=bool)
    for i, j in best:
        mask[i, j] = True
    return mask


def _covered_cells(x, y, w, d, cell_size, h, wd):
    """Grid cells whose center falls inside the instance rectangle."""
    cells = []
    j0 = int(np.floor((x - w / 2) / cell_size - 0.5))
    j1 = int(np.ceil((x + w / 2) / cell_size))
    i0 = int(np.floor((y - d / 2) / cell_size - 0.5))
    i1 = int(np.ceil((y + d / 2) / cell_size))
    for i in range(max(i0, 0), min(i1 + 1, h)):
        for j in range(max(j0, 0), min(j1 + 1, wd)):
            cx, cy = (j + 0.5) * cell_size, (i + 0.5) * cell_size
            if abs(cx - x) <= w / 2 and abs(cy - y) <= d / 2:
                cells.append((i, j))
    return cells


def _paper_argmax_parent(room: RoomType, target_name: str) -> str | None:
    from ..knowledge import load_paper_matrix

    m = load_paper_matrix(room)
    if target_name not in m.rows:
        return None
    row = m.rows[target_name]
    best = min(row, key=lambda p: (-row[p], class_by_name(p).id))
    return best if row[best] > 0 else None


def generate_floorplan(
    seed: int,
    room_type: RoomType,
    config: WorldConfig | None = None,
    split: str = "train",
    plan_id: str | None = None,
) -> Floorplan:
    """Generate one floorplan; deterministic in (seed, room_type, config)."""
    config = config or WorldConfig()
    rng = np.random.default_rng(
        np.random.PCG64(seed * 4 + list(RoomType).index(room_type))
    )
    last_err = None
    for _ in range(20):
        try:
            fp = _generate_once(rng, room_type, config, split)
            fp.id = plan_id or f"{room_type.value}_{split}_{seed}"
            return fp
        except PlacementError as e:
            last_err = e
    raise PlacementError(f"unplaceable after retries: {last_err}")


def _generate_once(rng, room_type, config, split) -> Floorplan:
    h, w = config.grid_h, config.grid_w
    cs = config.cell_size
    grid = np.zeros((h, w), dtype=bool)
    objects: list[ObjectInstance] = []

    # parent footprints scale with room area so small rooms stay placeable:
    # budget ~40% of the floor for parents, split evenly among the classes
    n_parents = max(1, len(room_parents(room_type)))
    side = np.sqrt(0.4 * h * w * cs * cs / n_parents)
    p_lo = max(0.2, min(0.7 * side, _FOOTPRINT[Role.parent][0]))
    p_hi = max(p_lo + 0.05, min(1.3 * side, _FOOTPRINT[Role.parent][1]))

    def place_parent(cls: ObjectClass):
        for _ in range(config.max_place_retries):
            fw = rng.uniform(p_lo, p_hi)
            fd = rng.uniform(p_lo, p_hi)
            x = rng.uniform(fw / 2, w * cs - fw / 2) if w * cs > fw else w * cs / 2
            y = rng.uniform(fd / 2, h * cs - fd / 2) if h * cs > fd else h * cs / 2
            cells = _covered_cells(x, y, fw, fd, cs, h, w)
            if not cells:
                continue
            if any(grid[i, j] for i, j in cells):
                continue
            if grid.sum() + len(cells) >= h * w - 1:
                continue  # keep at least one free cell
            for i, j in cells:
                grid[i, j] = True
            objects.append(ObjectInstance(cls.id, (x, y), (fw, fd)))
            return
        raise PlacementError(f"unplaceable: {cls.name}")

    def place_point(cls: ObjectClass, role: Role, near: ObjectInstance | None):
        lo, hi = _FOOTPRINT[role]
        for _ in range(config.max_place_retries):
            fw = rng.uniform(lo, hi)
            fd = rng.uniform(lo, hi)
            if near is not None:
                r = config.co_place_radius * (0.15 + 0.84 * rng.random())
                ang = rng.uniform(0, 2 * np.pi)
                x = near.position[0] + r * np.cos(ang)
                y = near.position[1] + r * np.sin(ang)
                if not (0 <= x <= w * cs and 0 <= y <= h * cs):
                    continue
            else:
                x = rng.uniform(0, w * cs)
                y = rng.uniform(0, h * cs)
            objects.append(ObjectInstance(cls.id, (x, y), (fw, fd)))
            return
        raise PlacementError(f"unplaceable: {cls.name}")

    # every parent class once, plus the occasional duplicate
    parents = room_parents(room_type)
    for cls in parents:
        place_parent(cls)
    for cls in parents:
        if rng.random() < 0.15:
            place_parent(cls)

    fp = Floorplan("", room_type, grid, cs, objects, split)

    # targets, biased toward their most likely parent
    targets = room_targets(room_type)
    n_targets = max(3, min(config.targets_per_room, len(targets)))
    chosen = [targets[k] for k in sorted(rng.choice(len(targets), n_targets, replace=False).tolist())]
    for cls in chosen:
        near = None
        if rng.random() < config.beta:
            pname = _paper_argmax_parent(room_type, cls.name)
            if pname is not None:
                cands = fp.instances_of(class_by_name(pname).id)
                if cands:
                    near = cands[int(rng.integers(len(cands)))]
        place_point(cls, Role.target, near)

    # background clutter
    bg = room_background(room_type)
    for _ in range(config.background_per_room):
        place_point(bg[int(rng.integers(len(bg)))], Role.background, None)

    fp._cache.clear()
    _validate(fp, config)
    return fp


def _validate(fp: Floorplan, config: WorldConfig) -> None:
    if not fp.reachable_cells:
        raise PlacementError("no reachable cells")
    reach = np.array(
        [fp.cell_center(i, j) for i, j in fp.reachable_cells], dtype=np.float64
    )
    for o in fp.objects:
        if CLASSES[o.class_id].role is not Role.target:
            continue
        d = np.hypot(reach[:, 0] - o.position[0], reach[:, 1] - o.position[1])
        if d.min() > config.visibility_distance:
            raise PlacementError(f"target not reachable: {CLASSES[o.class_id].name}")


# ---------------------------------------------------------------- persistence

FORMAT_HEADER = "gridnav-floorplan v1"


def save_floorplan(fp: Floorplan, path) -> None:
    lines = [
        FORMAT_HEADER,
        f"id {fp.id}",
        f"room_type {fp.room_type.value}",
        f"grid {fp.height} {fp.width}",
        f"cell_size {fp.cell_size!r}",
        f"split {fp.split}",
        f"objects {len(fp.objects)}",
    ]
    for o in fp.objects:
        lines.append(
            f"{CLASSES[o.class_id].name} {float(o.position[0])!r} {float(o.position[1])!r} "
            f"{float(o.footprint[0])!r} {float(o.footprint[1])!r}"
        )
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_floorplan(path) -> Floorplan:
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    if not lines or lines[0] != FORMAT_HEADER:
        raise ValueError(f"{path}: not a floorplan file")
    head = {}
    idx = 1
    while idx < len(lines) and not lines[idx].startswith("objects "):
        key, _, val = lines[idx].partition(" ")
        head[key] = val
        idx += 1
    n = int(lines[idx].split()[1])
    h, w = (int(v) for v in head["grid"].split())
    cs = float(head["cell_size"])
    objects = []
    grid = np.zeros((h, w), dtype=bool)
    for ln in lines[idx + 1 : idx + 1 + n]:
        name, x, y, fw, fd = ln.split()
        cls = class_by_name(name)
        inst = ObjectInstance(cls.id, (float(x), float(y)), (float(fw), float(fd)))
        objects.append(inst)
        if cls.role is Role.parent:
            for i, j in _covered_cells(*inst.position, *inst.footprint, cs, h, w):
                grid[i, j] = True
    return Floorplan(
        head["id"], RoomType(head["room_type"]), grid, cs, objects, head["split"]
    )
