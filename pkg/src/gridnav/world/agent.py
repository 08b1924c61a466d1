"""Agent pose, the 6-action space, and kinematics on the occupancy grid."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

HEADINGS = (0, 45, 90, 135, 180, 225, 270, 315)
PITCHES = (-30, 0, 30)

# heading -> (di, dj); heading 0 points along +j, 90 along +i.
_DIRS = {
    0: (0, 1),
    45: (1, 1),
    90: (1, 0),
    135: (1, -1),
    180: (0, -1),
    225: (-1, -1),
    270: (-1, 0),
    315: (-1, 1),
}


class Action(enum.IntEnum):
    MoveAhead = 0
    RotateLeft = 1
    RotateRight = 2
    LookUp = 3
    LookDown = 4
    Done = 5


@dataclass(frozen=True)
class AgentPose:
    cell: tuple[int, int]
    heading: int = 0
    pitch: int = 0

    def __post_init__(self):
        if self.heading % 45 != 0 or not 0 <= self.heading < 360:
            raise ValueError(f"bad heading {self.heading}")
        if self.pitch not in PITCHES:
            raise ValueError(f"bad pitch {self.pitch}")


def heading_dir(heading: int) -> tuple[int, int]:
    return _DIRS[heading]


def step(floorplan, pose: AgentPose, action: Action) -> AgentPose:
    """Apply one action.  Blocked moves are no-ops; Done leaves the pose as is."""
    if action == Action.MoveAhead:
        di, dj = _DIRS[pose.heading]
        i, j = pose.cell[0] + di, pose.cell[1] + dj
        if floorplan.is_free(i, j):
            return replace(pose, cell=(i, j))
        return pose
    if action == Action.RotateLeft:
        return replace(pose, heading=(pose.heading + 45) % 360)
    if action == Action.RotateRight:
        return replace(pose, heading=(pose.heading - 45) % 360)
    if action == Action.LookUp:
        return replace(pose, pitch=min(pose.pitch + 30, 30))
    if action == Action.LookDown:
        return replace(pose, pitch=max(pose.pitch - 30, -30))
    if action == Action.Done:
        return pose
    raise ValueError(f"unknown action {action!r}")


def spawn(floorplan, seed: int) -> AgentPose:
    """Uniform pose over reachable cells x headings, pitch 0; deterministic in seed."""
    import numpy as np

    rng = np.random.default_rng(seed)
    cells = floorplan.reachable_cells
    idx = int(rng.integers(len(cells)))
    heading = HEADINGS[int(rng.integers(8))]
    return AgentPose(cell=tuple(cells[idx]), heading=heading, pitch=0)
