"""Shortest-path oracle over the full (cell, heading, pitch) action graph."""

from __future__ import annotations

from collections import deque

import numpy as np

from ..config import WorldConfig
from .agent import HEADINGS, Action, AgentPose, heading_dir
from .detector import visibility_table


class UnreachableTarget(RuntimeError):
    pass


_MOVES = [Action.MoveAhead, Action.RotateLeft, Action.RotateRight, Action.LookUp, Action.LookDown]


def _encode(i, j, hi, pi, w):
    return ((i * w + j) * 8 + hi) * 3 + pi


def shortest_path_actions(
    floorplan, start: AgentPose, target_class: int, config: WorldConfig | None = None
) -> list[Action]:
    """Minimum action sequence (Done excluded) until the target is visible."""
    config = config or WorldConfig()
    vis = visibility_table(floorplan, target_class, config)
    w = floorplan.width
    hi0 = HEADINGS.index(start.heading)
    pi0 = (start.pitch + 30) // 30
    i0, j0 = start.cell
    if vis[i0, j0, hi0, pi0]:
        return []

    start_code = _encode(i0, j0, hi0, pi0, w)
    prev: dict[int, tuple[int, Action]] = {start_code: (-1, Action.Done)}
    q = deque([(i0, j0, hi0, pi0)])
    while q:
        i, j, hi, pi = q.popleft()
        code = _encode(i, j, hi, pi, w)
        for a in _MOVES:
            ni, nj, nhi, npi = i, j, hi, pi
            if a == Action.MoveAhead:
                di, dj = heading_dir(HEADINGS[hi])
                if floorplan.is_free(i + di, j + dj):
                    ni, nj = i + di, j + dj
            elif a == Action.RotateLeft:
                nhi = (hi + 1) % 8
            elif a == Action.RotateRight:
                nhi = (hi - 1) % 8
            elif a == Action.LookUp:
                npi = min(pi + 1, 2)
            else:
                npi = max(pi - 1, 0)
            ncode = _encode(ni, nj, nhi, npi, w)
            if ncode in prev:
                continue
            prev[ncode] = (code, a)
            if vis[ni, nj, nhi, npi]:
                # reconstruct
                actions = [a]
                back = code
                while back != start_code:
                    back, ba = prev[back]
                    actions.append(ba)
                actions.reverse()
                return actions
            q.append((ni, nj, nhi, npi))
    raise UnreachableTarget(
        f"no pose reaching visibility of class {target_class} from {start}"
    )


def optimal_path_length(
    floorplan, start: AgentPose, target_class: int, config: WorldConfig | None = None
) -> int:
    """Optimal trajectory length to any state where the target is visible."""
    if not np.any(visibility_table(floorplan, target_class, config or WorldConfig())):
        raise UnreachableTarget(f"class {target_class} never visible in {floorplan.id}")
    return len(shortest_path_actions(floorplan, start, target_class, config))
