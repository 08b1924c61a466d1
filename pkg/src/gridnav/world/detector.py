"""Ground-truth object detector and the visibility/success predicate.

The detector reports every object instance within range, inside a 90-degree
field of view around the agent's heading, and whose height band is compatible
with the camera pitch.  There is no occlusion.  Per class, only the nearest
instance is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import WorldConfig
from .agent import AgentPose

# band index (low, mid, high) x pitch index (-30, 0, +30) -> detectable
_BAND_OK = np.array(
    [
        [True, True, False],   # low: pitch -30 or 0
        [True, True, True],    # mid: any pitch
        [False, True, True],   # high: pitch 0 or +30
    ],
    dtype=bool,
)

_PITCH_IDX = {-30: 0, 0: 1, 30: 2}

# vertical center of each band on the image, nudged by pitch
_BAND_Y = np.array([0.75, 0.5, 0.25])


@dataclass(frozen=True)
class Detection:
    class_id: int
    x_c: float
    y_c: float
    bbox_area: float
    distance: float


def detect(floorplan, pose: AgentPose, config: WorldConfig | None = None) -> list[Detection]:
    """Detections for the current frame, one per visible class (nearest wins)."""
    config = config or WorldConfig()
    cids, pos, area, band = floorplan.object_arrays
    if len(cids) == 0:
        return []
    ax, ay = floorplan.cell_center(*pose.cell)
    dx = pos[:, 0] - ax
    dy = pos[:, 1] - ay
    dist = np.hypot(dx, dy)
    bearing = np.degrees(np.arctan2(dy, dx)) - pose.heading
    bearing = (bearing + 180.0) % 360.0 - 180.0
    half_fov = config.fov_deg / 2
    pidx = _PITCH_IDX[pose.pitch]
    ok = (
        (dist <= config.detector_range)
        & (np.abs(bearing) <= half_fov)
        & _BAND_OK[band, pidx]
    )
    if not ok.any():
        return []
    x_c = 0.5 + bearing / config.fov_deg
    y_c = np.clip(_BAND_Y[band] + pose.pitch / 30.0 * 0.25, 0.0, 1.0)
    d2 = np.maximum(dist, floorplan.cell_size) ** 2
    bbox = np.clip(config.bbox_area_scale * area / d2, 0.0, 1.0)

    best: dict[int, int] = {}
    for k in np.nonzero(ok)[0]:
        c = int(cids[k])
        if c not in best or dist[k] < dist[best[c]]:
            best[c] = int(k)
    return [
        Detection(
            class_id=int(cids[k]),
            x_c=float(np.clip(x_c[k], 0.0, 1.0)),
            y_c=float(y_c[k]),
            bbox_area=float(bbox[k]),
            distance=float(dist[k]),
        )
        for k in sorted(best.values(), key=lambda k: int(cids[k]))
    ]


def is_visible(
    detections: list[Detection],
    class_id: int,
    visibility_distance: float = 1.5,
) -> bool:
    """Success predicate: detected in the current frame and within 1.5 m."""
    for d in detections:
        if d.class_id == class_id:
            return d.distance <= visibility_distance
    return False


def visibility_table(floorplan, class_id: int, config: WorldConfig | None = None) -> np.ndarray:
    """Bool array (H, W, 8 headings, 3 pitches): class visible from that pose.

    Cached on the floorplan; used by the path oracle and the scripted agent.
    """
    config = config or WorldConfig()
    key = ("vis", class_id)
    if key in floorplan._cache:
        return floorplan._cache[key]
    h, w = floorplan.height, floorplan.width
    table = np.zeros((h, w, 8, 3), dtype=bool)
    cids, pos, _, band = floorplan.object_arrays
    sel = np.nonzero(cids == class_id)[0]
    max_d = min(config.visibility_distance, config.detector_range)
    half_fov = config.fov_deg / 2
    jj, ii = np.meshgrid(np.arange(w), np.arange(h))
    ax = (jj + 0.5) * floorplan.cell_size
    ay = (ii + 0.5) * floorplan.cell_size
    for k in sel:
        dx = pos[k, 0] - ax
        dy = pos[k, 1] - ay
        dist_ok = np.hypot(dx, dy) <= max_d
        ang = np.degrees(np.arctan2(dy, dx))
        for hi, heading in enumerate(range(0, 360, 45)):
            bearing = (ang - heading + 180.0) % 360.0 - 180.0
            fov_ok = np.abs(bearing) <= half_fov
            for pi in range(3):
                if _BAND_OK[band[k], pi]:
                    table[:, :, hi, pi] |= dist_ok & fov_ok
    floorplan._cache[key] = table
    return table
