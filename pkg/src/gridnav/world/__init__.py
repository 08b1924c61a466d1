from .agent import HEADINGS, PITCHES, Action, AgentPose, spawn, step
from .detector import Detection, detect, is_visible, visibility_table
from .floorplan import (
    Floorplan,
    ObjectInstance,
    PlacementError,
    generate_floorplan,
    load_floorplan,
    save_floorplan,
)
from .pathing import UnreachableTarget, optimal_path_length, shortest_path_actions

__all__ = [
    "HEADINGS",
    "PITCHES",
    "Action",
    "AgentPose",
    "Detection",
    "Floorplan",
    "ObjectInstance",
    "PlacementError",
    "UnreachableTarget",
    "detect",
    "generate_floorplan",
    "is_visible",
    "load_floorplan",
    "optimal_path_length",
    "save_floorplan",
    "shortest_path_actions",
    "spawn",
    "step",
    "visibility_table",
]
