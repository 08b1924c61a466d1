"""Object catalog: classes, roles, room assignments, and height bands.

The catalog is a fixed table of object classes.  Each class is either a
navigation target, a parent (a large anchor object targets tend to sit near),
or background clutter.  Per-room target and parent lists are derived from the
class table and drive floorplan generation, reward shaping, and evaluation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class RoomType(enum.Enum):
    Kitchen = "Kitchen"
    LivingRoom = "LivingRoom"
    Bedroom = "Bedroom"
    Bathroom = "Bathroom"


class Role(enum.Enum):
    target = "target"
    parent = "parent"
    background = "background"


class HeightBand(enum.Enum):
    low = "low"
    mid = "mid"
    high = "high"


@dataclass(frozen=True)
class ObjectClass:
    id: int
    name: str
    role: Role
    room_types: frozenset[RoomType]
    height_band: HeightBand


K = RoomType.Kitchen
L = RoomType.LivingRoom
B = RoomType.Bedroom
T = RoomType.Bathroom

# (name, role, rooms, band).  Order is fixed: ids are positions in this list.
_CATALOG = [
    # -- targets --
    ("Toaster", Role.target, (K,), HeightBand.mid),
    ("Spatula", Role.target, (K,), HeightBand.mid),
    ("Bread", Role.target, (K,), HeightBand.mid),
    ("Mug", Role.target, (K,), HeightBand.mid),
    ("CoffeeMachine", Role.target, (K,), HeightBand.mid),
    ("Apple", Role.target, (K,), HeightBand.mid),
    ("Painting", Role.target, (L,), HeightBand.high),
    ("Laptop", Role.target, (L,), HeightBand.mid),
    ("Television", Role.target, (L,), HeightBand.mid),
    ("RemoteControl", Role.target, (L,), HeightBand.mid),
    ("Vase", Role.target, (L,), HeightBand.mid),
    ("ArmChair", Role.target, (L,), HeightBand.low),
    ("Blinds", Role.target, (B,), HeightBand.high),
    ("DeskLamp", Role.target, (B,), HeightBand.mid),
    ("Pillow", Role.target, (B,), HeightBand.low),
    ("AlarmClock", Role.target, (B,), HeightBand.mid),
    ("CD", Role.target, (B,), HeightBand.mid),
    ("Mirror", Role.target, (T,), HeightBand.high),
    ("ToiletPaper", Role.target, (T,), HeightBand.mid),
    ("SoapBar", Role.target, (T,), HeightBand.mid),
    ("Towel", Role.target, (T,), HeightBand.mid),
    ("SprayBottle", Role.target, (T,), HeightBand.mid),
    # -- parents --
    ("Fridge", Role.parent, (K,), HeightBand.mid),
    ("StoveBurner", Role.parent, (K,), HeightBand.mid),
    ("Microwave", Role.parent, (K,), HeightBand.mid),
    ("TableTop", Role.parent, (K, L), HeightBand.mid),
    ("Sink", Role.parent, (K,), HeightBand.mid),
    ("CounterTop", Role.parent, (K, T), HeightBand.mid),
    ("Shelf", Role.parent, (K, L, B), HeightBand.high),
    ("Drawer", Role.parent, (L, B, T), HeightBand.mid),
    ("Sofa", Role.parent, (L,), HeightBand.low),
    ("FloorLamp", Role.parent, (L,), HeightBand.high),
    ("Dresser", Role.parent, (B,), HeightBand.mid),
    ("NightStand", Role.parent, (B,), HeightBand.low),
    ("Desk", Role.parent, (B,), HeightBand.mid),
    ("Bed", Role.parent, (B,), HeightBand.low),
    ("Cabinet", Role.parent, (T,), HeightBand.mid),
    ("ShowerDoor", Role.parent, (T,), HeightBand.high),
    ("Toilet", Role.parent, (T,), HeightBand.low),
    ("Bathtub", Role.parent, (T,), HeightBand.low),
    # -- background clutter --
    ("GarbageCan", Role.background, (K, T), HeightBand.low),
    ("HousePlant", Role.background, (L, B), HeightBand.mid),
    ("Window", Role.background, (K, L, B, T), HeightBand.high),
    ("Chair", Role.background, (K, L), HeightBand.mid),
    ("Rug", Role.background, (L, B), HeightBand.low),
    ("Curtain", Role.background, (B,), HeightBand.high),
]

CLASSES: list[ObjectClass] = [
    ObjectClass(i, name, role, frozenset(rooms), band)
    for i, (name, role, rooms, band) in enumerate(_CATALOG)
]

NUM_CLASSES = len(CLASSES)

_BY_NAME = {c.name: c for c in CLASSES}


def class_by_name(name: str) -> ObjectClass:
    return _BY_NAME[name]


def class_name(class_id: int) -> str:
    return CLASSES[class_id].name


def room_targets(room: RoomType) -> list[ObjectClass]:
    """Target classes of a room, in id order."""
    return [c for c in CLASSES if c.role is Role.target and room in c.room_types]


def room_parents(room: RoomType) -> list[ObjectClass]:
    """Parent classes of a room, in id order."""
    return [c for c in CLASSES if c.role is Role.parent and room in c.room_types]


def room_background(room: RoomType) -> list[ObjectClass]:
    return [c for c in CLASSES if c.role is Role.background and room in c.room_types]


PARENT_IDS = frozenset(c.id for c in CLASSES if c.role is Role.parent)
TARGET_IDS = frozenset(c.id for c in CLASSES if c.role is Role.target)
