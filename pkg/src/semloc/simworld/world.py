"""Synthetic rectangular-prism world: labeled wall objects and feature landmarks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import WorldGenerationError
from ..features.describe import DESCRIPTOR_DIM
from ..semantics.classes import DEFAULT_CLASS_NAMES, ClassRegistry

# footprint extents (meters, u x v) for each registered class
_CLASS_EXTENTS = {
    "vent": (0.5, 0.5),
    "light": (0.35, 0.35),
    "handrail": (0.8, 0.2),
    "rack_panel": (1.2, 0.8),
    "hatch": (1.0, 1.0),
    "port": (0.3, 0.3),
    "strut": (0.25, 0.9),
    "screen": (0.6, 0.45),
}

_PLACEMENT_RETRIES = 200
_DESCRIPTOR_RETRIES = 200


@dataclass(frozen=True)
class Wall:
    """One interior face of the prism with an in-plane (u, v) chart."""

    index: int
    origin: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray
    normal: np.ndarray  # unit, pointing into the room
    width: float
    height: float

    def to_world(self, uv: np.ndarray) -> np.ndarray:
        uv = np.asarray(uv, dtype=float)
        return self.origin + uv[..., :1] * self.u_axis + uv[..., 1:2] * self.v_axis


def make_walls(dimensions) -> list[Wall]:
    """The four side walls of an axis-aligned prism with one corner at the
    origin; v runs along world z on every wall."""
    dx, dy, dz = (float(v) for v in dimensions)
    z = np.array([0.0, 0.0, 1.0])
    specs = [
        (np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), dx),
        (np.array([dx, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([-1.0, 0.0, 0.0]), dy),
        (np.array([dx, dy, 0.0]), np.array([-1.0, 0.0, 0.0]), np.array([0.0, -1.0, 0.0]), dx),
        (np.array([0.0, dy, 0.0]), np.array([0.0, -1.0, 0.0]), np.array([1.0, 0.0, 0.0]), dy),
    ]
    return [
        Wall(i, origin, u, z, normal, width, dz)
        for i, (origin, u, normal, width) in enumerate(specs)
    ]


@dataclass
class WorldObject:
    id: int
    class_id: int | None  # None: outside the detector's registry (clutter)
    wall_index: int
    center_uv: np.ndarray  # (2,)
    rotation: float  # in-plane angle, radians
    extent: np.ndarray  # (2,) meters
    landmark_ids: list[int]
    movable: bool

    def footprint_corners_uv(self) -> np.ndarray:
        """(4, 2) corners of the rotated footprint rectangle."""
        half = np.asarray(self.extent, dtype=float) / 2.0
        corners = np.array(
            [[-half[0], -half[1]], [half[0], -half[1]], [half[0], half[1]], [-half[0], half[1]]]
        )
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        rot = np.array([[c, -s], [s, c]])
        return self.center_uv + corners @ rot.T

    def footprint_corners_3d(self, wall: Wall) -> np.ndarray:
        return np.array([wall.to_world(uv) for uv in self.footprint_corners_uv()])


@dataclass
class WorldLandmark:
    id: int
    position: np.ndarray  # (3,)
    descriptor: np.ndarray  # unit norm
    class_id: int | None  # None for background and clutter landmarks
    object_id: int | None  # None for background landmarks


@dataclass
class World:
    dimensions: np.ndarray  # (3,) meters
    objects: list[WorldObject]
    landmarks: list[WorldLandmark]
    seed: int
    registry: ClassRegistry = field(default_factory=ClassRegistry.default)

    def walls(self) -> list[Wall]:
        return make_walls(self.dimensions)

    def object_by_id(self, object_id: int) -> WorldObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise WorldGenerationError(f"no object with id {object_id}")

    def landmark_positions(self) -> np.ndarray:
        return np.array([lm.position for lm in self.landmarks]).reshape(-1, 3)

    def landmark_descriptors(self) -> np.ndarray:
        return np.array([lm.descriptor for lm in self.landmarks])


@dataclass
class WorldConfig:
    dimensions: tuple = (8.0, 4.0, 3.0)
    objects_per_class: int = 2
    landmarks_per_object: int = 20
    background_landmarks: int = 80
    clutter_objects: int = 2
    clutter_landmarks: int = 40  # per clutter object
    clutter_extent: tuple = (1.8, 1.2)
    delta_desc: float = 0.8  # minimum inter-landmark descriptor distance
    descriptor_dim: int = DESCRIPTOR_DIM


def _placement_radius(extent) -> float:
    return float(np.linalg.norm(np.asarray(extent, dtype=float)) / 2.0)


def _place_objects(config: WorldConfig, walls, rng, registry) -> list[WorldObject]:
    """Rejection-sample non-overlapping wall placements, biggest objects first
    (deterministic order; overlap test uses bounding circles)."""
    requests = []  # (class_id or None, extent, movable)
    for cls in registry:
        extent = _CLASS_EXTENTS[cls.name]
        for _ in range(config.objects_per_class):
            requests.append((cls.id, np.array(extent), False))
    for _ in range(config.clutter_objects):
        requests.append((None, np.array(config.clutter_extent, dtype=float), True))
    requests.sort(key=lambda r: (-float(r[1][0] * r[1][1]), r[0] if r[0] is not None else 99))

    placed: list[WorldObject] = []
    for class_id, extent, movable in requests:
        radius = _placement_radius(extent)
        for attempt in range(_PLACEMENT_RETRIES + 1):
            if attempt == _PLACEMENT_RETRIES:
                raise WorldGenerationError(
                    f"could not place object of extent {tuple(extent)} after "
                    f"{_PLACEMENT_RETRIES} attempts; reduce object counts or sizes"
                )
            wall = walls[rng.integers(len(walls))]
            if wall.width - 2 * radius <= 0 or wall.height - 2 * radius <= 0:
                continue
            center = np.array(
                [
                    rng.uniform(radius, wall.width - radius),
                    rng.uniform(radius, wall.height - radius),
                ]
            )
            rotation = float(rng.uniform(0.0, 2.0 * math.pi))
            clear = all(
                other.wall_index != wall.index
                or np.linalg.norm(other.center_uv - center)
                > radius + _placement_radius(other.extent)
                for other in placed
            )
            if clear:
                placed.append(
                    WorldObject(
                        id=len(placed),
                        class_id=class_id,
                        wall_index=wall.index,
                        center_uv=center,
                        rotation=rotation,
                        extent=extent,
                        landmark_ids=[],
                        movable=movable,
                    )
                )
                break
    return placed


def _sample_descriptors(n: int, dim: int, delta: float, rng) -> np.ndarray:
    """Unit descriptors with pairwise distance >= delta (rejection sampling)."""
    accepted = np.empty((n, dim))
    count = 0
    attempts = 0
    while count < n:
        if attempts > _DESCRIPTOR_RETRIES * n:
            raise WorldGenerationError(
                f"could not sample {n} descriptors {delta} apart in {dim} dims"
            )
        attempts += 1
        candidate = rng.normal(size=dim)
        candidate /= np.linalg.norm(candidate)
        if count and np.min(np.linalg.norm(accepted[:count] - candidate, axis=1)) < delta:
            continue
        accepted[count] = candidate
        count += 1
    return accepted


def generate_world(config: WorldConfig | None = None, seed: int = 0) -> World:
    """Deterministically generate the synthetic scene for a given seed.

    The prism's four side walls carry objects_per_class instances of each of
    the eight registered classes, plus movable unregistered clutter objects
    (the scene-change targets); landmarks are uniform within each footprint,
    with background landmarks scattered over the bare walls.  Descriptors are
    unit vectors at least delta_desc apart so matching is unambiguous.
    """
    config = config or WorldConfig()
    registry = ClassRegistry.default()
    rng = np.random.default_rng(seed)
    walls = make_walls(config.dimensions)
    objects = _place_objects(config, walls, rng, registry)

    landmark_counts = sum(
        config.clutter_landmarks if obj.class_id is None else config.landmarks_per_object
        for obj in objects
    )
    total = landmark_counts + config.background_landmarks
    descriptors = _sample_descriptors(total, config.descriptor_dim, config.delta_desc, rng)

    landmarks: list[WorldLandmark] = []
    for obj in sorted(objects, key=lambda o: o.id):
        n = config.clutter_landmarks if obj.class_id is None else config.landmarks_per_object
        wall = walls[obj.wall_index]
        c, s = math.cos(obj.rotation), math.sin(obj.rotation)
        rot = np.array([[c, -s], [s, c]])
        offsets = rng.uniform(-0.5, 0.5, size=(n, 2)) * obj.extent
        for offset in offsets:
            uv = obj.center_uv + rot @ offset
            lm = WorldLandmark(
                id=len(landmarks),
                position=wall.to_world(uv),
                descriptor=descriptors[len(landmarks)],
                class_id=obj.class_id,
                object_id=obj.id,
            )
            obj.landmark_ids.append(lm.id)
            landmarks.append(lm)

    areas = np.array([w.width * w.height for w in walls])
    for _ in range(config.background_landmarks):
        wall = walls[rng.choice(len(walls), p=areas / areas.sum())]
        uv = np.array([rng.uniform(0, wall.width), rng.uniform(0, wall.height)])
        landmarks.append(
            WorldLandmark(
                id=len(landmarks),
                position=wall.to_world(uv),
                descriptor=descriptors[len(landmarks)],
                class_id=None,
                object_id=None,
            )
        )

    return World(
        dimensions=np.asarray(config.dimensions, dtype=float),
        objects=objects,
        landmarks=landmarks,
        seed=seed,
        registry=registry,
    )
