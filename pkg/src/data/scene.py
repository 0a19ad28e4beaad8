"""Procedural synthetic scenes.

Every scene has a checkered ground quad plus two to seven boxes and spheres
resting on it, one directional light and a background color. All geometry
lies inside the unit ball, so cameras at distance 2 with a 60° field of view
see the whole scene.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from src.utils.errors import ConfigError

Vec3 = Tuple[float, float, float]

GROUND_HEIGHT = -0.5
GROUND_HALF_EXTENT = 0.6
MIN_EXTRA_PRIMITIVES = 2
MAX_EXTRA_PRIMITIVES = 7
BOUNDING_RADIUS = 1.0
_PLACEMENT_RADIUS = 0.98
_PLACEMENT_TRIES = 100


class PrimitiveKind(str, Enum):
    GROUND = "ground"
    BOX = "box"
    SPHERE = "sphere"


class Pattern(str, Enum):
    FLAT = "flat"
    CHECKER = "checker"


@dataclass(frozen=True)
class Primitive:
    """One analytic shape.

    Attributes:
        kind: Shape type.
        center: Center in world units.
        size: Half extents for boxes and the ground quad (y ignored);
            ``size[0]`` is the radius for spheres.
        albedo: Base RGB reflectance in [0, 1].
        albedo_alt: Second checker color (equal to ``albedo`` when flat).
        pattern: Flat or checkerboard.
        checker_cells: Checker cells per world unit.
    """

    kind: PrimitiveKind
    center: Vec3
    size: Vec3
    albedo: Vec3
    albedo_alt: Vec3
    pattern: Pattern = Pattern.FLAT
    checker_cells: float = 5.0

    def bounding_radius(self) -> float:
        """Distance from the origin to the farthest point of the shape (upper bound)."""
        c = np.asarray(self.center)
        if self.kind == PrimitiveKind.SPHERE:
            return float(np.linalg.norm(c) + self.size[0])
        if self.kind == PrimitiveKind.GROUND:
            h = np.array([self.size[0], 0.0, self.size[2]])
            return float(np.linalg.norm(np.abs(c) + h))
        return float(np.linalg.norm(np.abs(c) + np.asarray(self.size)))


@dataclass(frozen=True)
class SceneSpec:
    """A complete, immutable scene description."""

    seed: int
    primitives: Tuple[Primitive, ...] = ()
    light_direction: Vec3 = (0.0, 1.0, 0.0)
    background: Vec3 = (0.0, 0.0, 0.0)
    ambient: float = field(default=0.1)

    def __post_init__(self) -> None:
        for prim in self.primitives:
            if prim.bounding_radius() > BOUNDING_RADIUS + 1e-9:
                raise ConfigError(
                    f"{prim.kind.value} at {prim.center} leaves the unit ball "
                    f"(radius {prim.bounding_radius():.4f})"
                )
        norm = float(np.linalg.norm(self.light_direction))
        if norm < 1e-12:
            raise ConfigError("light direction must be non-zero")

    @property
    def light(self) -> np.ndarray:
        d = np.asarray(self.light_direction, dtype=np.float64)
        return d / np.linalg.norm(d)


def _color(rng: np.random.Generator, low: float = 0.15, high: float = 0.95) -> Vec3:
    return tuple(float(x) for x in rng.uniform(low, high, size=3))  # type: ignore[return-value]


def _place(rng: np.random.Generator, extent: float, height: float) -> Vec3:
    """Pick a ground position whose shape, of bounding ``extent``, stays inside the ball."""
    for _ in range(_PLACEMENT_TRIES):
        x, z = rng.uniform(-0.5, 0.5, size=2)
        center = np.array([x, height, z])
        if np.linalg.norm(center) + extent <= _PLACEMENT_RADIUS:
            return (float(x), float(height), float(z))
    return (0.0, float(height), 0.0)


def generate_scene(seed: int) -> SceneSpec:
    """Generate a deterministic random scene from ``seed``."""
    rng = np.random.default_rng(seed)
    ground_a = _color(rng, 0.3, 0.9)
    ground_b = tuple(float(0.5 * c) for c in ground_a)
    primitives = [
        Primitive(
            kind=PrimitiveKind.GROUND,
            center=(0.0, GROUND_HEIGHT, 0.0),
            size=(GROUND_HALF_EXTENT, 0.0, GROUND_HALF_EXTENT),
            albedo=ground_a,
            albedo_alt=ground_b,  # type: ignore[arg-type]
            pattern=Pattern.CHECKER,
            checker_cells=float(rng.choice([2.5, 5.0])),
        )
    ]

    count = int(rng.integers(MIN_EXTRA_PRIMITIVES, MAX_EXTRA_PRIMITIVES + 1))
    for _ in range(count):
        kind = PrimitiveKind.SPHERE if rng.random() < 0.5 else PrimitiveKind.BOX
        pattern = Pattern.CHECKER if rng.random() < 0.4 else Pattern.FLAT
        albedo = _color(rng)
        alt = _color(rng) if pattern == Pattern.CHECKER else albedo
        cells = float(rng.uniform(4.0, 10.0))
        if kind == PrimitiveKind.SPHERE:
            radius = float(rng.uniform(0.1, 0.28))
            center = _place(rng, radius, GROUND_HEIGHT + radius)
            size: Vec3 = (radius, radius, radius)
        else:
            half = rng.uniform(0.07, 0.22, size=3)
            size = (float(half[0]), float(half[1]), float(half[2]))
            center = _place(rng, float(np.linalg.norm(half)), GROUND_HEIGHT + size[1])
        primitives.append(
            Primitive(
                kind=kind,
                center=center,
                size=size,
                albedo=albedo,
                albedo_alt=alt,
                pattern=pattern,
                checker_cells=cells,
            )
        )

    azimuth = rng.uniform(0.0, 2.0 * np.pi)
    elevation = rng.uniform(np.radians(35.0), np.radians(75.0))
    light = (
        float(np.cos(elevation) * np.cos(azimuth)),
        float(np.sin(elevation)),
        float(np.cos(elevation) * np.sin(azimuth)),
    )
    return SceneSpec(
        seed=int(seed),
        primitives=tuple(primitives),
        light_direction=light,
        background=_color(rng, 0.0, 0.35),
    )
