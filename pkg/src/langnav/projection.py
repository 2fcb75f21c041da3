"""Geometry layer between image space and the 3D world.

Covers the two view representations handed to generated programs (a padded
panorama of the three frames, or the frames kept separate), conversion of a
pixel in either representation into a world ray, first-hit ray casting on the
voxel occupancy grid (incremental grid traversal), and placement of the final
3D navigation waypoint with a horizontal standoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .worldsim import RobotState, SceneSpec, ViewSet, VoxelMap, camera_rig

# Origins are nudged by this amount on every axis before traversal so that
# rays do not start exactly on voxel corners/faces (documented epsilon policy).
CORNER_EPSILON = 1e-9

DEFAULT_STANDOFF = 0.75  # meters: robot half-length plus margin


@dataclass(frozen=True)
class PanoramaLayout:
    """Left/front/right frames side by side with blank padding columns."""

    frame_order: tuple[str, str, str] = ("left", "front", "right")
    frame_width: int = 640
    pad_px: int = 20

    @property
    def total_width(self) -> int:
        return 3 * self.frame_width + 2 * self.pad_px

    def offset(self, frame: str) -> int:
        idx = self.frame_order.index(frame)
        return idx * (self.frame_width + self.pad_px)

    def frame_at(self, x: float) -> tuple[str, float] | None:
        """Frame name and local u for a panorama column, None on padding."""
        if x < 0 or x > self.total_width:
            return None
        for frame in self.frame_order:
            off = self.offset(frame)
            if off <= x < off + self.frame_width:
                return frame, x - off
        if x == self.total_width:  # right edge belongs to the last frame
            return self.frame_order[-1], float(self.frame_width)
        return None

    def frame_span(self, frame: str) -> tuple[int, int]:
        off = self.offset(frame)
        return off, off + self.frame_width


@dataclass(frozen=True)
class PanoramaView:
    """Mode A root: one stitched view, rectangle coordinates remapped."""

    layout: PanoramaLayout
    views: ViewSet
    height: int

    @property
    def width(self) -> int:
        return self.layout.total_width


@dataclass(frozen=True)
class MergedView:
    """Mode B root: the three frame views behind one frame-local window."""

    views: ViewSet
    width: int
    height: int


def assemble_representation(views: ViewSet, mode: str) -> PanoramaView | MergedView:
    """Build the runtime root view for representation A or B."""
    cfg = views.scene.cameras
    if mode == "A":
        layout = PanoramaLayout(frame_width=cfg.image_width)
        return PanoramaView(layout=layout, views=views, height=cfg.image_height)
    if mode == "B":
        return MergedView(views=views, width=cfg.image_width, height=cfg.image_height)
    raise ValueError(f"unknown representation mode: {mode!r}")


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray  # unit

    def __post_init__(self) -> None:
        norm = float(np.linalg.norm(self.direction))
        if abs(norm - 1.0) > 1e-12:
            object.__setattr__(self, "direction", self.direction / norm)


class PadColumnError(ValueError):
    """A panorama pixel fell on a padding column that maps to no frame."""


def pixel_to_ray(
    u: float,
    v: float,
    frame: str,
    robot: RobotState,
    scene: SceneSpec,
    layout: PanoramaLayout | None = None,
    angular_noise_rad: float = 0.0,
    noise_rng=None,
) -> Ray:
    """World ray through a view pixel.

    `frame` may be a camera frame name or "panorama"; panorama coordinates
    are decomposed through the layout first and raise PadColumnError when the
    column belongs to no frame. An optional angular perturbation models
    camera-to-range calibration error (default off).
    """
    if frame == "panorama":
        layout = layout or PanoramaLayout(frame_width=scene.cameras.image_width)
        resolved = layout.frame_at(u)
        if resolved is None:
            raise PadColumnError(f"unmapped panorama column: {u}")
        frame, u = resolved
    rig = camera_rig(scene, robot)
    if frame not in rig:
        raise ValueError(f"unknown camera frame: {frame!r}")
    camera = rig[frame]
    direction = camera.pixel_direction(u, v)
    if angular_noise_rad > 0.0 and noise_rng is not None:
        direction = _perturb_direction(direction, angular_noise_rad, noise_rng)
    return Ray(origin=np.array(camera.position), direction=direction)


def _perturb_direction(direction: np.ndarray, angle: float, rng) -> np.ndarray:
    # rotate about a random axis orthogonal to the ray by `angle`
    ref = np.array([0.0, 0.0, 1.0])
    if abs(float(np.dot(ref, direction))) > 0.99:
        ref = np.array([1.0, 0.0, 0.0])
    ortho1 = np.cross(direction, ref)
    ortho1 /= np.linalg.norm(ortho1)
    ortho2 = np.cross(direction, ortho1)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    axis_mix = math.cos(phi) * ortho1 + math.sin(phi) * ortho2
    out = math.cos(angle) * direction + math.sin(angle) * axis_mix
    return out / np.linalg.norm(out)


@dataclass(frozen=True)
class RaycastResult:
    hit: bool
    point: tuple[float, float, float]  # entry point on the hit voxel, or boundary exit
    voxel: tuple[int, int, int] | None = None
    distance: float = 0.0
    corner_graze: bool = False  # a traversal step was ambiguous within epsilon


def raycast_first_hit(ray: Ray, vmap: VoxelMap, max_range: float = 30.0) -> RaycastResult:
    """First occupied voxel along the ray (incremental grid traversal).

    Returns the entry point on the first occupied voxel, or the exit point on
    the map boundary when nothing is hit within max_range or inside the map.
    The origin must be inside the map.
    """
    if not vmap.inside(ray.origin):
        raise ValueError(f"ray origin {tuple(ray.origin)} outside map extent")

    res = vmap.resolution
    origin = np.asarray(ray.origin, dtype=float) + CORNER_EPSILON
    d = ray.direction
    nx, ny, nz = vmap.dims

    ijk = [int(origin[a] // res) for a in range(3)]
    for a, n in zip(range(3), (nx, ny, nz)):
        ijk[a] = min(max(ijk[a], 0), n - 1)

    if vmap.occupied(*ijk):
        return RaycastResult(
            hit=True, point=tuple(float(v) for v in ray.origin), voxel=tuple(ijk), distance=0.0
        )

    step = [0, 0, 0]
    t_max = [math.inf, math.inf, math.inf]
    t_delta = [math.inf, math.inf, math.inf]
    for a in range(3):
        if d[a] > 0:
            step[a] = 1
            t_max[a] = ((ijk[a] + 1) * res - origin[a]) / d[a]
            t_delta[a] = res / d[a]
        elif d[a] < 0:
            step[a] = -1
            t_max[a] = (ijk[a] * res - origin[a]) / d[a]
            t_delta[a] = -res / d[a]

    graze = False
    t = 0.0
    dims = (nx, ny, nz)
    while True:
        axis = 0
        if t_max[1] < t_max[axis]:
            axis = 1
        if t_max[2] < t_max[axis]:
            axis = 2
        others = [a for a in range(3) if a != axis]
        if any(abs(t_max[a] - t_max[axis]) < CORNER_EPSILON for a in others):
            graze = True
        t = t_max[axis]
        ijk[axis] += step[axis]
        t_max[axis] += t_delta[axis]
        if not (0 <= ijk[axis] < dims[axis]) or t > max_range:
            exit_t = _boundary_exit_t(origin, d, vmap)
            point = origin + exit_t * d
            return RaycastResult(
                hit=False,
                point=tuple(float(v) for v in point),
                voxel=None,
                distance=float(exit_t),
                corner_graze=graze,
            )
        if vmap.occupied(*ijk):
            point = origin + t * d
            return RaycastResult(
                hit=True,
                point=tuple(float(v) for v in point),
                voxel=tuple(ijk),
                distance=float(t),
                corner_graze=graze,
            )


def _boundary_exit_t(origin: np.ndarray, d: np.ndarray, vmap: VoxelMap) -> float:
    ex, ey, ez = vmap.extent
    t_exit = math.inf
    for a, hi in zip(range(3), (ex, ey, ez)):
        if d[a] > 0:
            t_exit = min(t_exit, (hi - origin[a]) / d[a])
        elif d[a] < 0:
            t_exit = min(t_exit, (0.0 - origin[a]) / d[a])
    return max(t_exit, 0.0)


@dataclass(frozen=True)
class Waypoint:
    position: tuple[float, float, float]
    status: str  # "hit" | "map-boundary"
    hit_voxel: tuple[int, int, int] | None
    standoff_applied: float
    clamped: bool = False


def emplace_waypoint(
    result: RaycastResult,
    ray: Ray,
    vmap: VoxelMap,
    standoff: float = DEFAULT_STANDOFF,
) -> Waypoint:
    """Turn a raycast result into a navigation waypoint.

    Hits are pulled back by `standoff` along the horizontal component of the
    ray and dropped onto the support column at that (x, y); boundary results
    keep the boundary exit point so the out-of-map failure mode stays
    observable. A pullback that exits the map is clamped inside and flagged.
    """
    if not result.hit:
        return Waypoint(
            position=result.point,
            status="map-boundary",
            hit_voxel=None,
            standoff_applied=0.0,
        )
    ex, ey, _ = vmap.extent
    dx, dy = float(ray.direction[0]), float(ray.direction[1])
    h = math.hypot(dx, dy)
    px, py, pz = result.point
    if h < 1e-12:
        wx, wy = px, py
        applied = 0.0
    else:
        wx = px - standoff * dx / h
        wy = py - standoff * dy / h
        applied = standoff
    clamped = False
    margin = vmap.resolution / 2
    if not (0 <= wx <= ex and 0 <= wy <= ey):
        wx = min(max(wx, margin), ex - margin)
        wy = min(max(wy, margin), ey - margin)
        clamped = True
    support = vmap.column_support(wx, wy)
    wz = support if support is not None else pz
    return Waypoint(
        position=(float(wx), float(wy), float(wz)),
        status="hit",
        hit_voxel=result.voxel,
        standoff_applied=applied,
        clamped=clamped,
    )
