"""Deterministic simulated world.

Scenes are axis-aligned boxes on flat or heightfield terrain, observed by a
three-camera rig (left/front/right, 90 degree horizontal FOV each) mounted on
a unicycle robot. The module provides:

  * scene loading with eager validation,
  * voxel occupancy map construction (terrain + object boxes),
  * pinhole projection of object boxes into per-frame vector views,
  * ground-truth depth rasters (computed lazily per pixel window),
  * a deterministic synthetic object detector with occlusion-aware scores
    and an optional seeded noise model,
  * robot kinematics.

Image convention: u grows rightward, v grows UPWARD, v = 0 at the bottom row.
Raster arrays returned by depth windows are indexed [v, u] with v ascending;
exporting to row-major top-origin images means row = height - 1 - v.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

NO_GEOMETRY_DEPTH = 30.0  # meters reported for pixels with nothing to hit
MIN_DETECTION_AREA = 100.0  # px^2 of box-region intersection
_NEAR_PLANE = 0.01  # meters; corners closer than this are clamped before divide

FRAME_NAMES = ("left", "front", "right")
FRAME_YAW_OFFSETS = {"left": math.pi / 2, "front": 0.0, "right": -math.pi / 2}


class SceneError(ValueError):
    """Scene file violates the schema or an invariant."""


# ---------------------------------------------------------------------------
# geometry primitives


@dataclass(frozen=True)
class Box3:
    """Axis-aligned box in meters: (x0, y0, z0) .. (x1, y1, z1)."""

    x0: float
    y0: float
    z0: float
    x1: float
    y1: float
    z1: float

    def __post_init__(self) -> None:
        if self.x1 < self.x0 or self.y1 < self.y0 or self.z1 < self.z0:
            raise SceneError(f"degenerate box bounds {self}")

    @property
    def center(self) -> tuple[float, float, float]:
        return ((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2, (self.z0 + self.z1) / 2)

    def corners(self) -> list[tuple[float, float, float]]:
        return [
            (x, y, z)
            for x in (self.x0, self.x1)
            for y in (self.y0, self.y1)
            for z in (self.z0, self.z1)
        ]

    def overlaps(self, other: "Box3") -> bool:
        return (
            self.x0 < other.x1
            and self.x1 > other.x0
            and self.y0 < other.y1
            and self.y1 > other.y0
            and self.z0 < other.z1
            and self.z1 > other.z0
        )

    def contains_xy(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def horizontal_distance(self, x: float, y: float) -> float:
        dx = max(self.x0 - x, 0.0, x - self.x1)
        dy = max(self.y0 - y, 0.0, y - self.y1)
        return math.hypot(dx, dy)


def ray_box_depth(origin: np.ndarray, direction: np.ndarray, box: Box3) -> float | None:
    """Slab intersection; returns the entry parameter t >= 0 or None.

    `direction` need not be unit length: t is in units of the given vector,
    which lets callers use forward-component-1 vectors for planar depth.
    """
    t0, t1 = 0.0, math.inf
    lo = (box.x0, box.y0, box.z0)
    hi = (box.x1, box.y1, box.z1)
    for axis in range(3):
        d = direction[axis]
        o = origin[axis]
        if abs(d) < 1e-15:
            if o < lo[axis] or o > hi[axis]:
                return None
            continue
        ta = (lo[axis] - o) / d
        tb = (hi[axis] - o) / d
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return None
    return t0


# ---------------------------------------------------------------------------
# scene model


@dataclass(frozen=True)
class SceneObject:
    id: str
    label: str
    box: Box3
    synonyms: tuple[str, ...] = ()
    attributes: frozenset[str] = frozenset()
    support_of: str | None = None


@dataclass(frozen=True)
class ConfusionPair:
    """Query-level detector confusion: a query matching `query` may also
    ground objects labeled `label`, with the given probability."""

    query: str
    label: str
    prob: float = 1.0


@dataclass(frozen=True)
class DetectorNoise:
    miss_prob: float = 0.0
    confusions: tuple[ConfusionPair, ...] = ()
    seed: int = 0


@dataclass(frozen=True)
class Terrain:
    """Piecewise-constant heightfield; "flat" means one voxel layer of floor."""

    kind: str  # "flat" | "heightfield"
    cell_size: float = 0.0
    heights: np.ndarray | None = None  # shape (nx_cells, ny_cells)
    flat_height: float = 0.0

    def height_at(self, x: float, y: float) -> float:
        if self.kind == "flat":
            return self.flat_height
        assert self.heights is not None
        i = int(x // self.cell_size)
        j = int(y // self.cell_size)
        i = min(max(i, 0), self.heights.shape[0] - 1)
        j = min(max(j, 0), self.heights.shape[1] - 1)
        return float(self.heights[i, j])

    def boxes(self, extent: tuple[float, float, float]) -> list[Box3]:
        """Solid boxes from z=0 up to the surface, for exact ray queries."""
        if self.kind == "flat":
            if self.flat_height <= 0:
                return []
            return [Box3(0.0, 0.0, 0.0, extent[0], extent[1], self.flat_height)]
        assert self.heights is not None
        result = []
        nx, ny = self.heights.shape
        for i in range(nx):
            # merge runs of equal height along y to keep the box count down
            j = 0
            while j < ny:
                h = float(self.heights[i, j])
                j2 = j
                while j2 + 1 < ny and float(self.heights[i, j2 + 1]) == h:
                    j2 += 1
                if h > 0:
                    result.append(
                        Box3(
                            i * self.cell_size,
                            j * self.cell_size,
                            0.0,
                            min((i + 1) * self.cell_size, extent[0]),
                            min((j2 + 1) * self.cell_size, extent[1]),
                            h,
                        )
                    )
                j = j2 + 1
        return result


@dataclass(frozen=True)
class CameraConfig:
    image_width: int = 640
    image_height: int = 480
    hfov_deg: float = 90.0
    max_range: float = 30.0
    height: float = 0.7  # mount height above the robot's ground contact


@dataclass(frozen=True)
class RobotSpec:
    width: float = 0.5
    length: float = 0.7
    height: float = 0.5
    speed_limit: float = 1.5


@dataclass(frozen=True)
class QAFixture:
    object_id: str | None  # None = scene-level (llm_query)
    question: str  # normalized form
    answer: str


@dataclass(frozen=True)
class SceneSpec:
    name: str
    map_extent: tuple[float, float, float]
    voxel_resolution: float
    terrain: Terrain
    objects: tuple[SceneObject, ...]
    robot_start: tuple[float, float, float]  # x, y, yaw
    cameras: CameraConfig = CameraConfig()
    robot: RobotSpec = RobotSpec()
    qa_fixtures: tuple[QAFixture, ...] = ()
    detector_noise: DetectorNoise = DetectorNoise()

    def object_by_id(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise KeyError(f"unknown object id: {object_id}")

    def qa_lookup(self, object_id: str | None, question: str) -> str | None:
        norm = normalize_question(question)
        for fx in self.qa_fixtures:
            if fx.object_id == object_id and fx.question == norm:
                return fx.answer
        return None


def normalize_question(question: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    cleaned = "".join(c if c.isalnum() or c.isspace() else " " for c in question.lower())
    return " ".join(cleaned.split())


def tokens(text: str) -> tuple[str, ...]:
    return tuple(normalize_question(text).split())


def _parse_terrain(raw, resolution: float) -> Terrain:
    if raw == "flat" or raw is None:
        return Terrain(kind="flat", flat_height=resolution)
    if isinstance(raw, dict):
        try:
            cell = float(raw["cell_size"])
            heights = np.asarray(raw["heights"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneError(f"terrain: bad heightfield spec ({exc})") from exc
        if heights.ndim != 2:
            raise SceneError("terrain.heights: expected a 2D grid")
        if (heights < 0).any():
            raise SceneError("terrain.heights: negative height")
        return Terrain(kind="heightfield", cell_size=cell, heights=heights)
    raise SceneError(f"terrain: expected 'flat' or a heightfield object, got {raw!r}")


def scene_from_dict(data: dict) -> SceneSpec:
    """Build and eagerly validate a SceneSpec; errors carry field paths."""

    def need(key: str):
        if key not in data:
            raise SceneError(f"{key}: missing required field")
        return data[key]

    name = str(need("name"))
    extent_raw = need("map_extent")
    if not (isinstance(extent_raw, (list, tuple)) and len(extent_raw) == 3):
        raise SceneError("map_extent: expected [x, y, z] meters")
    extent = tuple(float(v) for v in extent_raw)
    if min(extent) <= 0:
        raise SceneError("map_extent: all extents must be positive")
    resolution = float(need("voxel_resolution"))
    if resolution <= 0:
        raise SceneError("voxel_resolution: must be positive")
    terrain = _parse_terrain(data.get("terrain", "flat"), resolution)

    objects = []
    seen_ids: set[str] = set()
    for idx, raw in enumerate(data.get("objects", [])):
        path = f"objects[{idx}]"
        try:
            box_vals = [float(v) for v in raw["box"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneError(f"{path}.box: {exc}") from exc
        if len(box_vals) != 6:
            raise SceneError(f"{path}.box: expected [x0, y0, z0, x1, y1, z1]")
        try:
            box = Box3(*box_vals)
        except SceneError as exc:
            raise SceneError(f"{path}.box: {exc}") from exc
        obj_id = str(raw.get("id", ""))
        if not obj_id:
            raise SceneError(f"{path}.id: missing")
        if obj_id in seen_ids:
            raise SceneError(f"{path}.id: duplicate id {obj_id!r}")
        seen_ids.add(obj_id)
        objects.append(
            SceneObject(
                id=obj_id,
                label=str(raw.get("label", obj_id)),
                box=box,
                synonyms=tuple(str(s) for s in raw.get("synonyms", [])),
                attributes=frozenset(str(a).lower() for a in raw.get("attributes", [])),
                support_of=raw.get("support_of"),
            )
        )

    start_raw = need("robot_start")
    if not (isinstance(start_raw, (list, tuple)) and len(start_raw) == 3):
        raise SceneError("robot_start: expected [x, y, yaw]")
    robot_start = tuple(float(v) for v in start_raw)

    cam_raw = data.get("cameras", {})
    cameras = CameraConfig(
        image_width=int(cam_raw.get("image_width", 640)),
        image_height=int(cam_raw.get("image_height", 480)),
        hfov_deg=float(cam_raw.get("hfov_deg", 90.0)),
        max_range=float(cam_raw.get("max_range", 30.0)),
        height=float(cam_raw.get("height", 0.7)),
    )
    rob_raw = data.get("robot", {})
    robot = RobotSpec(
        width=float(rob_raw.get("width", 0.5)),
        length=float(rob_raw.get("length", 0.7)),
        height=float(rob_raw.get("height", 0.5)),
        speed_limit=float(rob_raw.get("speed_limit", 1.5)),
    )
    if min(robot.width, robot.length, robot.height) <= 0:
        raise SceneError("robot: footprint dimensions must be positive")

    fixtures = []
    for idx, raw in enumerate(data.get("qa_fixtures", [])):
        try:
            fixtures.append(
                QAFixture(
                    object_id=raw.get("object_id"),
                    question=normalize_question(str(raw["question"])),
                    answer=str(raw["answer"]),
                )
            )
        except KeyError as exc:
            raise SceneError(f"qa_fixtures[{idx}]: missing {exc}") from exc

    noise_raw = data.get("detector_noise", {})
    confusions = tuple(
        ConfusionPair(
            query=str(c["query"]), label=str(c["label"]), prob=float(c.get("prob", 1.0))
        )
        for c in noise_raw.get("confusions", [])
    )
    noise = DetectorNoise(
        miss_prob=float(noise_raw.get("miss_prob", 0.0)),
        confusions=confusions,
        seed=int(noise_raw.get("seed", 0)),
    )

    scene = SceneSpec(
        name=name,
        map_extent=extent,
        voxel_resolution=resolution,
        terrain=terrain,
        objects=tuple(objects),
        robot_start=robot_start,
        cameras=cameras,
        robot=robot,
        qa_fixtures=tuple(fixtures),
        detector_noise=noise,
    )
    _validate_scene(scene)
    return scene


def _validate_scene(scene: SceneSpec) -> None:
    ex, ey, ez = scene.map_extent
    for obj in scene.objects:
        b = obj.box
        if b.x0 < 0 or b.y0 < 0 or b.z0 < 0 or b.x1 > ex or b.y1 > ey or b.z1 > ez:
            raise SceneError(f"object {obj.id!r}: box extends outside map extent")
        if obj.support_of is not None:
            try:
                base = scene.object_by_id(obj.support_of)
            except KeyError:
                raise SceneError(
                    f"object {obj.id!r}: support_of references unknown id {obj.support_of!r}"
                ) from None
            gap = abs(obj.box.z0 - base.box.z1)
            if gap > scene.voxel_resolution:
                raise SceneError(
                    f"object {obj.id!r}: not in vertical contact with {obj.support_of!r}"
                    f" (gap {gap:.3f} m)"
                )
    x, y, _yaw = scene.robot_start
    if not (0 <= x <= ex and 0 <= y <= ey):
        raise SceneError("robot_start: outside map extent")
    support = scene.terrain.height_at(x, y)
    if support > scene.robot.height * 2 + scene.voxel_resolution:
        raise SceneError("robot_start: terrain at the start pose is not traversable")


def load_scene(path: str | Path) -> SceneSpec:
    """Load and validate a scene JSON file."""
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError:
        raise SceneError(f"scene file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise SceneError(f"scene file {p}: invalid JSON ({exc})") from exc
    return scene_from_dict(data)


# ---------------------------------------------------------------------------
# voxel map


@dataclass(frozen=True)
class VoxelMap:
    resolution: float
    dims: tuple[int, int, int]
    occupancy: np.ndarray  # bool, shape dims
    provenance: str = "scene-derived"

    @property
    def extent(self) -> tuple[float, float, float]:
        return (
            self.dims[0] * self.resolution,
            self.dims[1] * self.resolution,
            self.dims[2] * self.resolution,
        )

    def inside(self, point) -> bool:
        ex, ey, ez = self.extent
        x, y, z = point
        return 0 <= x <= ex and 0 <= y <= ey and 0 <= z <= ez

    def voxel_index(self, point) -> tuple[int, int, int]:
        r = self.resolution
        return (int(point[0] // r), int(point[1] // r), int(point[2] // r))

    def occupied(self, i: int, j: int, k: int) -> bool:
        nx, ny, nz = self.dims
        if 0 <= i < nx and 0 <= j < ny and 0 <= k < nz:
            return bool(self.occupancy[i, j, k])
        return False

    def column_support(self, x: float, y: float) -> float | None:
        """Top z of the highest occupied voxel in the column, None if empty."""
        nx, ny, _ = self.dims
        i = int(x // self.resolution)
        j = int(y // self.resolution)
        if not (0 <= i < nx and 0 <= j < ny):
            return None
        column = self.occupancy[i, j, :]
        ks = np.nonzero(column)[0]
        if ks.size == 0:
            return None
        return float((ks[-1] + 1) * self.resolution)

    def rle_counts(self) -> list[int]:
        """Run-length counts of the C-order flattened bitset, starting with
        a (possibly zero-length) unoccupied run."""
        flat = self.occupancy.ravel(order="C")
        counts: list[int] = []
        current = False
        run = 0
        for v in flat:
            v = bool(v)
            if v == current:
                run += 1
            else:
                counts.append(run)
                current = v
                run = 1
        counts.append(run)
        return counts


def build_voxel_map(scene: SceneSpec) -> VoxelMap:
    """Occupancy: a voxel is occupied iff it overlaps terrain or an object box.

    Overlap is strict (positive volume), so a box ending exactly on a voxel
    face does not claim the neighbor.
    """
    r = scene.voxel_resolution
    ex, ey, ez = scene.map_extent
    nx = int(round(ex / r))
    ny = int(round(ey / r))
    nz = int(round(ez / r))
    occ = np.zeros((nx, ny, nz), dtype=bool)

    # terrain: per-column surface height
    xs = (np.arange(nx) + 0.5) * r
    ys = (np.arange(ny) + 0.5) * r
    if scene.terrain.kind == "flat":
        hgrid = np.full((nx, ny), scene.terrain.flat_height)
    else:
        hgrid = np.empty((nx, ny))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                hgrid[i, j] = scene.terrain.height_at(float(x), float(y))
    k_top = np.ceil(hgrid / r - 1e-9).astype(int)  # number of occupied layers
    k_top = np.clip(k_top, 0, nz)
    layer_idx = np.arange(nz)
    occ |= layer_idx[None, None, :] < k_top[:, :, None]

    eps = 1e-9
    for obj in scene.objects:
        b = obj.box
        i0 = max(int(math.floor(b.x0 / r + eps)), 0)
        i1 = min(int(math.ceil(b.x1 / r - eps)), nx)
        j0 = max(int(math.floor(b.y0 / r + eps)), 0)
        j1 = min(int(math.ceil(b.y1 / r - eps)), ny)
        k0 = max(int(math.floor(b.z0 / r + eps)), 0)
        k1 = min(int(math.ceil(b.z1 / r - eps)), nz)
        if i0 < i1 and j0 < j1 and k0 < k1:
            occ[i0:i1, j0:j1, k0:k1] = True

    return VoxelMap(resolution=r, dims=(nx, ny, nz), occupancy=occ)


# ---------------------------------------------------------------------------
# robot state and kinematics


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    yaw: float
    spec: RobotSpec = RobotSpec()

    @property
    def pose(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.yaw)


def step_robot(state: RobotState, linear: float, angular: float, dt: float) -> RobotState:
    """Advance the unicycle model by dt.

    Uses the exact constant-twist arc (consistent under sub-stepping); for
    angular ~ 0 this reduces to x += v cos(yaw) dt, y += v sin(yaw) dt.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if abs(linear) > state.spec.speed_limit + 1e-9:
        raise ValueError(f"linear speed {linear} exceeds limit {state.spec.speed_limit}")
    if abs(angular) < 1e-12:
        nx = state.x + linear * math.cos(state.yaw) * dt
        ny = state.y + linear * math.sin(state.yaw) * dt
        return replace(state, x=nx, y=ny)
    new_yaw = state.yaw + angular * dt
    radius = linear / angular
    nx = state.x + radius * (math.sin(new_yaw) - math.sin(state.yaw))
    ny = state.y - radius * (math.cos(new_yaw) - math.cos(state.yaw))
    return replace(state, x=nx, y=ny, yaw=new_yaw)


# ---------------------------------------------------------------------------
# cameras and view rendering


@dataclass(frozen=True)
class CameraModel:
    frame: str
    position: tuple[float, float, float]  # world
    yaw: float  # world heading of the optical axis
    config: CameraConfig

    @property
    def fx(self) -> float:
        return (self.config.image_width / 2) / math.tan(math.radians(self.config.hfov_deg) / 2)

    @property
    def fy(self) -> float:
        # square pixels: vertical FOV derives from the aspect ratio
        return self.fx

    @property
    def cx(self) -> float:
        return self.config.image_width / 2

    @property
    def cy(self) -> float:
        return self.config.image_height / 2

    def to_camera(self, point) -> tuple[float, float, float]:
        """(forward, left, up) camera coordinates of a world point."""
        dx = point[0] - self.position[0]
        dy = point[1] - self.position[1]
        dz = point[2] - self.position[2]
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        forward = c * dx + s * dy
        left = -s * dx + c * dy
        return (forward, left, dz)

    def project(self, point) -> tuple[float, float, float]:
        """Pixel (u, v) and forward depth; u rightward, v upward."""
        forward, lft, up = self.to_camera(point)
        f = max(forward, _NEAR_PLANE)
        u = self.cx - self.fx * lft / f
        v = self.cy + self.fy * up / f
        return (u, v, forward)

    def pixel_direction(self, u: float, v: float) -> np.ndarray:
        """World unit direction through pixel (u, v)."""
        lft = (self.cx - u) / self.fx
        up = (v - self.cy) / self.fy
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        wx = c * 1.0 - s * lft
        wy = s * 1.0 + c * lft
        d = np.array([wx, wy, up])
        return d / np.linalg.norm(d)

    def pixel_direction_planar(self, u: float, v: float) -> np.ndarray:
        """World direction with forward component 1 (slab t = planar depth)."""
        lft = (self.cx - u) / self.fx
        up = (v - self.cy) / self.fy
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return np.array([c - s * lft, s + c * lft, up])


def camera_rig(scene: SceneSpec, robot: RobotState) -> dict[str, CameraModel]:
    ground = scene.terrain.height_at(robot.x, robot.y)
    pos = (robot.x, robot.y, ground + scene.cameras.height)
    return {
        name: CameraModel(
            frame=name,
            position=pos,
            yaw=robot.yaw + FRAME_YAW_OFFSETS[name],
            config=scene.cameras,
        )
        for name in FRAME_NAMES
    }


@dataclass(frozen=True)
class ProjectedRect:
    object_id: str
    left: float
    lower: float
    right: float
    upper: float
    depth: float  # meters from camera to the nearest point of the object box

    @property
    def area(self) -> float:
        return max(self.right - self.left, 0.0) * max(self.upper - self.lower, 0.0)


@dataclass(frozen=True)
class FrameView:
    frame: str
    width: int
    height: int
    camera: CameraModel
    rects: tuple[ProjectedRect, ...]


@dataclass(frozen=True)
class ViewSet:
    scene: SceneSpec
    robot: RobotState
    frames: dict[str, FrameView]

    def frame(self, name: str) -> FrameView:
        return self.frames[name]


def _nearest_distance(camera: CameraModel, box: Box3) -> float:
    px, py, pz = camera.position
    qx = min(max(px, box.x0), box.x1)
    qy = min(max(py, box.y0), box.y1)
    qz = min(max(pz, box.z0), box.z1)
    return math.dist((px, py, pz), (qx, qy, qz))


def project_box(camera: CameraModel, box: Box3) -> tuple[float, float, float, float] | None:
    """Min/max over the 8 projected corners, clipped to the image.

    Corners behind the near plane are clamped to it; a box entirely behind
    the camera plane projects to nothing.
    """
    corners = box.corners()
    forwards = [camera.to_camera(c)[0] for c in corners]
    if max(forwards) <= 0:
        return None
    us, vs = [], []
    for c in corners:
        u, v, _ = camera.project(c)
        us.append(u)
        vs.append(v)
    left, right = min(us), max(us)
    lower, upper = min(vs), max(vs)
    left = max(left, 0.0)
    lower = max(lower, 0.0)
    right = min(right, float(camera.config.image_width))
    upper = min(upper, float(camera.config.image_height))
    if right <= left or upper <= lower:
        return None
    if _nearest_distance(camera, box) > camera.config.max_range:
        return None
    return (left, lower, right, upper)


def render_views(scene: SceneSpec, robot: RobotState) -> ViewSet:
    """Project every object into each camera frame (vector views)."""
    rig = camera_rig(scene, robot)
    frames = {}
    for name, camera in rig.items():
        rects = []
        for obj in scene.objects:
            rect = project_box(camera, obj.box)
            if rect is None:
                continue
            rects.append(
                ProjectedRect(
                    object_id=obj.id,
                    left=rect[0],
                    lower=rect[1],
                    right=rect[2],
                    upper=rect[3],
                    depth=_nearest_distance(camera, obj.box),
                )
            )
        rects.sort(key=lambda r: (r.depth, r.object_id))
        frames[name] = FrameView(
            frame=name,
            width=scene.cameras.image_width,
            height=scene.cameras.image_height,
            camera=camera,
            rects=tuple(rects),
        )
    return ViewSet(scene=scene, robot=robot, frames=frames)


# ---------------------------------------------------------------------------
# depth rasters


def depth_window(
    scene: SceneSpec, camera: CameraModel, left: float, lower: float, right: float, upper: float
) -> np.ndarray:
    """Ground-truth planar depth for the pixel window [left,right)x[lower,upper).

    Returns an array indexed [v, u] (v ascending, bottom origin). Pixels are
    sampled at their centers; pixels that hit no geometry read 30 m. Depth is
    the forward-axis component, so a wall 4 m ahead reads 4.0 at every pixel.
    """
    w = camera.config.image_width
    h = camera.config.image_height
    u0 = min(max(int(math.floor(left)), 0), w)
    u1 = min(max(int(math.ceil(right)), 0), w)
    v0 = min(max(int(math.floor(lower)), 0), h)
    v1 = min(max(int(math.ceil(upper)), 0), h)
    if u1 <= u0 or v1 <= v0:
        return np.zeros((0, 0))

    us = np.arange(u0, u1) + 0.5
    vs = np.arange(v0, v1) + 0.5
    uu, vv = np.meshgrid(us, vs)  # [v, u]
    lft = (camera.cx - uu) / camera.fx
    up = (vv - camera.cy) / camera.fy
    c, s = math.cos(camera.yaw), math.sin(camera.yaw)
    dirs = np.stack([c - s * lft, s + c * lft, np.broadcast_to(up, lft.shape)], axis=-1)

    origin = np.array(camera.position)
    depth = np.full(uu.shape, NO_GEOMETRY_DEPTH)
    boxes = [obj.box for obj in scene.objects]
    boxes.extend(scene.terrain.boxes(scene.map_extent))
    for box in boxes:
        t = _vector_slab_entry(origin, dirs, box)
        np.minimum(depth, t, out=depth)
    np.minimum(depth, NO_GEOMETRY_DEPTH, out=depth)
    return depth


def _vector_slab_entry(origin: np.ndarray, dirs: np.ndarray, box: Box3) -> np.ndarray:
    """Entry parameter of rays into a box (inf when missed); dirs [..., 3]."""
    lo = np.array([box.x0, box.y0, box.z0])
    hi = np.array([box.x1, box.y1, box.z1])
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirs
        ta = (lo - origin) * inv
        tb = (hi - origin) * inv
    tmin = np.minimum(ta, tb)
    tmax = np.maximum(ta, tb)
    # parallel axes: inside -> (-inf, inf); outside -> miss
    parallel = np.abs(dirs) < 1e-15
    inside = (origin >= lo) & (origin <= hi)
    tmin = np.where(parallel, np.where(inside, -np.inf, np.inf), tmin)
    tmax = np.where(parallel, np.where(inside, np.inf, -np.inf), tmax)
    t0 = np.maximum(tmin.max(axis=-1), 0.0)
    t1 = tmax.min(axis=-1)
    return np.where(t0 <= t1, t0, np.inf)


# ---------------------------------------------------------------------------
# scene ray queries (exact geometry, used by the detector's occlusion test)

TERRAIN_ID = "__terrain__"


def first_scene_hit(
    scene: SceneSpec, origin: np.ndarray, direction: np.ndarray
) -> tuple[float, str] | None:
    """Nearest geometry hit along a ray: (t_meters, object id or TERRAIN_ID)."""
    direction = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(direction))
    if norm == 0:
        return None
    direction = direction / norm
    best: tuple[float, str] | None = None
    for obj in scene.objects:
        t = ray_box_depth(origin, direction, obj.box)
        if t is not None and (best is None or t < best[0]):
            best = (t, obj.id)
    for box in scene.terrain.boxes(scene.map_extent):
        t = ray_box_depth(origin, direction, box)
        if t is not None and (best is None or t < best[0]):
            best = (t, TERRAIN_ID)
    return best


# ---------------------------------------------------------------------------
# synthetic detector


@dataclass(frozen=True)
class Detection:
    object_id: str
    left: float
    lower: float
    right: float
    upper: float
    score: float
    frame: str

    @property
    def horizontal_center(self) -> float:
        return (self.left + self.right) / 2


def name_matches(query: str, obj: SceneObject) -> bool:
    """Token containment match against the label and synonyms.

    A candidate name matches when its tokens are a subset of the query with
    any leftover query tokens explained by the object's attributes, or when
    the query tokens are a subset of the candidate's (e.g. "cone" matching
    "conical traffic delineator" via a synonym entry).
    """
    q = set(tokens(query))
    if not q:
        return False
    for candidate in (obj.label, *obj.synonyms):
        cand = set(tokens(candidate))
        if not cand:
            continue
        if cand <= q and (q - cand) <= obj.attributes:
            return True
        if q <= cand:
            return True
    return False


def _stable_seed(*parts) -> int:
    payload = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def _rect_visible_fraction(rect: ProjectedRect, nearer: list[ProjectedRect]) -> float:
    """Fraction of rect's area not covered by strictly nearer rectangles.

    Exact for axis-aligned boxes via coordinate compression.
    """
    if rect.area <= 0:
        return 0.0
    occluders = []
    for other in nearer:
        l = max(rect.left, other.left)
        r = min(rect.right, other.right)
        b = max(rect.lower, other.lower)
        t = min(rect.upper, other.upper)
        if r > l and t > b:
            occluders.append((l, b, r, t))
    if not occluders:
        return 1.0
    xs = sorted({rect.left, rect.right, *(o[0] for o in occluders), *(o[2] for o in occluders)})
    ys = sorted({rect.lower, rect.upper, *(o[1] for o in occluders), *(o[3] for o in occluders)})
    covered = 0.0
    for xi in range(len(xs) - 1):
        x_mid = (xs[xi] + xs[xi + 1]) / 2
        if not (rect.left <= x_mid <= rect.right):
            continue
        w = xs[xi + 1] - xs[xi]
        for yi in range(len(ys) - 1):
            y_mid = (ys[yi] + ys[yi + 1]) / 2
            if not (rect.lower <= y_mid <= rect.upper):
                continue
            if any(o[0] <= x_mid <= o[2] and o[1] <= y_mid <= o[3] for o in occluders):
                covered += w * (ys[yi + 1] - ys[yi])
    return max(0.0, min(1.0, (rect.area - covered) / rect.area))


def synthetic_detect(
    views: ViewSet,
    query: str,
    region: tuple[float, float, float, float],
    frame: str,
    seed: int = 0,
) -> list[Detection]:
    """Deterministic object detections for `query` within a frame region.

    A candidate is reported when its label/synonyms token-match the query
    (confusion pairs may widen the match), its projected box overlaps the
    region by at least 100 px^2, and the ray to its box center is unoccluded.
    Score is the visible-area fraction against nearer rectangles. Results are
    sorted by descending score, ties by ascending horizontal center.
    """
    if not query:
        raise ValueError("query must be non-empty")
    scene = views.scene
    view = views.frame(frame)
    noise = scene.detector_noise
    rng = random.Random(_stable_seed(noise.seed, seed, query, frame))

    extra_labels: set[str] = set()
    for pair in noise.confusions:
        if set(tokens(pair.query)) <= set(tokens(query)) or set(tokens(query)) <= set(
            tokens(pair.query)
        ):
            if pair.prob >= 1.0 or rng.random() < pair.prob:
                extra_labels.add(pair.label.lower())

    results = []
    for rect in view.rects:
        obj = scene.object_by_id(rect.object_id)
        matched = name_matches(query, obj)
        if not matched and obj.label.lower() in extra_labels:
            matched = True
        if not matched:
            continue
        il = max(rect.left, region[0])
        ib = max(rect.lower, region[1])
        ir = min(rect.right, region[2])
        it = min(rect.upper, region[3])
        if ir - il <= 0 or it - ib <= 0:
            continue
        if (ir - il) * (it - ib) < MIN_DETECTION_AREA:
            continue
        if not _center_ray_unoccluded(scene, view.camera, obj):
            continue
        if noise.miss_prob > 0 and rng.random() < noise.miss_prob:
            continue
        nearer = [other for other in view.rects if other.depth < rect.depth]
        score = _rect_visible_fraction(rect, nearer)
        if score <= 0:
            continue
        results.append(
            Detection(
                object_id=obj.id,
                left=il,
                lower=ib,
                right=ir,
                upper=it,
                score=score,
                frame=frame,
            )
        )
    results.sort(key=lambda d: (-d.score, d.horizontal_center, d.object_id))
    return results


def _center_ray_unoccluded(scene: SceneSpec, camera: CameraModel, obj: SceneObject) -> bool:
    origin = np.array(camera.position)
    target = np.array(obj.box.center)
    hit = first_scene_hit(scene, origin, target - origin)
    return hit is not None and hit[1] == obj.id


def visible_objects(
    views: ViewSet, region: tuple[float, float, float, float], frame: str
) -> list[Detection]:
    """All unoccluded objects overlapping the region (no name filter); used
    to determine a crop's dominant object."""
    scene = views.scene
    view = views.frame(frame)
    results = []
    for rect in view.rects:
        obj = scene.object_by_id(rect.object_id)
        il = max(rect.left, region[0])
        ib = max(rect.lower, region[1])
        ir = min(rect.right, region[2])
        it = min(rect.upper, region[3])
        if ir - il <= 0 or it - ib <= 0:
            continue
        if not _center_ray_unoccluded(scene, view.camera, obj):
            continue
        nearer = [other for other in view.rects if other.depth < rect.depth]
        score = _rect_visible_fraction(rect, nearer)
        if score <= 0:
            continue
        results.append(
            Detection(
                object_id=obj.id,
                left=il,
                lower=ib,
                right=ir,
                upper=it,
                score=score,
                frame=frame,
            )
        )
    results.sort(key=lambda d: (-d.score, d.horizontal_center, d.object_id))
    return results


def attribute_oracle(scene: SceneSpec, object_id: str, visual_property: str) -> bool:
    """Case-insensitive attribute membership; unknown ids raise KeyError."""
    obj = scene.object_by_id(object_id)
    return visual_property.lower() in obj.attributes
