"""Sample-and-project graph planner and path follower.

2D samples are projected onto the support surface of the voxel map (top of
the occupied column), kept when the robot fits (head clearance and an
inflated-footprint mask), and connected to nearby nodes whose connecting
segment satisfies the slope limit and a swept-footprint collision check.
Goals outside the current graph trigger boundary replanning: expand around
the reachable node nearest the goal and retry, up to a cap.

Paths are tracked by a pure-pursuit follower over the unicycle model.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .worldsim import RobotSpec, RobotState, VoxelMap, step_robot


@dataclass(frozen=True)
class PlannerConfig:
    sample_spacing: float = 0.25  # robot_width / 2
    connect_radius: float = 1.4  # 2 * robot_length
    max_slope_deg: float = 30.0
    clearance: float = 0.6  # robot height + 0.1
    samples_per_expansion: int = 200
    replan_cap: int = 10
    goal_tolerance: float = 0.5
    seed: int = 0
    footprint_radius: float = 0.25  # robot_width / 2
    boundary_degree: int = 4
    expansion_radius_factor: float = 3.0

    def __post_init__(self) -> None:
        values = (
            self.sample_spacing,
            self.connect_radius,
            self.max_slope_deg,
            self.clearance,
            self.samples_per_expansion,
            self.goal_tolerance,
            self.footprint_radius,
        )
        if min(values) <= 0 or self.replan_cap < 1:
            raise ValueError("planner configuration values must be positive, cap >= 1")

    @property
    def expansion_radius(self) -> float:
        return self.expansion_radius_factor * self.connect_radius

    @classmethod
    def for_robot(cls, robot: RobotSpec, seed: int = 0, **overrides) -> "PlannerConfig":
        params = dict(
            sample_spacing=robot.width / 2,
            connect_radius=2 * robot.length,
            clearance=robot.height + 0.1,
            footprint_radius=robot.width / 2,
            seed=seed,
        )
        params.update(overrides)
        return cls(**params)


class TraversabilityGrid:
    """Derived 2D structures over a voxel map, cached per (map, config).

    support: top z of the highest occupied voxel per column (NaN if empty).
    blocked masks: per support band, columns whose voxels intrude into the
    robot's body window, dilated by the footprint radius (cell-center metric).
    A step allowance of one voxel plus radius*tan(max slope) keeps legal
    slopes from blocking themselves.
    """

    def __init__(self, vmap: VoxelMap, cfg: PlannerConfig):
        self.vmap = vmap
        self.cfg = cfg
        res = vmap.resolution
        occ = vmap.occupancy
        nz = vmap.dims[2]
        ks = np.arange(nz)
        highest = np.where(occ, ks[None, None, :], -1).max(axis=2)
        self.support = np.where(highest >= 0, (highest + 1) * res, np.nan)
        self.step_allowance = res + cfg.footprint_radius * math.tan(
            math.radians(cfg.max_slope_deg)
        )
        radius_cells = int(math.floor(cfg.footprint_radius / res + 1e-9))
        span = np.arange(-radius_cells, radius_cells + 1)
        di, dj = np.meshgrid(span, span, indexing="ij")
        self._structure = (np.hypot(di, dj) * res) <= cfg.footprint_radius + 1e-9
        self._masks: dict[int, np.ndarray] = {}

    def cell(self, x: float, y: float) -> tuple[int, int] | None:
        res = self.vmap.resolution
        i = int(x // res)
        j = int(y // res)
        nx, ny, _ = self.vmap.dims
        if 0 <= i < nx and 0 <= j < ny:
            return i, j
        return None

    def support_at(self, x: float, y: float) -> float | None:
        cell = self.cell(x, y)
        if cell is None:
            return None
        value = self.support[cell]
        return None if math.isnan(value) else float(value)

    def blocked_mask(self, band: int) -> np.ndarray:
        mask = self._masks.get(band)
        if mask is not None:
            return mask
        res = self.vmap.resolution
        z = band * res
        a = z + self.step_allowance
        b = z + self.cfg.clearance
        k_lo = max(int(math.floor(a / res + 1e-9)), 0)
        k_hi = min(int(math.ceil(b / res - 1e-9)), self.vmap.dims[2])
        if k_hi <= k_lo:
            slab = np.zeros(self.vmap.dims[:2], dtype=bool)
        else:
            slab = self.vmap.occupancy[:, :, k_lo:k_hi].any(axis=2)
        mask = ndimage.binary_dilation(slab, structure=self._structure)
        self._masks[band] = mask
        return mask

    def blocked_at(self, x: float, y: float, z: float) -> bool:
        cell = self.cell(x, y)
        if cell is None:
            return True
        band = int(round(z / self.vmap.resolution))
        return bool(self.blocked_mask(band)[cell])

    def blocked_many(self, xs: np.ndarray, ys: np.ndarray, zs: np.ndarray) -> bool:
        """True if any (x, y, z) point is footprint-blocked."""
        res = self.vmap.resolution
        nx, ny, _ = self.vmap.dims
        i = (xs // res).astype(int)
        j = (ys // res).astype(int)
        outside = (i < 0) | (i >= nx) | (j < 0) | (j >= ny)
        if outside.any():
            return True
        bands = np.rint(zs / res).astype(int)
        for band in np.unique(bands):
            mask = self.blocked_mask(int(band))
            sel = bands == band
            if mask[i[sel], j[sel]].any():
                return True
        return False


@dataclass
class NavGraph:
    """Undirected sampled plan graph, connected to its root node."""

    positions: list[tuple[float, float, float]] = field(default_factory=list)
    adjacency: list[dict[int, float]] = field(default_factory=list)
    expansion_center: list[tuple[float, float]] = field(default_factory=list)
    expansion_centers: list[tuple[float, float]] = field(default_factory=list)
    boundary_nodes: set[int] = field(default_factory=set)

    @property
    def node_count(self) -> int:
        return len(self.positions)

    def add_node(self, position, center) -> int:
        self.positions.append(tuple(float(v) for v in position))
        self.adjacency.append({})
        self.expansion_center.append((float(center[0]), float(center[1])))
        return len(self.positions) - 1

    def add_edge(self, a: int, b: int, cost: float) -> None:
        self.adjacency[a][b] = cost
        self.adjacency[b][a] = cost

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def edges(self) -> list[tuple[int, int, float]]:
        out = []
        for a, nbrs in enumerate(self.adjacency):
            for b, cost in nbrs.items():
                if a < b:
                    out.append((a, b, cost))
        return out

    def xy_array(self) -> np.ndarray:
        if not self.positions:
            return np.zeros((0, 2))
        return np.array([(p[0], p[1]) for p in self.positions])


@dataclass(frozen=True)
class PlannedPath:
    waypoints: tuple[tuple[float, float, float], ...]
    node_ids: tuple[int, ...]
    cost: float
    reached_goal: bool

    @property
    def length(self) -> int:
        return len(self.waypoints)


class SampleRejection(Exception):
    """A 2D sample could not be projected to a valid node."""


def project_sample(
    xy: tuple[float, float], vmap: VoxelMap, cfg: PlannerConfig, grid: TraversabilityGrid | None = None
) -> tuple[float, float, float]:
    """Project a 2D sample onto the support surface and vet the robot fit.

    Raises SampleRejection with a reason ("no terrain", "no headroom",
    "footprint blocked") when the sample is unusable.
    """
    grid = grid or TraversabilityGrid(vmap, cfg)
    x, y = float(xy[0]), float(xy[1])
    ex, ey, ez = vmap.extent
    if not (0 <= x <= ex and 0 <= y <= ey):
        raise SampleRejection("outside map")
    support = grid.support_at(x, y)
    if support is None:
        raise SampleRejection("no terrain")
    if support + cfg.clearance > ez + 1e-9:
        raise SampleRejection("no headroom")
    if grid.blocked_at(x, y, support):
        raise SampleRejection("footprint blocked")
    return (x, y, support)


def _edge_ok(
    a: tuple[float, float, float],
    b: tuple[float, float, float],
    grid: TraversabilityGrid,
    cfg: PlannerConfig,
) -> bool:
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    dz = b[2] - a[2]
    horizontal = math.hypot(dx, dy)
    if horizontal < 1e-9:
        return False
    if abs(dz) / horizontal > math.tan(math.radians(cfg.max_slope_deg)) + 1e-9:
        return False
    step = grid.vmap.resolution / 2
    n = max(int(math.ceil(horizontal / step)), 1)
    ts = np.linspace(0.0, 1.0, n + 1)
    xs = a[0] + ts * dx
    ys = a[1] + ts * dy
    zs = a[2] + ts * dz
    return not grid.blocked_many(xs, ys, zs)


def expand_graph(
    g: NavGraph,
    around: tuple[float, float],
    vmap: VoxelMap,
    cfg: PlannerConfig,
    rng: np.random.Generator,
    grid: TraversabilityGrid | None = None,
) -> int:
    """Sample a disc around `around`, project, connect; returns nodes added.

    New nodes must land at least sample_spacing from existing ones and gain
    at least one valid edge (keeping the graph connected to its root).
    """
    grid = grid or TraversabilityGrid(vmap, cfg)
    cx, cy = float(around[0]), float(around[1])
    g.expansion_centers.append((cx, cy))
    radii = cfg.expansion_radius * np.sqrt(rng.uniform(0.0, 1.0, cfg.samples_per_expansion))
    angles = rng.uniform(0.0, 2.0 * math.pi, cfg.samples_per_expansion)
    sx = cx + radii * np.cos(angles)
    sy = cy + radii * np.sin(angles)

    added = 0
    coords = np.array(g.positions) if g.positions else np.zeros((0, 3))
    for x, y in zip(sx, sy):
        if coords.shape[0]:
            d2 = (coords[:, 0] - x) ** 2 + (coords[:, 1] - y) ** 2
            if float(d2.min()) < cfg.sample_spacing**2:
                continue
        try:
            pos = project_sample((x, y), vmap, cfg, grid)
        except SampleRejection:
            continue
        neighbors = []
        if coords.shape[0]:
            dist3 = np.sqrt(
                (coords[:, 0] - pos[0]) ** 2
                + (coords[:, 1] - pos[1]) ** 2
                + (coords[:, 2] - pos[2]) ** 2
            )
            for other_id in np.nonzero(dist3 <= cfg.connect_radius)[0]:
                if _edge_ok(pos, g.positions[int(other_id)], grid, cfg):
                    neighbors.append(int(other_id))
        if not neighbors:
            continue
        node_id = g.add_node(pos, (cx, cy))
        coords = np.vstack([coords, np.array(pos)[None, :]])
        for other_id in neighbors:
            g.add_edge(node_id, other_id, math.dist(pos, g.positions[other_id]))
        added += 1
    _recompute_boundary(g, cfg)
    return added


def _recompute_boundary(g: NavGraph, cfg: PlannerConfig) -> None:
    """Boundary = low-degree nodes plus sampling-frontier nodes.

    A node is on the frontier while it sits in the outer third of every
    expansion disc so far; re-sampling around a node therefore retires it,
    which keeps replanning from picking the same seed node forever.
    """
    boundary = set()
    frontier_radius = cfg.expansion_radius * (2.0 / 3.0)
    centers = g.expansion_centers
    for node in range(g.node_count):
        if g.degree(node) < cfg.boundary_degree:
            boundary.add(node)
            continue
        px, py, _ = g.positions[node]
        if all(
            math.hypot(px - cx, py - cy) >= frontier_radius for cx, cy in centers
        ):
            boundary.add(node)
    if not boundary:
        boundary = set(range(g.node_count))
    g.boundary_nodes = boundary


def build_graph(
    robot: RobotState,
    vmap: VoxelMap,
    cfg: PlannerConfig,
    rng: np.random.Generator,
    grid: TraversabilityGrid | None = None,
) -> NavGraph:
    """Root the graph at the robot pose and run one expansion around it."""
    grid = grid or TraversabilityGrid(vmap, cfg)
    g = NavGraph()
    root = project_sample((robot.x, robot.y), vmap, cfg, grid)
    g.add_node(root, (robot.x, robot.y))
    expand_graph(g, (robot.x, robot.y), vmap, cfg, rng, grid)
    return g


def shortest_path(g: NavGraph, start: int, goal: int) -> PlannedPath | None:
    """Minimum-cost path by edge length; equal costs break lexicographically
    on the node-id sequence. None when unreachable."""
    if start >= g.node_count or goal >= g.node_count:
        raise ValueError("node id outside graph")
    if start == goal:
        return PlannedPath(
            waypoints=(g.positions[start],), node_ids=(start,), cost=0.0, reached_goal=True
        )
    heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (start,))]
    settled: set[int] = set()
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == goal:
            return PlannedPath(
                waypoints=tuple(g.positions[n] for n in path),
                node_ids=path,
                cost=cost,
                reached_goal=True,
            )
        for nbr in sorted(g.adjacency[node]):
            if nbr not in settled:
                heapq.heappush(heap, (cost + g.adjacency[node][nbr], path + (nbr,)))
    return None


def plan_to_waypoint(
    g: NavGraph,
    robot: RobotState,
    goal: tuple[float, float, float],
    vmap: VoxelMap,
    cfg: PlannerConfig,
    rng: np.random.Generator,
    grid: TraversabilityGrid | None = None,
    root: int = 0,
) -> PlannedPath:
    """Plan from the root node to the goal, expanding the graph as needed.

    While no node lies within the goal tolerance, the boundary node nearest
    the goal seeds another expansion, up to the replan cap; exhaustion returns
    the best partial path with reached_goal False. The graph is expanded in
    place. Goals outside the map raise ValueError.
    """
    ex, ey, _ = vmap.extent
    gx, gy = float(goal[0]), float(goal[1])
    if not (0 <= gx <= ex and 0 <= gy <= ey):
        raise ValueError(f"goal ({gx}, {gy}) outside map extent")
    grid = grid or TraversabilityGrid(vmap, cfg)

    def nearest_in_tolerance() -> int | None:
        best = None
        for node, pos in enumerate(g.positions):
            d = math.hypot(pos[0] - gx, pos[1] - gy)
            if d <= cfg.goal_tolerance and (best is None or (d, node) < best):
                best = (d, node)
        return best[1] if best else None

    iterations = 0
    used_centers: list[tuple[float, float]] = []
    spread = cfg.expansion_radius / 2  # keep replan seeds apart so coverage grows

    def unused(node: int) -> bool:
        px, py, _ = g.positions[node]
        return all(math.hypot(px - ux, py - uy) >= spread for ux, uy in used_centers)

    while True:
        target = nearest_in_tolerance()
        if target is not None:
            path = shortest_path(g, root, target)
            if path is not None:
                return path
        if iterations >= cfg.replan_cap:
            break
        candidates = [n for n in sorted(g.boundary_nodes) if unused(n)]
        if not candidates:
            candidates = [n for n in range(g.node_count) if unused(n)]
        if not candidates:
            candidates = list(range(g.node_count))
        seed_node = min(
            candidates,
            key=lambda n: (
                math.hypot(g.positions[n][0] - gx, g.positions[n][1] - gy),
                n,
            ),
        )
        used_centers.append(g.positions[seed_node][:2])
        expand_graph(g, g.positions[seed_node][:2], vmap, cfg, rng, grid)
        iterations += 1

    best_node = min(
        range(g.node_count),
        key=lambda n: (math.hypot(g.positions[n][0] - gx, g.positions[n][1] - gy), n),
    )
    partial = shortest_path(g, root, best_node)
    assert partial is not None  # every node is connected to the root
    return replace(partial, reached_goal=False)


# ---------------------------------------------------------------------------
# pure-pursuit path following


@dataclass(frozen=True)
class FollowResult:
    final_state: RobotState
    success: bool
    sim_time: float
    distance_to_goal: float


def follow_path(
    path: PlannedPath,
    robot: RobotState,
    *,
    speed: float = 1.0,
    lookahead: float = 0.6,
    dt: float = 0.05,
    success_tolerance: float = 0.3,
    stop_tolerance: float = 0.1,
    max_angular: float = 2.0,
    callback=None,
) -> FollowResult:
    """Track the path with pure pursuit on the unicycle model.

    Success means finishing within `success_tolerance` of the last waypoint
    inside a time budget of 3 * (cost / speed) + 10 seconds of simulated
    time. `callback(sim_t, state, progress)` fires at 10 Hz of simulated time.
    """
    if not path.waypoints:
        raise ValueError("cannot follow an empty path")
    pts = np.array([(w[0], w[1]) for w in path.waypoints])
    goal = pts[-1]
    budget = 3.0 * (path.cost / max(speed, 1e-9)) + 10.0

    seg_vecs = np.diff(pts, axis=0)
    seg_lens = np.hypot(seg_vecs[:, 0], seg_vecs[:, 1]) if len(pts) > 1 else np.zeros(0)
    cum = np.concatenate([[0.0], np.cumsum(seg_lens)])
    total = float(cum[-1])

    state = robot
    sim_t = 0.0
    progress = 0.0
    steps_per_event = max(int(round(0.1 / dt)), 1)
    step_count = 0

    def point_at(s: float) -> np.ndarray:
        if total == 0.0 or s <= 0:
            return pts[0]
        if s >= total:
            return pts[-1]
        idx = int(np.searchsorted(cum, s, side="right")) - 1
        idx = min(idx, len(seg_lens) - 1)
        frac = (s - cum[idx]) / seg_lens[idx] if seg_lens[idx] > 0 else 0.0
        return pts[idx] + frac * seg_vecs[idx]

    def advance_progress(s: float, px: float, py: float) -> float:
        if total == 0.0:
            return 0.0
        best_s = s
        best_d = None
        idx0 = max(int(np.searchsorted(cum, s, side="right")) - 1, 0)
        for idx in range(idx0, len(seg_lens)):
            if seg_lens[idx] == 0:
                continue
            v = seg_vecs[idx]
            w = np.array([px, py]) - pts[idx]
            t = float(np.dot(w, v) / (seg_lens[idx] ** 2))
            t = min(max(t, 0.0), 1.0)
            cand_s = cum[idx] + t * seg_lens[idx]
            if cand_s < s:
                continue
            proj = pts[idx] + t * v
            d = math.hypot(px - proj[0], py - proj[1])
            if best_d is None or d < best_d:
                best_d = d
                best_s = cand_s
            if cand_s - s > 2 * lookahead and best_d is not None:
                break
        return best_s

    while True:
        dist_goal = math.hypot(state.x - goal[0], state.y - goal[1])
        if dist_goal <= stop_tolerance:
            break
        if sim_t >= budget:
            break
        progress = advance_progress(progress, state.x, state.y)
        target = point_at(progress + lookahead)
        heading = math.atan2(target[1] - state.y, target[0] - state.x)
        alpha = _wrap_angle(heading - state.yaw)
        if abs(alpha) > math.pi / 2:
            v = 0.0
            w = math.copysign(max_angular, alpha)
        else:
            v = min(speed, max(0.5, dist_goal), state.spec.speed_limit)
            target_dist = math.hypot(target[0] - state.x, target[1] - state.y)
            if target_dist < 1e-6:
                w = 0.0
            else:
                curvature = 2.0 * math.sin(alpha) / target_dist
                w = max(-max_angular, min(max_angular, v * curvature))
        state = step_robot(state, v, w, dt)
        sim_t += dt
        step_count += 1
        if callback is not None and step_count % steps_per_event == 0:
            callback(sim_t, state, min(progress / total, 1.0) if total > 0 else 1.0)

    dist_goal = math.hypot(state.x - goal[0], state.y - goal[1])
    success = dist_goal <= success_tolerance and sim_t <= budget
    if callback is not None:
        callback(sim_t, state, 1.0 if success else (min(progress / total, 1.0) if total > 0 else 0.0))
    return FollowResult(
        final_state=state, success=success, sim_time=sim_t, distance_to_goal=dist_goal
    )


def _wrap_angle(angle: float) -> float:
    while angle > math.pi:
        angle -= 2 * math.pi
    while angle < -math.pi:
        angle += 2 * math.pi
    return angle
