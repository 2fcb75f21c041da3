"""Random small maps and the footprint-inflated grid-BFS reachability oracle.

Shared between the planner unit tests and the acceptance suite. Maps are flat
with full-height walls; corridors are either generously wide (>= 4x the robot
width) or fully sealed, so sampling coverage and grid reachability agree.
"""

from __future__ import annotations

from collections import deque

import numpy as np
from scipy import ndimage

from langnav.planner import PlannerConfig
from langnav.worldsim import VoxelMap


MAP_SIZE = 10.0
RESOLUTION = 0.1
WALL_HEIGHT_CELLS = 20  # 2 m


def _fill_wall(occ: np.ndarray, i0: int, i1: int, j0: int, j1: int) -> None:
    occ[max(i0, 0) : max(i1, 0), max(j0, 0) : max(j1, 0), 1:WALL_HEIGHT_CELLS] = True


def random_walled_map(rng: np.random.Generator) -> tuple[VoxelMap, bool]:
    """A bordered flat map with internal walls; returns (map, sealed_goal_area).

    When sealed_goal_area is True the far corner room is fully enclosed.
    """
    n = int(MAP_SIZE / RESOLUTION)
    occ = np.zeros((n, n, 30), dtype=bool)
    occ[:, :, 0] = True  # floor

    border = 2
    _fill_wall(occ, 0, n, 0, border)
    _fill_wall(occ, 0, n, n - border, n)
    _fill_wall(occ, 0, border, 0, n)
    _fill_wall(occ, n - border, n, 0, n)

    sealed = bool(rng.uniform() < 0.35)
    gap_cells = 20  # 2 m corridors
    n_walls = int(rng.integers(1, 4))
    for _ in range(n_walls):
        vertical = bool(rng.uniform() < 0.5)
        pos = int(rng.integers(25, n - 25))
        if vertical:
            gap_at = int(rng.integers(border + 5, n - border - 5 - gap_cells))
            _fill_wall(occ, pos, pos + 2, border, gap_at)
            _fill_wall(occ, pos, pos + 2, gap_at + gap_cells, n - border)
        else:
            gap_at = int(rng.integers(border + 5, n - border - 5 - gap_cells))
            _fill_wall(occ, border, gap_at, pos, pos + 2)
            _fill_wall(occ, gap_at + gap_cells, n - border, pos, pos + 2)

    if sealed:
        # enclose the far corner room completely
        room = int(rng.integers(20, 30))
        _fill_wall(occ, n - border - room - 2, n - border - room, n - border - room - 2, n)
        _fill_wall(occ, n - border - room - 2, n, n - border - room - 2, n - border - room)

    vmap = VoxelMap(resolution=RESOLUTION, dims=(n, n, 30), occupancy=occ)
    return vmap, sealed


def obstacle_grid(vmap: VoxelMap) -> np.ndarray:
    """2D obstacle mask: anything occupied above the floor layer."""
    return vmap.occupancy[:, :, 1:].any(axis=2)


def bfs_reachable(
    vmap: VoxelMap, start_xy, goal_xy, cfg: PlannerConfig, goal_tolerance: float | None = None
) -> bool:
    """Footprint-inflated 8-connected BFS; reachable when some free cell
    within the goal tolerance of the goal is connected to the start cell."""
    res = vmap.resolution
    obstacles = obstacle_grid(vmap)
    edt = ndimage.distance_transform_edt(~obstacles) * res
    free = edt > cfg.footprint_radius
    n_i, n_j = free.shape

    def cell(p):
        return (int(p[0] // res), int(p[1] // res))

    si, sj = cell(start_xy)
    if not free[si, sj]:
        return False
    tolerance = cfg.goal_tolerance if goal_tolerance is None else goal_tolerance
    goal_cells = set()
    gi, gj = cell(goal_xy)
    reach_cells = int(np.ceil(tolerance / res))
    for di in range(-reach_cells, reach_cells + 1):
        for dj in range(-reach_cells, reach_cells + 1):
            i, j = gi + di, gj + dj
            if 0 <= i < n_i and 0 <= j < n_j and free[i, j]:
                cx = (i + 0.5) * res
                cy = (j + 0.5) * res
                if (cx - goal_xy[0]) ** 2 + (cy - goal_xy[1]) ** 2 <= tolerance**2:
                    goal_cells.add((i, j))
    if not goal_cells:
        return False

    seen = np.zeros_like(free)
    queue = deque([(si, sj)])
    seen[si, sj] = True
    while queue:
        i, j = queue.popleft()
        if (i, j) in goal_cells:
            return True
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                ni, nj = i + di, j + dj
                if 0 <= ni < n_i and 0 <= nj < n_j and free[ni, nj] and not seen[ni, nj]:
                    seen[ni, nj] = True
                    queue.append((ni, nj))
    return False


def random_free_point(rng, vmap: VoxelMap, cfg: PlannerConfig, margin: float = 0.6):
    """A point comfortably clear of obstacles (used for starts and goals)."""
    res = vmap.resolution
    obstacles = obstacle_grid(vmap)
    edt = ndimage.distance_transform_edt(~obstacles) * res
    good = np.argwhere(edt > margin)
    idx = good[int(rng.integers(0, len(good)))]
    return ((idx[0] + 0.5) * res, (idx[1] + 0.5) * res)
