"""Panorama layout, pixel-to-ray, voxel ray casting, waypoint emplacement."""

from __future__ import annotations

import math

import numpy as np
import pytest

from langnav.projection import (
    PadColumnError,
    PanoramaLayout,
    Ray,
    assemble_representation,
    emplace_waypoint,
    pixel_to_ray,
    raycast_first_hit,
)
from langnav.worldsim import RobotState, VoxelMap, build_voxel_map, render_views

from conftest import make_scene, obj


def empty_voxel_map(extent=(10.0, 1.0, 1.0), resolution=1.0) -> VoxelMap:
    dims = tuple(int(round(e / resolution)) for e in extent)
    return VoxelMap(
        resolution=resolution, dims=dims, occupancy=np.zeros(dims, dtype=bool)
    )


class TestLayout:
    def test_offsets(self):
        layout = PanoramaLayout()
        assert layout.total_width == 1960
        assert layout.offset("left") == 0
        assert layout.offset("front") == 660
        assert layout.offset("right") == 1320

    def test_front_rect_remap(self):
        layout = PanoramaLayout()
        assert layout.offset("front") + 100 == 760
        assert layout.offset("front") + 200 == 860

    def test_pad_column_maps_to_no_frame(self):
        layout = PanoramaLayout()
        assert layout.frame_at(650) is None
        assert layout.frame_at(1305) is None

    def test_decomposition_inverts_assembly_for_non_pad_columns(self):
        layout = PanoramaLayout()
        for frame in ("left", "front", "right"):
            off = layout.offset(frame)
            for local in (0.0, 1.5, 320.0, 639.9):
                resolved = layout.frame_at(off + local)
                assert resolved is not None
                assert resolved[0] == frame
                assert resolved[1] == pytest.approx(local)

    def test_panorama_1000_is_front_340(self):
        layout = PanoramaLayout()
        assert layout.frame_at(1000) == ("front", 340.0)


class TestAssemble:
    def test_mode_a_and_b_shapes(self, robot_at_origin):
        scene = make_scene(objects=[obj("crate", [8.5, 4.5, 0.1, 9.0, 5.5, 1.0])])
        views = render_views(scene, robot_at_origin(scene))
        pano = assemble_representation(views, "A")
        assert pano.width == 1960
        merged = assemble_representation(views, "B")
        assert merged.width == 640
        with pytest.raises(ValueError):
            assemble_representation(views, "C")


class TestPixelToRay:
    def test_front_center_is_principal_axis(self):
        scene = make_scene()
        robot = RobotState(5.0, 5.0, 0.0)
        ray = pixel_to_ray(320, 240, "front", robot, scene)
        assert ray.direction == pytest.approx([1.0, 0.0, 0.0])

    def test_front_right_edge_is_minus_45_degrees(self):
        scene = make_scene()
        robot = RobotState(5.0, 5.0, 0.0)
        ray = pixel_to_ray(640, 240, "front", robot, scene)
        assert ray.direction == pytest.approx([math.sqrt(2) / 2, -math.sqrt(2) / 2, 0.0])

    def test_panorama_decomposition(self):
        scene = make_scene()
        robot = RobotState(5.0, 5.0, 0.0)
        via_pano = pixel_to_ray(1000, 240, "panorama", robot, scene)
        direct = pixel_to_ray(340, 240, "front", robot, scene)
        assert via_pano.direction == pytest.approx(direct.direction)

    def test_pad_column_errors(self):
        scene = make_scene()
        robot = RobotState(5.0, 5.0, 0.0)
        with pytest.raises(PadColumnError, match="unmapped panorama column"):
            pixel_to_ray(650, 240, "panorama", robot, scene)

    def test_left_camera_points_left(self):
        scene = make_scene()
        robot = RobotState(5.0, 5.0, 0.0)
        ray = pixel_to_ray(320, 240, "left", robot, scene)
        assert ray.direction == pytest.approx([0.0, 1.0, 0.0])

    def test_robot_yaw_rotates_rays(self):
        scene = make_scene()
        robot = RobotState(5.0, 5.0, math.pi / 2)
        ray = pixel_to_ray(320, 240, "front", robot, scene)
        assert ray.direction == pytest.approx([0.0, 1.0, 0.0])


class TestRaycast:
    def test_axis_aligned_hit(self):
        vmap = empty_voxel_map()
        occ = vmap.occupancy.copy()
        occ[3, 0, 0] = True
        vmap = VoxelMap(resolution=1.0, dims=vmap.dims, occupancy=occ)
        ray = Ray(origin=np.array([0.5, 0.5, 0.5]), direction=np.array([1.0, 0.0, 0.0]))
        result = raycast_first_hit(ray, vmap)
        assert result.hit
        assert result.voxel == (3, 0, 0)
        assert result.point == pytest.approx((3.0, 0.5, 0.5), abs=1e-6)

    def test_empty_map_boundary_exit(self):
        vmap = empty_voxel_map()
        ray = Ray(origin=np.array([0.5, 0.5, 0.5]), direction=np.array([1.0, 0.0, 0.0]))
        result = raycast_first_hit(ray, vmap, max_range=30.0)
        assert not result.hit
        assert result.point == pytest.approx((10.0, 0.5, 0.5), abs=1e-6)

    def test_origin_outside_map_errors(self):
        vmap = empty_voxel_map()
        ray = Ray(origin=np.array([-1.0, 0.5, 0.5]), direction=np.array([1.0, 0.0, 0.0]))
        with pytest.raises(ValueError, match="outside map"):
            raycast_first_hit(ray, vmap)

    def test_traversal_against_marching_oracle(self):
        # smaller version of the acceptance check (full run lives there)
        mismatches = run_marching_comparison(n_maps=4, rays_per_map=50, seed=99)
        assert mismatches == 0

    def test_consecutive_voxels_differ_by_one_axis_step(self):
        rng = np.random.default_rng(42)
        vmap = random_voxel_map(rng, occupancy_p=0.0)
        for _ in range(20):
            origin = rng.uniform(0.5, 5.5, 3)
            direction = rng.normal(size=3)
            visited = trace_voxels(origin, direction, vmap)
            for a, b in zip(visited, visited[1:]):
                diff = [abs(x - y) for x, y in zip(a, b)]
                assert sorted(diff) == [0, 0, 1]


def random_voxel_map(rng, extent=(6.0, 6.0, 6.0), resolution=0.1, occupancy_p=0.01) -> VoxelMap:
    """Sparse random occupancy. Density is kept moderate so that thin
    corner-graze chords (which the fixed-step oracle cannot see) stay within
    the documented 0.1% exclusion budget."""
    dims = tuple(int(round(e / resolution)) for e in extent)
    occ = rng.uniform(size=dims) < occupancy_p
    # keep a bubble around typical origins free so rays start in open space
    occ[25:35, 25:35, 25:35] = False
    return VoxelMap(resolution=resolution, dims=dims, occupancy=occ)


def trace_voxels(origin, direction, vmap: VoxelMap) -> list[tuple[int, int, int]]:
    """Instrumented re-walk used by the one-axis-step property."""
    direction = np.asarray(direction, float)
    direction = direction / np.linalg.norm(direction)
    res = vmap.resolution
    pos = np.asarray(origin, float) + 1e-9
    ijk = [int(pos[a] // res) for a in range(3)]
    visited = [tuple(ijk)]
    t_max, t_delta, step = [], [], []
    for a in range(3):
        if direction[a] > 0:
            step.append(1)
            t_max.append(((ijk[a] + 1) * res - pos[a]) / direction[a])
            t_delta.append(res / direction[a])
        elif direction[a] < 0:
            step.append(-1)
            t_max.append((ijk[a] * res - pos[a]) / direction[a])
            t_delta.append(-res / direction[a])
        else:
            step.append(0)
            t_max.append(math.inf)
            t_delta.append(math.inf)
    for _ in range(50):
        axis = int(np.argmin(t_max))
        ijk[axis] += step[axis]
        t_max[axis] += t_delta[axis]
        if not (0 <= ijk[axis] < vmap.dims[axis]):
            break
        visited.append(tuple(ijk))
    return visited


def marching_first_hit(origin, direction, vmap: VoxelMap, max_range: float):
    """Small-step marching oracle: sample the ray every resolution/100."""
    direction = np.asarray(direction, float)
    direction = direction / np.linalg.norm(direction)
    origin = np.asarray(origin, float) + 1e-9  # same corner nudge as the unit
    step = vmap.resolution / 100.0
    ex, ey, ez = vmap.extent
    limit = min(max_range, math.dist((0, 0, 0), (ex, ey, ez)) + 1.0)
    ts = np.arange(0.0, limit, step)
    pts = origin[None, :] + ts[:, None] * direction[None, :]
    inside = (
        (pts[:, 0] >= 0)
        & (pts[:, 0] < ex)
        & (pts[:, 1] >= 0)
        & (pts[:, 1] < ey)
        & (pts[:, 2] >= 0)
        & (pts[:, 2] < ez)
    )
    idx = np.floor(pts / vmap.resolution).astype(int)
    for i in range(len(ts)):
        if not inside[i]:
            if ts[i] > 0:
                return None  # left the map
            continue
        if vmap.occupancy[idx[i, 0], idx[i, 1], idx[i, 2]]:
            return tuple(int(v) for v in idx[i])
        if ts[i] > max_range:
            return None
    return None


def chord_length(origin, direction, voxel, vmap: VoxelMap) -> float:
    """Length of the ray's chord through a voxel (for graze classification)."""
    direction = np.asarray(direction, float)
    direction = direction / np.linalg.norm(direction)
    origin = np.asarray(origin, float)
    res = vmap.resolution
    lo = np.array(voxel) * res
    hi = lo + res
    t0, t1 = -math.inf, math.inf
    for a in range(3):
        if abs(direction[a]) < 1e-15:
            if origin[a] < lo[a] or origin[a] > hi[a]:
                return 0.0
            continue
        ta = (lo[a] - origin[a]) / direction[a]
        tb = (hi[a] - origin[a]) / direction[a]
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
    return max(t1 - t0, 0.0)


def run_marching_comparison(n_maps: int, rays_per_map: int, seed: int) -> int:
    """Compare DDA against the marching oracle; returns real mismatches.

    Corner-grazing chords shorter than two oracle steps are excluded, per the
    documented epsilon policy; the exclusion count must stay under 0.1%.
    """
    rng = np.random.default_rng(seed)
    mismatches = 0
    excluded = 0
    total = 0
    for _ in range(n_maps):
        vmap = random_voxel_map(rng)
        for _ in range(rays_per_map):
            origin = rng.uniform(2.6, 3.4, 3)
            direction = rng.normal(size=3)
            if np.linalg.norm(direction) < 1e-9:
                continue
            total += 1
            ray = Ray(origin=origin.copy(), direction=direction.copy())
            result = raycast_first_hit(ray, vmap, max_range=30.0)
            oracle = marching_first_hit(origin, direction, vmap, max_range=30.0)
            dda = result.voxel if result.hit else None
            if dda == oracle:
                continue
            # disagreement: classify corner grazes (chord < 2 oracle steps)
            step = vmap.resolution / 100.0
            graze = result.corner_graze
            if dda is not None and chord_length(origin, direction, dda, vmap) < 2 * step:
                graze = True
            if oracle is not None and chord_length(origin, direction, oracle, vmap) < 2 * step:
                graze = True
            if graze:
                excluded += 1
            else:
                mismatches += 1
    assert excluded <= max(1, int(0.001 * total))
    return mismatches


class TestWaypoint:
    def _floor_map(self) -> VoxelMap:
        scene = make_scene(extent=(10, 10, 3), resolution=0.1)
        return build_voxel_map(scene)

    def test_standoff_pullback(self):
        vmap = self._floor_map()
        occ = vmap.occupancy.copy()
        occ[30, 5, 8] = True  # target voxel at x [3.0, 3.1)
        vmap = VoxelMap(resolution=0.1, dims=vmap.dims, occupancy=occ)
        ray = Ray(origin=np.array([0.5, 0.55, 0.85]), direction=np.array([1.0, 0.0, 0.0]))
        result = raycast_first_hit(ray, vmap)
        assert result.hit
        wp = emplace_waypoint(result, ray, vmap, standoff=0.75)
        assert wp.status == "hit"
        assert wp.position[0] == pytest.approx(3.0 - 0.75, abs=1e-6)
        assert wp.position[2] == pytest.approx(0.1)  # dropped onto the floor
        assert wp.standoff_applied == 0.75

    def test_zero_standoff_keeps_entry_column(self):
        vmap = self._floor_map()
        occ = vmap.occupancy.copy()
        occ[30, 5, 8] = True
        vmap = VoxelMap(resolution=0.1, dims=vmap.dims, occupancy=occ)
        ray = Ray(origin=np.array([0.5, 0.55, 0.85]), direction=np.array([1.0, 0.0, 0.0]))
        result = raycast_first_hit(ray, vmap)
        wp = emplace_waypoint(result, ray, vmap, standoff=0.0)
        assert wp.position[0] == pytest.approx(result.point[0], abs=1e-9)
        assert wp.position[1] == pytest.approx(result.point[1], abs=1e-9)

    def test_boundary_result_keeps_status(self):
        vmap = self._floor_map()
        ray = Ray(origin=np.array([5.0, 5.0, 1.5]), direction=np.array([1.0, 0.0, 0.0]))
        result = raycast_first_hit(ray, vmap)
        assert not result.hit
        wp = emplace_waypoint(result, ray, vmap)
        assert wp.status == "map-boundary"
        assert wp.position[0] == pytest.approx(10.0, abs=1e-6)

    def test_pullback_clamped_inside_map(self):
        vmap = self._floor_map()
        occ = vmap.occupancy.copy()
        occ[5, 50, 8] = True
        vmap = VoxelMap(resolution=0.1, dims=vmap.dims, occupancy=occ)
        # target nearer than the standoff with the camera near the map edge:
        # the pullback overshoots past the origin and out of the map
        ray = Ray(origin=np.array([0.3, 5.05, 0.85]), direction=np.array([1.0, 0.0, 0.0]))
        result = raycast_first_hit(ray, vmap)
        assert result.hit
        assert result.point[0] == pytest.approx(0.5, abs=1e-6)
        wp = emplace_waypoint(result, ray, vmap, standoff=0.75)
        assert wp.clamped
        ex, _, _ = vmap.extent
        assert 0 < wp.position[0] < ex


class TestRenderRaycastRoundTrip:
    def test_object_center_pixel_recovers_object_voxel(self, robot_at_origin):
        scene = make_scene(
            objects=[obj("crate", [8.6, 4.6, 0.1, 9.4, 5.4, 1.2])]
        )
        robot = robot_at_origin(scene)
        views = render_views(scene, robot)
        rect = views.frame("front").rects[0]
        u = (rect.left + rect.right) / 2
        v = (rect.lower + rect.upper) / 2
        ray = pixel_to_ray(u, v, "front", robot, scene)
        vmap = build_voxel_map(scene)
        result = raycast_first_hit(ray, vmap)
        assert result.hit
        crate = scene.objects[0].box
        cx, cy, cz = (np.array(result.voxel) + 0.5) * vmap.resolution
        assert crate.x0 <= cx <= crate.x1
        assert crate.y0 <= cy <= crate.y1
        assert crate.z0 <= cz <= crate.z1

    def test_clipping_scene_hits_nearer_object(self, robot_at_origin):
        # a tall thin post between the camera and the crate's center pixel
        scene = make_scene(
            objects=[
                obj("post", [7.0, 4.95, 0.0, 7.1, 5.05, 2.0]),
                obj("crate", [8.6, 4.6, 0.1, 9.4, 5.4, 1.2]),
            ]
        )
        robot = robot_at_origin(scene)
        views = render_views(scene, robot)
        crate_rect = [r for r in views.frame("front").rects if r.object_id == "crate"][0]
        u = (crate_rect.left + crate_rect.right) / 2
        v = (crate_rect.lower + crate_rect.upper) / 2
        ray = pixel_to_ray(u, v, "front", robot, scene)
        vmap = build_voxel_map(scene)
        result = raycast_first_hit(ray, vmap)
        assert result.hit
        post = scene.objects[0].box
        cx, cy, cz = (np.array(result.voxel) + 0.5) * vmap.resolution
        assert post.x0 <= cx <= post.x1  # the ray clipped the closer object
