#!/usr/bin/env python3
"""Build the bundled scenes, program fixtures, and simulation corpora.

Object placements are specified as (frame, pixel column, distance) triples and
solved against the real camera model so that projected box centers land on the
requested columns. The classroom scene is deliberately cross-frame: its
outlets, chairs, backpacks, and cones are spread over all three cameras with
frame-local column order different from the angular (panorama) order, which is
what makes representation B's merged lists pick the wrong object.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from langnav.worldsim import (  # noqa: E402
    Box3,
    CameraConfig,
    CameraModel,
    FRAME_YAW_OFFSETS,
    project_box,
    scene_from_dict,
)

DATA = ROOT / "src" / "langnav" / "data"

FRAME_BEARINGS = {"left": 90.0, "front": 0.0, "right": -90.0}


def solve_placement(robot_xy, frame, u, distance, z_center, half, camera_z=0.8):
    """World box whose projected center lands on column u of the frame."""
    camera = CameraModel(
        frame=frame,
        position=(robot_xy[0], robot_xy[1], camera_z),
        yaw=FRAME_YAW_OFFSETS[frame],
        config=CameraConfig(),
    )
    bearing = FRAME_BEARINGS[frame] + math.degrees(math.atan((320.0 - u) / 320.0))
    for _ in range(60):
        x = robot_xy[0] + distance * math.cos(math.radians(bearing))
        y = robot_xy[1] + distance * math.sin(math.radians(bearing))
        box = [x - half[0], y - half[1], z_center - half[2], x + half[0], y + half[1], z_center + half[2]]
        rect = project_box(camera, Box3(*box))
        assert rect is not None, f"placement for u={u} fell outside the {frame} view"
        err = u - (rect[0] + rect[2]) / 2
        if abs(err) < 1e-9:
            break
        bearing -= math.degrees(math.atan(err / camera.fx))
    return [round(v, 6) for v in box]


def placed(oid, label, frame, u, dist, z0, z1, hx, hy, robot_xy, **extra):
    """Scene object resting between z0..z1, centered on column u."""
    z_c = (z0 + z1) / 2
    box = solve_placement(robot_xy, frame, u, dist, z_c, (hx, hy, (z1 - z0) / 2))
    entry = {"id": oid, "label": label, "box": box}
    entry.update(extra)
    return entry


def stacked(oid, label, base_entry, hx, hy, hz, **extra):
    """Object resting on top of another object's box, support contact."""
    bx = base_entry["box"]
    cx = (bx[0] + bx[3]) / 2
    cy = (bx[1] + bx[4]) / 2
    z0 = bx[5]
    box = [round(cx - hx, 6), round(cy - hy, 6), round(z0, 6), round(cx + hx, 6), round(cy + hy, 6), round(z0 + 2 * hz, 6)]
    entry = {"id": oid, "label": label, "box": box, "support_of": base_entry["id"]}
    entry.update(extra)
    return entry


# ---------------------------------------------------------------------------
# scenes


def theater_scene():
    r = (2.5, 5.0)
    objects = [
        placed("fire_extinguisher", "fire extinguisher", "front", 260, 4.0, 0.2, 0.7, 0.10, 0.12, r,
               synonyms=["extinguisher"], attributes=["red"]),
        {"id": "stage_wall", "label": "wall", "box": [8.0, 2.0, 0.0, 8.3, 4.5, 2.5]},
        {"id": "vacuum", "label": "vacuum", "box": [9.0, 3.0, 0.1, 9.4, 3.5, 0.6],
         "synonyms": ["vacuum cleaner"]},
        placed("mop", "mop", "front", 470, 4.5, 0.1, 1.2, 0.08, 0.08, r,
               synonyms=["cleaning machine"]),
        placed("table", "table", "front", 420, 5.0, 0.1, 0.8, 0.5, 0.7, r),
        placed("chair_1", "chair", "front", 180, 3.6, 0.1, 0.9, 0.25, 0.25, r),
        placed("chair_blue", "chair", "front", 560, 3.2, 0.1, 0.9, 0.25, 0.25, r,
               attributes=["blue"]),
        placed("chair_black", "chair", "left", 300, 3.5, 0.1, 0.9, 0.25, 0.25, r,
               attributes=["black"]),
        placed("backpack_red", "backpack", "front", 340, 3.0, 0.1, 0.5, 0.18, 0.18, r,
               synonyms=["bag"], attributes=["red"]),
        placed("bucket", "bucket", "front", 80, 4.6, 0.1, 0.5, 0.15, 0.15, r,
               attributes=["orange"]),
        placed("helmet", "helmet", "right", 320, 3.0, 0.1, 0.4, 0.12, 0.12, r),
    ]
    chair_1 = next(o for o in objects if o["id"] == "chair_1")
    objects.append(
        stacked("backpack_black", "backpack", chair_1, 0.15, 0.15, 0.15,
                synonyms=["bag"], attributes=["black"])
    )
    return {
        "name": "theater",
        "map_extent": [14.0, 10.0, 3.0],
        "voxel_resolution": 0.1,
        "terrain": "flat",
        "robot_start": [2.5, 5.0, 0.0],
        "objects": objects,
        "qa_fixtures": [
            {"object_id": "backpack_red", "question": "What is the color?", "answer": "red"},
            {"object_id": None, "question": "What can carry water?", "answer": "bucket"},
        ],
        "detector_noise": {"miss_prob": 0.0, "confusions": [], "seed": 0},
    }


def lobby_scene():
    r = (2.5, 5.0)
    objects = [
        placed("trash_bag", "trash bag", "front", 150, 3.4, 0.1, 0.5, 0.2, 0.2, r),
        placed("broom", "broom", "front", 80, 4.2, 0.1, 1.3, 0.07, 0.07, r),
        placed("monitor_small", "monitor", "front", 300, 4.5, 0.9, 1.1, 0.05, 0.12, r,
               synonyms=["screen"], attributes=["small"]),
        placed("monitor_large", "monitor", "front", 480, 4.0, 0.8, 1.3, 0.05, 0.3, r,
               synonyms=["screen"], attributes=["large"]),
        placed("table_1", "table", "front", 240, 4.8, 0.1, 0.8, 0.45, 0.6, r),
        placed("fire_extinguisher", "fire extinguisher", "front", 580, 3.6, 0.2, 0.7, 0.10, 0.12, r,
               synonyms=["extinguisher"], attributes=["red"]),
        placed("chair_4", "chair", "left", 250, 3.0, 0.1, 0.9, 0.25, 0.25, r),
    ]
    table = next(o for o in objects if o["id"] == "table_1")
    bottle = stacked("bottle", "bottle", table, 0.07, 0.07, 0.15, synonyms=["water bottle"])
    # rest the bottle near the table's camera-facing edge so its center ray
    # clears the tabletop
    shift = 0.38
    bx = bottle["box"]
    bottle["box"] = [round(bx[0] - shift, 6), bx[1], bx[2], round(bx[3] - shift, 6), bx[4], bx[5]]
    objects.append(bottle)
    return {
        "name": "lobby",
        "map_extent": [14.0, 10.0, 3.0],
        "voxel_resolution": 0.1,
        "terrain": "flat",
        "robot_start": [2.5, 5.0, 0.0],
        "objects": objects,
        "qa_fixtures": [],
        "detector_noise": {"miss_prob": 0.0, "confusions": [], "seed": 0},
    }


def outdoor_scene():
    r = (3.0, 8.0)
    objects = [
        placed("fire_hydrant", "fire hydrant", "front", 200, 5.0, 0.1, 0.8, 0.15, 0.15, r,
               synonyms=["hydrant"], attributes=["red"]),
        placed("stop_sign", "stop sign", "front", 420, 6.5, 1.5, 2.4, 0.05, 0.35, r,
               attributes=["red"]),
        placed("cone_a", "cone", "front", 260, 4.0, 0.1, 0.55, 0.14, 0.14, r,
               synonyms=["conical traffic delineator"], attributes=["orange"]),
        placed("cone_b", "cone", "front", 310, 4.2, 0.1, 0.55, 0.14, 0.14, r,
               synonyms=["conical traffic delineator"], attributes=["orange"]),
        placed("cone_c", "cone", "front", 360, 4.4, 0.1, 0.55, 0.14, 0.14, r,
               synonyms=["conical traffic delineator"], attributes=["orange"]),
        placed("skateboard", "skateboard", "front", 520, 3.6, 0.1, 0.25, 0.35, 0.12, r),
        placed("bike", "bike", "left", 280, 4.0, 0.1, 1.1, 0.5, 0.15, r,
               synonyms=["bicycle"]),
        placed("bench", "bench", "right", 300, 4.5, 0.1, 0.6, 0.3, 0.9, r),
        placed("tree", "tree", "front", 40, 7.0, 0.1, 3.5, 0.3, 0.3, r),
        placed("bike_rack", "bike rack", "left", 480, 5.0, 0.1, 0.9, 0.5, 0.2, r),
    ]
    return {
        "name": "outdoor",
        "map_extent": [20.0, 16.0, 4.0],
        "voxel_resolution": 0.1,
        "terrain": "flat",
        "robot_start": [3.0, 8.0, 0.0],
        "objects": objects,
        "qa_fixtures": [],
        "detector_noise": {"miss_prob": 0.0, "confusions": [], "seed": 0},
    }


def courtyard_scene():
    r = (2.5, 6.0)
    objects = [
        placed("wagon", "wagon", "front", 210, 4.2, 0.1, 0.6, 0.35, 0.25, r,
               attributes=["red"]),
        placed("garbage_can_left", "garbage can", "front", 240, 5.0, 0.1, 1.0, 0.25, 0.25, r,
               synonyms=["trash can", "bin"]),
        placed("garbage_can_right", "garbage can", "front", 420, 5.0, 0.1, 1.0, 0.25, 0.25, r,
               synonyms=["trash can", "bin"]),
        placed("bench_1", "bench", "front", 520, 4.4, 0.1, 0.6, 0.3, 0.8, r),
        placed("bench_2", "bench", "left", 350, 4.0, 0.1, 0.6, 0.3, 0.8, r),
        placed("stairs", "stairs", "front", 110, 6.0, 0.1, 1.3, 0.5, 0.9, r,
               synonyms=["staircase", "steps"]),
        placed("door", "door", "front", 600, 6.5, 0.1, 2.2, 0.06, 0.5, r),
        placed("picnic_table", "picnic table", "right", 280, 4.1, 0.1, 0.8, 0.5, 0.8, r,
               synonyms=["table"]),
    ]
    bench_1 = next(o for o in objects if o["id"] == "bench_1")
    container = stacked("water_container", "water container", bench_1, 0.12, 0.12, 0.175,
                        synonyms=["water jug", "jug"])
    # keep it near the camera-facing edge of the bench
    bx = container["box"]
    container["box"] = [round(bx[0] - 0.15, 6), bx[1], bx[2], round(bx[3] - 0.15, 6), bx[4], bx[5]]
    objects.append(container)
    return {
        "name": "courtyard",
        "map_extent": [16.0, 12.0, 3.0],
        "voxel_resolution": 0.1,
        "terrain": "flat",
        "robot_start": [2.5, 6.0, 0.0],
        "objects": objects,
        "qa_fixtures": [],
        "detector_noise": {"miss_prob": 0.0, "confusions": [], "seed": 0},
    }


def classroom_scene():
    r = (6.0, 6.0)
    objects = [
        # outlets: frame-local column order (front 70, right 300, left 570)
        # differs from angular order (left, front, right)
        placed("outlet_left", "outlet", "left", 570, 4.0, 0.68, 0.92, 0.12, 0.12, r,
               synonyms=["power outlet", "electrical outlet"]),
        placed("outlet_front", "outlet", "front", 70, 3.8, 0.68, 0.92, 0.12, 0.12, r,
               synonyms=["power outlet", "electrical outlet"]),
        placed("outlet_right", "outlet", "right", 300, 4.2, 0.68, 0.92, 0.12, 0.12, r,
               synonyms=["power outlet", "electrical outlet"]),
        placed("backpack_red", "backpack", "front", 400, 3.6, 0.1, 0.5, 0.18, 0.18, r,
               synonyms=["bag"], attributes=["red"]),
        placed("backpack_black_left", "backpack", "left", 500, 3.9, 0.1, 0.5, 0.18, 0.18, r,
               synonyms=["bag"], attributes=["black"]),
        placed("backpack_black_right", "backpack", "right", 200, 4.1, 0.1, 0.5, 0.18, 0.18, r,
               synonyms=["bag"], attributes=["black"]),
        placed("chair_left", "chair", "left", 450, 4.3, 0.1, 0.9, 0.25, 0.25, r),
        placed("chair_front", "chair", "front", 250, 3.7, 0.1, 0.9, 0.25, 0.25, r),
        placed("chair_right", "chair", "right", 350, 4.0, 0.1, 0.9, 0.25, 0.25, r),
        placed("cone_left", "cone", "left", 300, 3.6, 0.1, 0.54, 0.14, 0.14, r,
               synonyms=["conical traffic delineator"], attributes=["orange"]),
        placed("cone_front", "cone", "front", 460, 3.4, 0.1, 0.54, 0.14, 0.14, r,
               synonyms=["conical traffic delineator"], attributes=["orange"]),
        placed("cone_right", "cone", "right", 150, 4.4, 0.1, 0.54, 0.14, 0.14, r,
               synonyms=["conical traffic delineator"], attributes=["orange"]),
        placed("whiteboard", "whiteboard", "front", 544, 5.5, 0.75, 1.65, 0.05, 0.6, r),
        placed("trash_can", "trash can", "right", 500, 3.2, 0.1, 0.9, 0.22, 0.22, r,
               synonyms=["garbage can", "bin"]),
        placed("broom", "broom", "left", 150, 3.4, 0.1, 1.3, 0.07, 0.07, r),
        placed("wagon", "wagon", "front", 170, 4.6, 0.1, 0.6, 0.35, 0.25, r),
        placed("paper_towels", "paper towels", "right", 420, 3.8, 0.75, 1.05, 0.12, 0.12, r,
               synonyms=["paper towel roll"]),
    ]
    return {
        "name": "classroom",
        "map_extent": [12.0, 12.0, 3.0],
        "voxel_resolution": 0.1,
        "terrain": "flat",
        "robot_start": [6.0, 6.0, 0.0],
        "objects": objects,
        "qa_fixtures": [
            {"object_id": "backpack_red", "question": "What is the color?", "answer": "red"},
            {"object_id": None, "question": "Where can I charge my phone?", "answer": "outlet"},
        ],
        "detector_noise": {"miss_prob": 0.0, "confusions": [], "seed": 0},
    }


# ---------------------------------------------------------------------------
# fixture programs


def nav_return(var: str) -> str:
    return (
        f"    inputs = ({var}.horizontal_center, {var}.vertical_center)\n"
        f"    return {{'function': 'navigate_to_object', 'inputs': inputs, "
        f"'box': [{var}.left, {var}.lower, {var}.right, {var}.upper]}}\n"
    )


def simple_find(query: str, error: str) -> str:
    return (
        "def execute_command(image):\n"
        "    image_patch = ImagePatch(image)\n"
        f"    target_patches = image_patch.find('{query}')\n"
        "    if len(target_patches) == 0:\n"
        f"        return {{'function': 'None', 'error': '{error}'}}\n"
        "    target = target_patches[0]\n" + nav_return("target")
    )


def sorted_pick(query: str, index: str, error: str) -> str:
    return (
        "def execute_command(image):\n"
        "    image_patch = ImagePatch(image)\n"
        f"    target_patches = image_patch.find('{query}')\n"
        "    if len(target_patches) == 0:\n"
        f"        return {{'function': 'None', 'error': '{error}'}}\n"
        "    target_patches.sort(key=lambda x: x.horizontal_center)\n"
        f"    target = target_patches[{index}]\n" + nav_return("target")
    )


def verified_pick(query: str, prop: str, error: str) -> str:
    return (
        "def execute_command(image):\n"
        "    image_patch = ImagePatch(image)\n"
        f"    candidate_patches = image_patch.find('{query}')\n"
        "    matching_patches = []\n"
        "    for patch in candidate_patches:\n"
        f"        if patch.verify_property('{query}', '{prop}'):\n"
        "            matching_patches.append(patch)\n"
        "    if len(matching_patches) == 0:\n"
        f"        return {{'function': 'None', 'error': '{error}'}}\n"
        "    target = matching_patches[0]\n" + nav_return("target")
    )


def multi_find(queries: list[str], error: str) -> str:
    names = ", ".join(f"'{q}'" for q in queries)
    return (
        "def execute_command(image):\n"
        "    image_patch = ImagePatch(image)\n"
        "    candidate_patches = []\n"
        f"    for name in [{names}]:\n"
        "        found = image_patch.find(name)\n"
        "        for patch in found:\n"
        "            candidate_patches.append(patch)\n"
        "    if len(candidate_patches) == 0:\n"
        f"        return {{'function': 'None', 'error': '{error}'}}\n"
        "    target = candidate_patches[0]\n" + nav_return("target")
    )


SECOND_FLOOR = (
    "def execute_command(image):\n"
    "    floor_patches = ImagePatch(image).find('floor')\n"
    "    floor_patches.sort(key=lambda x: x.vertical_center)\n"
    "    if len(floor_patches) < 2:\n"
    "        return {'function': 'None', 'error': 'Image does not contain at least two floors.'}\n"
    "    second_floor_patch = floor_patches[1]\n" + nav_return("second_floor_patch")
)

def on_top_pick(base: str, item: str, pick_base: bool, error: str, item_filter_prop: str | None = None) -> str:
    """Relational fixture: an item resting on a base; navigate to base or item."""
    lines = [
        "def execute_command(image):",
        "    image_patch = ImagePatch(image)",
        f"    base_patches = image_patch.find('{base}')",
        f"    item_patches = image_patch.find('{item}')",
    ]
    if item_filter_prop:
        lines += [
            "    filtered_items = []",
            "    for patch in item_patches:",
            f"        if patch.verify_property('{item}', '{item_filter_prop}'):",
            "            filtered_items.append(patch)",
            "    item_patches = filtered_items",
        ]
    pick = "base" if pick_base else "item"
    lines += [
        "    for base in base_patches:",
        "        for item in item_patches:",
        "            if item.vertical_center > base.vertical_center and base.overlaps_with(item.left, item.lower, item.right, item.upper):",
        f"                inputs = ({pick}.horizontal_center, {pick}.vertical_center)",
        f"                return {{'function': 'navigate_to_object', 'inputs': inputs, 'box': [{pick}.left, {pick}.lower, {pick}.right, {pick}.upper]}}",
        f"    return {{'function': 'None', 'error': '{error}'}}",
        "",
    ]
    return "\n".join(lines)


def bare_pick(base: str, item: str, error: str) -> str:
    """Pick the base object with nothing resting on it."""
    lines = [
        "def execute_command(image):",
        "    image_patch = ImagePatch(image)",
        f"    base_patches = image_patch.find('{base}')",
        f"    item_patches = image_patch.find('{item}')",
        "    if len(base_patches) == 0:",
        f"        return {{'function': 'None', 'error': '{error}'}}",
        "    empty_patches = []",
        "    for base in base_patches:",
        "        occupied = False",
        "        for item in item_patches:",
        "            if item.vertical_center > base.vertical_center and base.overlaps_with(item.left, item.lower, item.right, item.upper):",
        "                occupied = True",
        "        if not occupied:",
        "            empty_patches.append(base)",
        "    if len(empty_patches) == 0:",
        f"        return {{'function': 'None', 'error': '{error}'}}",
        "    target = empty_patches[0]",
        nav_return("target").rstrip(),
        "",
    ]
    return "\n".join(lines)


SMALLEST_MONITOR = (
    "def execute_command(image):\n"
    "    image_patch = ImagePatch(image)\n"
    "    monitor_patches = image_patch.find('monitor')\n"
    "    if len(monitor_patches) == 0:\n"
    "        return {'function': 'None', 'error': 'No monitor found.'}\n"
    "    monitor_patches.sort(key=lambda x: x.width * x.height)\n"
    "    target = monitor_patches[0]\n" + nav_return("target")
)

VACUUM = (
    "def execute_command(image):\n"
    "    image_patch = ImagePatch(image)\n"
    "    vacuum_patches = image_patch.find('vacuum')\n"
    "    if len(vacuum_patches) == 0:\n"
    "        vacuum_patches = image_patch.find('cleaning machine')\n"
    "    if len(vacuum_patches) == 0:\n"
    "        return {'function': 'None', 'error': 'No vacuum found.'}\n"
    "    target = vacuum_patches[0]\n" + nav_return("target")
)

CONE_LEFT_OF_BACKPACK = (
    "def execute_command(image):\n"
    "    image_patch = ImagePatch(image)\n"
    "    backpack_patches = image_patch.find('backpack')\n"
    "    cone_patches = image_patch.find('cone')\n"
    "    if len(backpack_patches) == 0 or len(cone_patches) == 0:\n"
    "        return {'function': 'None', 'error': 'Missing backpack or cone.'}\n"
    "    reference = backpack_patches[0]\n"
    "    left_cones = []\n"
    "    for cone in cone_patches:\n"
    "        if cone.horizontal_center < reference.horizontal_center:\n"
    "            left_cones.append(cone)\n"
    "    if len(left_cones) == 0:\n"
    "        return {'function': 'None', 'error': 'No cone left of the backpack.'}\n"
    "    left_cones.sort(key=lambda x: x.horizontal_center)\n"
    "    target = left_cones[-1]\n" + nav_return("target")
)

BACKPACK_RIGHT_OF_RED = (
    "def execute_command(image):\n"
    "    image_patch = ImagePatch(image)\n"
    "    backpack_patches = image_patch.find('backpack')\n"
    "    red_patches = []\n"
    "    for patch in backpack_patches:\n"
    "        if patch.verify_property('backpack', 'red'):\n"
    "            red_patches.append(patch)\n"
    "    if len(red_patches) == 0:\n"
    "        return {'function': 'None', 'error': 'No red backpack found.'}\n"
    "    reference = red_patches[0]\n"
    "    right_backpacks = []\n"
    "    for patch in backpack_patches:\n"
    "        if patch.horizontal_center > reference.horizontal_center:\n"
    "            right_backpacks.append(patch)\n"
    "    if len(right_backpacks) == 0:\n"
    "        return {'function': 'None', 'error': 'No backpack right of the red one.'}\n"
    "    right_backpacks.sort(key=lambda x: x.horizontal_center)\n"
    "    target = right_backpacks[0]\n" + nav_return("target")
)

CHAIR_CLOSEST_TO_WHITEBOARD = (
    "def execute_command(image):\n"
    "    image_patch = ImagePatch(image)\n"
    "    whiteboard_patches = image_patch.find('whiteboard')\n"
    "    chair_patches = image_patch.find('chair')\n"
    "    if len(whiteboard_patches) == 0 or len(chair_patches) == 0:\n"
    "        return {'function': 'None', 'error': 'Missing whiteboard or chair.'}\n"
    "    whiteboard = whiteboard_patches[0]\n"
    "    chair_patches.sort(key=lambda x: distance(x, whiteboard))\n"
    "    target = chair_patches[0]\n" + nav_return("target")
)

FIXTURES = {
    "theater/go_to_the_fire_extinguisher": simple_find(
        "fire extinguisher", "No fire extinguisher found."
    ),
    "theater/go_to_the_vacuum": VACUUM,
    "theater/go_to_the_red_backpack": verified_pick(
        "backpack", "red", "No red backpack found."
    ),
    "theater/walk_to_the_blue_chair": verified_pick("chair", "blue", "No blue chair found."),
    "theater/chair_with_the_black_backpack": on_top_pick(
        "chair", "backpack", pick_base=True,
        error="No chair with a black backpack found.", item_filter_prop="black",
    ),
    "theater/something_that_can_carry_water": multi_find(
        ["bucket", "cup", "bottle"], "Nothing that can carry water found."
    ),
    "lobby/run_to_the_trash_bag": simple_find("trash bag", "No trash bag found."),
    "lobby/drive_to_the_broom": simple_find("broom", "No broom found."),
    "lobby/walk_to_the_smallest_monitor": SMALLEST_MONITOR,
    "lobby/bottle_on_top_of_the_table": on_top_pick(
        "table", "bottle", pick_base=False, error="No bottle on a table found."
    ),
    "lobby/something_that_can_help_firefighters": multi_find(
        ["fire extinguisher", "fire hydrant"], "Nothing that can help firefighters found."
    ),
    "outdoor/wander_to_fire_hydrant": simple_find("fire hydrant", "No fire hydrant found."),
    "outdoor/sashay_to_the_stop_sign": simple_find("stop sign", "No stop sign found."),
    "outdoor/proceed_to_the_middle_cone": sorted_pick(
        "cone", "len(target_patches) // 2", "No cone found."
    ),
    "outdoor/kick_flip": simple_find("skateboard", "Nothing to kick flip on."),
    "outdoor/walk_to_the_bike": simple_find("bike", "No bike found."),
    "courtyard/drive_to_the_wagon": simple_find("wagon", "No wagon found."),
    "courtyard/garbage_can_on_the_right": sorted_pick(
        "garbage can", "-1", "No garbage can found."
    ),
    "courtyard/bench_with_nothing_on_it": bare_pick(
        "bench", "water container", "No empty bench found."
    ),
    "courtyard/run_upstairs": simple_find("stairs", "No stairs found."),
    "courtyard/go_up_to_the_second_floor": SECOND_FLOOR,
    "classroom/go_to_the_middle_outlet": sorted_pick(
        "outlet", "len(target_patches) // 2", "No outlet found."
    ),
    "classroom/go_to_the_leftmost_outlet": sorted_pick("outlet", "0", "No outlet found."),
    "classroom/go_to_the_rightmost_outlet": sorted_pick("outlet", "-1", "No outlet found."),
    "classroom/middle_chair_in_the_row": sorted_pick(
        "chair", "len(target_patches) // 2", "No chair found."
    ),
    "classroom/second_chair_from_the_left": sorted_pick("chair", "1", "No chair found."),
    "classroom/walk_to_the_leftmost_backpack": sorted_pick("backpack", "0", "No backpack found."),
    "classroom/run_to_the_rightmost_backpack": sorted_pick(
        "backpack", "-1", "No backpack found."
    ),
    "classroom/go_to_the_middle_cone": sorted_pick(
        "cone", "len(target_patches) // 2", "No cone found."
    ),
    "classroom/cone_left_of_the_backpack": CONE_LEFT_OF_BACKPACK,
    "classroom/backpack_right_of_the_red_backpack": BACKPACK_RIGHT_OF_RED,
    "classroom/chair_closest_to_the_whiteboard": CHAIR_CLOSEST_TO_WHITEBOARD,
}


# ---------------------------------------------------------------------------
# corpora

SIM_CORPUS = [
    ("theater", "Generic", "Go to the fire extinguisher", "theater/go_to_the_fire_extinguisher", "fire_extinguisher"),
    ("theater", "Generic", "Go to the vacuum", "theater/go_to_the_vacuum", "vacuum"),
    ("theater", "Specific", "Go to the red backpack", "theater/go_to_the_red_backpack", "backpack_red"),
    ("theater", "Specific", "Walk to the blue chair", "theater/walk_to_the_blue_chair", "chair_blue"),
    ("theater", "Relational", "Go to the chair with the black backpack on it", "theater/chair_with_the_black_backpack", "chair_1"),
    ("theater", "Contextual", "Go to something that can carry water", "theater/something_that_can_carry_water", "bucket"),
    ("lobby", "Generic", "Run to the trash bag", "lobby/run_to_the_trash_bag", "trash_bag"),
    ("lobby", "Generic", "Drive to the broom", "lobby/drive_to_the_broom", "broom"),
    ("lobby", "Specific", "Walk to the smallest monitor", "lobby/walk_to_the_smallest_monitor", "monitor_small"),
    ("lobby", "Relational", "Go to the bottle on top of the table", "lobby/bottle_on_top_of_the_table", "bottle"),
    ("lobby", "Contextual", "Find something that can help firefighters", "lobby/something_that_can_help_firefighters", "fire_extinguisher"),
    ("outdoor", "Generic", "Wander to fire hydrant", "outdoor/wander_to_fire_hydrant", "fire_hydrant"),
    ("outdoor", "Generic", "Walk to the bike", "outdoor/walk_to_the_bike", "bike"),
    ("outdoor", "Specific", "Sashay to the stop sign", "outdoor/sashay_to_the_stop_sign", "stop_sign"),
    ("outdoor", "Relational", "Proceed to the middle cone", "outdoor/proceed_to_the_middle_cone", "cone_b"),
    ("outdoor", "Contextual", "Find me something to do a kick flip on", "outdoor/kick_flip", "skateboard"),
    ("courtyard", "Generic", "Drive to the wagon", "courtyard/drive_to_the_wagon", "wagon"),
    ("courtyard", "Specific", "Proceed towards the garbage can on the right", "courtyard/garbage_can_on_the_right", "garbage_can_right"),
    ("courtyard", "Relational", "Walk to the bench with nothing on it", "courtyard/bench_with_nothing_on_it", "bench_2"),
    ("courtyard", "Contextual", "Run upstairs", "courtyard/run_upstairs", "stairs"),
    ("courtyard", "Contextual", "Go up to the second floor", "courtyard/go_up_to_the_second_floor", "stairs"),
]

CROSSFRAME_CORPUS = [
    ("classroom", "Relational", "Go to the middle outlet", "classroom/go_to_the_middle_outlet", "outlet_front"),
    ("classroom", "Relational", "Go to the leftmost outlet", "classroom/go_to_the_leftmost_outlet", "outlet_left"),
    ("classroom", "Relational", "Go to the rightmost outlet", "classroom/go_to_the_rightmost_outlet", "outlet_right"),
    ("classroom", "Relational", "Go to the middle chair in the row of chairs", "classroom/middle_chair_in_the_row", "chair_front"),
    ("classroom", "Relational", "Go to the second chair from the left", "classroom/second_chair_from_the_left", "chair_front"),
    ("classroom", "Relational", "Walk to the leftmost backpack", "classroom/walk_to_the_leftmost_backpack", "backpack_black_left"),
    ("classroom", "Relational", "Run to the rightmost backpack", "classroom/run_to_the_rightmost_backpack", "backpack_black_right"),
    ("classroom", "Relational", "Go to the middle cone", "classroom/go_to_the_middle_cone", "cone_front"),
    ("classroom", "Relational", "Go the cone to the left of the backpack", "classroom/cone_left_of_the_backpack", "cone_left"),
    ("classroom", "Relational", "Go to backpack to the right of the red backpack", "classroom/backpack_right_of_the_red_backpack", "backpack_black_right"),
    ("classroom", "Relational", "Walk to the chair closest to the whiteboard", "classroom/chair_closest_to_the_whiteboard", "chair_front"),
]


def corpus_json(rows):
    entries = []
    for scene, category, sentence, fixture, target in rows:
        entries.append(
            {
                "id": fixture.replace("/", "_"),
                "scene": scene,
                "category": category,
                "sentence": sentence,
                "fixture": fixture,
                "target_object_id": target,
            }
        )
    return {"entries": entries}


def main():
    scenes = {
        "theater": theater_scene(),
        "lobby": lobby_scene(),
        "outdoor": outdoor_scene(),
        "courtyard": courtyard_scene(),
        "classroom": classroom_scene(),
    }
    scenes_dir = DATA / "scenes"
    scenes_dir.mkdir(parents=True, exist_ok=True)
    for name, scene in scenes.items():
        scene_from_dict(scene)  # eager validation before writing
        (scenes_dir / f"{name}.json").write_text(json.dumps(scene, indent=2) + "\n")
        print(f"scene {name}: {len(scene['objects'])} objects")

    fixtures_dir = DATA / "fixtures"
    for rel, source in FIXTURES.items():
        path = fixtures_dir / f"{rel}.py"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(source)
    print(f"wrote {len(FIXTURES)} fixtures")

    corpus_dir = DATA / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    (corpus_dir / "sim_corpus.json").write_text(
        json.dumps(corpus_json(SIM_CORPUS), indent=2) + "\n"
    )
    (corpus_dir / "crossframe_corpus.json").write_text(
        json.dumps(corpus_json(CROSSFRAME_CORPUS), indent=2) + "\n"
    )
    print(f"sim corpus: {len(SIM_CORPUS)} entries; crossframe: {len(CROSSFRAME_CORPUS)}")


if __name__ == "__main__":
    main()
