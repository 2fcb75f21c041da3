from __future__ import annotations

import math

import pytest

from langnav.worldsim import RobotState, SceneSpec, scene_from_dict


def make_scene(
    objects=None,
    extent=(10.0, 10.0, 3.0),
    resolution=0.1,
    robot_start=(5.0, 5.0, 0.0),
    terrain="flat",
    qa_fixtures=None,
    detector_noise=None,
    name="test-scene",
) -> SceneSpec:
    data = {
        "name": name,
        "map_extent": list(extent),
        "voxel_resolution": resolution,
        "terrain": terrain,
        "robot_start": list(robot_start),
        "objects": objects or [],
    }
    if qa_fixtures is not None:
        data["qa_fixtures"] = qa_fixtures
    if detector_noise is not None:
        data["detector_noise"] = detector_noise
    return scene_from_dict(data)


def obj(
    oid: str,
    box,
    label: str | None = None,
    synonyms=(),
    attributes=(),
    support_of=None,
) -> dict:
    return {
        "id": oid,
        "label": label or oid,
        "box": list(box),
        "synonyms": list(synonyms),
        "attributes": list(attributes),
        "support_of": support_of,
    }


def box_centered(cx, cy, cz, hx, hy, hz):
    """Box given center and half-extents."""
    return [cx - hx, cy - hy, cz - hz, cx + hx, cy + hy, cz + hz]


def bearing_position(robot_xy, bearing_deg: float, distance: float):
    """World (x, y) at a bearing (degrees, CCW from the robot's +x heading)."""
    rad = math.radians(bearing_deg)
    return (
        robot_xy[0] + distance * math.cos(rad),
        robot_xy[1] + distance * math.sin(rad),
    )


FRAME_BEARINGS = {"left": 90.0, "front": 0.0, "right": -90.0}


def bearing_for_pixel(frame: str, u: float, fx: float = 320.0, cx: float = 320.0) -> float:
    """Bearing (deg, robot frame) whose ray passes through column u of a frame."""
    return FRAME_BEARINGS[frame] + math.degrees(math.atan((cx - u) / fx))


def obj_at_pixel(
    oid: str,
    frame: str,
    u: float,
    distance: float,
    robot_xy=(5.0, 5.0),
    z_center: float = 0.8,
    half: tuple[float, float, float] = (0.12, 0.12, 0.12),
    label: str | None = None,
    synonyms=(),
    attributes=(),
    camera_z: float = 0.8,
) -> dict:
    """Object whose projected box center lands on column u of a frame.

    Starts from the center-ray placement and iterates a bearing correction
    against the real camera model until the projected center converges.
    """
    from langnav.worldsim import Box3, CameraConfig, CameraModel, FRAME_YAW_OFFSETS, project_box

    camera = CameraModel(
        frame=frame,
        position=(robot_xy[0], robot_xy[1], camera_z),
        yaw=FRAME_YAW_OFFSETS[frame],
        config=CameraConfig(),
    )
    bearing = bearing_for_pixel(frame, u)
    x, y = bearing_position(robot_xy, bearing, distance)
    for _ in range(40):
        rect = project_box(camera, Box3(*box_centered(x, y, z_center, *half)))
        assert rect is not None, f"{oid}: placement fell outside the {frame} view"
        center = (rect[0] + rect[2]) / 2
        err = u - center
        if abs(err) < 1e-9:
            break
        # u falls as bearing rises, so correct against the error
        bearing -= math.degrees(math.atan(err / camera.fx))
        x, y = bearing_position(robot_xy, bearing, distance)
    return obj(
        oid,
        box_centered(x, y, z_center, *half),
        label=label,
        synonyms=synonyms,
        attributes=attributes,
    )


@pytest.fixture
def robot_at_origin():
    def _make(scene: SceneSpec) -> RobotState:
        x, y, yaw = scene.robot_start
        return RobotState(x=x, y=y, yaw=yaw, spec=scene.robot)

    return _make
