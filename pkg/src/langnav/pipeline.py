"""End-to-end orchestration: command -> program -> grounding -> waypoint -> path.

A command runs through four gated stages, mirroring how the system is scored:

  Code       program obtained, parsed, validated, and execution produced an
             actual navigation result (not an error record)
  OD         the result box overlaps the annotated target object (IoU >= 0.5)
  WP         the pixel ray hits the map and the waypoint lands within 1 m of
             the target's footprint
  Path&Exec  the planner reached the waypoint and the follower tracked the
             path to its end

Failures never raise out of run_command; they are recorded as stage outcomes
with monotone gating (everything after a failed stage is failed). Reports are
deterministic: the timings field carries work measures (interpreter steps,
planner sizes, simulated seconds), not wall-clock times, so identical runs
produce byte-identical report files.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from . import data as bundled
from .navlang import SourceProgram, parse_program, summarize_api_usage, validate_program
from .navruntime import execute_program
from .planner import PlannerConfig, build_graph, follow_path, plan_to_waypoint
from .projection import (
    DEFAULT_STANDOFF,
    PadColumnError,
    PanoramaLayout,
    Waypoint,
    emplace_waypoint,
    pixel_to_ray,
    raycast_first_hit,
)
from .worldsim import (
    RobotState,
    SceneSpec,
    ViewSet,
    VoxelMap,
    build_voxel_map,
    load_scene,
    render_views,
    visible_objects,
)

CATEGORIES = ("Generic", "Specific", "Relational", "Contextual")
OD_IOU_THRESHOLD = 0.5
WP_DISTANCE_THRESHOLD = 1.0
PROMPT_MARKER = "INSERT_QUERY_HERE"


class CodegenError(RuntimeError):
    """Program acquisition failed (missing fixture, transport, no code)."""


@dataclass(frozen=True)
class NavCommand:
    text: str
    scene: str
    category: str = "Generic"
    representation: str = "A"
    fixture_id: str | None = None
    target_object_id: str | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"category must be one of {CATEGORIES}")
        if self.representation not in ("A", "B"):
            raise ValueError("representation must be 'A' or 'B'")

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "scene": self.scene,
            "category": self.category,
            "representation": self.representation,
            "fixture_id": self.fixture_id,
            "target_object_id": self.target_object_id,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CodegenConfig:
    mode: str = "fixture"  # "fixture" | "live"
    endpoint: str | None = None
    token_env: str | None = None
    prompt_template: Path | None = None
    fixture_dir: Path | None = None
    model: str = "gpt-3.5-turbo"
    timeout_s: float = 60.0

    def __post_init__(self) -> None:
        if self.mode not in ("fixture", "live"):
            raise ValueError("codegen mode must be 'fixture' or 'live'")
        if self.mode == "live" and (not self.endpoint or not self.token_env):
            raise ValueError("live codegen requires an endpoint and a token env var")


_FENCE_RE = re.compile(r"```(?:[Pp]ython)?\s*\n(.*?)```", re.DOTALL)


def extract_code_block(text: str) -> str:
    """First fenced code block, or the contiguous block starting at a def."""
    match = _FENCE_RE.search(text)
    if match:
        code = match.group(1).strip("\n")
        if code.strip():
            return code
    lines = text.splitlines()
    start = next((i for i, ln in enumerate(lines) if ln.startswith("def ")), None)
    if start is None:
        raise CodegenError("no code extracted")
    block = [lines[start]]
    for ln in lines[start + 1 :]:
        if ln.strip() == "" or ln.startswith((" ", "\t")):
            block.append(ln)
        else:
            break
    code = "\n".join(block).rstrip()
    if not code:
        raise CodegenError("no code extracted")
    return code


def assemble_prompt(template: str, query: str) -> str:
    if template.count(PROMPT_MARKER) != 1:
        raise CodegenError(
            f"prompt template must contain the marker {PROMPT_MARKER!r} exactly once"
        )
    return template.replace(PROMPT_MARKER, query)


def generate_program(cmd: NavCommand, cfg: CodegenConfig) -> SourceProgram:
    """Fixture mode returns the stored program verbatim; live mode fills the
    prompt template and extracts code from a chat-completion response."""
    if cfg.mode == "fixture":
        if not cmd.fixture_id:
            raise CodegenError("fixture mode requires a fixture id")
        root = cfg.fixture_dir or bundled.fixture_dir()
        path = Path(root) / f"{cmd.fixture_id}.py"
        if not path.exists():
            raise CodegenError(f"missing fixture: {cmd.fixture_id}")
        return SourceProgram(text=path.read_text(), origin="fixture")

    template_path = cfg.prompt_template or bundled.prompt_template_path()
    prompt = assemble_prompt(Path(template_path).read_text(), cmd.text)
    token = os.environ.get(cfg.token_env or "", "")
    if not token:
        raise CodegenError(f"auth token env var {cfg.token_env!r} is empty")
    try:
        response = requests.post(
            cfg.endpoint,
            json={
                "model": cfg.model,
                "messages": [{"role": "user", "content": prompt}],
            },
            headers={"Authorization": f"Bearer {token}"},
            timeout=cfg.timeout_s,
        )
        response.raise_for_status()
        payload = response.json()
        content = payload["choices"][0]["message"]["content"]
    except requests.RequestException as exc:
        raise CodegenError(f"transport failure: {exc}") from exc
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise CodegenError(f"malformed completion response: {exc}") from exc
    return SourceProgram(text=extract_code_block(content), origin="live-codegen")


# ---------------------------------------------------------------------------
# world session


@dataclass
class World:
    """A loaded scene with its derived voxel map and the session robot pose."""

    scene: SceneSpec
    voxel_map: VoxelMap
    robot: RobotState

    @classmethod
    def from_scene(cls, scene: SceneSpec) -> "World":
        x, y, yaw = scene.robot_start
        return cls(
            scene=scene,
            voxel_map=build_voxel_map(scene),
            robot=RobotState(x=x, y=y, yaw=yaw, spec=scene.robot),
        )

    @classmethod
    def load(cls, path: str | Path) -> "World":
        return cls.from_scene(load_scene(path))

    def fresh_copy(self) -> "World":
        """Same scene, robot reset to the scene start (isolated eval runs)."""
        return World.from_scene(self.scene)


# ---------------------------------------------------------------------------
# stage outcomes and report


@dataclass(frozen=True)
class StageOutcome:
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"passed": self.passed, "detail": self.detail}


@dataclass
class StageOutcomes:
    code: StageOutcome
    od: StageOutcome
    wp: StageOutcome
    path_exec: StageOutcome

    def to_dict(self) -> dict:
        return {
            "code": self.code.to_dict(),
            "od": self.od.to_dict(),
            "wp": self.wp.to_dict(),
            "path_exec": self.path_exec.to_dict(),
        }

    def flags(self) -> tuple[bool, bool, bool, bool]:
        return (self.code.passed, self.od.passed, self.wp.passed, self.path_exec.passed)


_GATED = StageOutcome(passed=False, detail="gated by earlier stage failure")


@dataclass
class CommandReport:
    command: dict
    program_text: str | None
    api_usage: list[str]
    trace: dict | None
    nav_result: dict | None
    waypoint: dict | None
    planned_path: dict | None
    final_pose: dict
    stages: StageOutcomes
    timings: dict

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "program_text": self.program_text,
            "api_usage": self.api_usage,
            "trace": self.trace,
            "nav_result": self.nav_result,
            "waypoint": self.waypoint,
            "planned_path": self.planned_path,
            "final_pose": self.final_pose,
            "stages": self.stages.to_dict(),
            "timings": self.timings,
        }


def report_json(report: CommandReport) -> str:
    """Stable serialization: identical runs produce identical bytes."""
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def box_iou(a, b) -> float:
    il = max(a[0], b[0])
    ib = max(a[1], b[1])
    ir = min(a[2], b[2])
    it = min(a[3], b[3])
    iw, ih = ir - il, it - ib
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    area_a = max(a[2] - a[0], 0.0) * max(a[3] - a[1], 0.0)
    area_b = max(b[2] - b[0], 0.0) * max(b[3] - b[1], 0.0)
    union = area_a + area_b - inter
    return inter / union if union > 0 else 0.0


def ground_truth_box(
    views: ViewSet, mode: str, target_id: str, frame: str | None
) -> tuple[float, float, float, float] | None:
    """Projection of the annotated target in the representation's coordinates.

    Mode A remaps the best per-frame fragment into panorama coordinates with
    the same score/precedence rule the detector uses; mode B evaluates in the
    frame the program's answer came from (None when the target is not visible
    there). Occluded targets fall back to the raw projected rectangle.
    """
    layout = PanoramaLayout(frame_width=views.scene.cameras.image_width)
    precedence = {"front": 0, "left": 1, "right": 2}

    def fragment(frame_name: str):
        full = (0.0, 0.0, float(views.scene.cameras.image_width), float(views.scene.cameras.image_height))
        for det in visible_objects(views, full, frame_name):
            if det.object_id == target_id:
                return (det.left, det.lower, det.right, det.upper), det.score
        for rect in views.frame(frame_name).rects:  # occluded fallback
            if rect.object_id == target_id:
                return (rect.left, rect.lower, rect.right, rect.upper), 0.0
        return None

    if mode == "A":
        best = None
        for frame_name in ("front", "left", "right"):
            got = fragment(frame_name)
            if got is None:
                continue
            box, score = got
            off = layout.offset(frame_name)
            candidate = (
                score,
                -precedence[frame_name],
                (box[0] + off, box[1], box[2] + off, box[3]),
            )
            if best is None or candidate[:2] > best[:2]:
                best = candidate
        return best[2] if best else None
    if frame not in ("left", "front", "right"):
        return None
    got = fragment(frame)
    return got[0] if got else None


# ---------------------------------------------------------------------------
# the stage chain


def run_command(
    cmd: NavCommand,
    world: World,
    cfg: CodegenConfig,
    program: SourceProgram | None = None,
    pose_callback=None,
) -> CommandReport:
    """Run the full stage chain for one command against the session world.

    Stage semantics are described in the module docstring. `program` bypasses
    codegen (used when the caller already holds the source). On full success
    the session robot advances to the follower's final pose.
    """
    scene = world.scene
    timings: dict = {}

    def report(
        stages: StageOutcomes,
        program_text=None,
        api_usage=None,
        trace=None,
        nav_result=None,
        waypoint=None,
        planned_path=None,
    ) -> CommandReport:
        return CommandReport(
            command=cmd.to_dict(),
            program_text=program_text,
            api_usage=api_usage or [],
            trace=trace,
            nav_result=nav_result,
            waypoint=waypoint,
            planned_path=planned_path,
            final_pose={
                "x": world.robot.x,
                "y": world.robot.y,
                "yaw": world.robot.yaw,
            },
            stages=stages,
            timings=timings,
        )

    def all_failed(detail: str) -> StageOutcomes:
        fail = StageOutcome(passed=False, detail=detail)
        return StageOutcomes(code=fail, od=_GATED, wp=_GATED, path_exec=_GATED)

    # ---- Code stage: acquire, parse, validate, execute -------------------
    if program is None:
        try:
            program = generate_program(cmd, cfg)
        except CodegenError as exc:
            return report(all_failed(f"codegen: {exc}"))
    try:
        nav_ast = parse_program(program)
    except ValueError as exc:
        return report(all_failed(f"parse error: {exc}"), program_text=program.text)
    validation = validate_program(nav_ast)
    if not validation.ok:
        details = "; ".join(d.message for d in validation.errors())
        return report(
            all_failed(f"validation: {details}"), program_text=program.text
        )

    views = render_views(scene, world.robot)
    nav_result, trace = execute_program(
        nav_ast, views, cmd.representation, seed=cmd.seed
    )
    timings["code"] = {"interpreter_steps": trace.steps_used}
    api_usage = summarize_api_usage(nav_ast)
    common = dict(
        program_text=program.text,
        api_usage=api_usage,
        trace=trace.to_dict(),
        nav_result=nav_result.to_dict(),
    )

    if nav_result.function == "None":
        stages = StageOutcomes(
            code=StageOutcome(passed=False, detail=f"program error: {nav_result.error}"),
            od=_GATED,
            wp=_GATED,
            path_exec=_GATED,
        )
        return report(stages, **common)
    code_outcome = StageOutcome(passed=True, detail="navigation result produced")

    # ---- OD stage ---------------------------------------------------------
    if cmd.target_object_id:
        gt_box = ground_truth_box(
            views, cmd.representation, cmd.target_object_id, nav_result.frame
        )
        if gt_box is None:
            od_outcome = StageOutcome(
                passed=False,
                detail=f"target {cmd.target_object_id!r} not visible in answer frame",
            )
        else:
            iou = box_iou(nav_result.box, gt_box)
            od_outcome = StageOutcome(
                passed=iou >= OD_IOU_THRESHOLD,
                detail=f"IoU with target projection: {iou:.4f}",
            )
    else:
        od_outcome = StageOutcome(
            passed=True, detail="no target annotation; box presence accepted"
        )
    if not od_outcome.passed:
        stages = StageOutcomes(
            code=code_outcome, od=od_outcome, wp=_GATED, path_exec=_GATED
        )
        return report(stages, **common)

    # ---- WP stage ---------------------------------------------------------
    waypoint_dict = None
    waypoint: Waypoint | None = None
    if nav_result.frame is None:
        wp_outcome = StageOutcome(
            passed=False, detail="answer box resolves to no camera frame"
        )
    else:
        try:
            ray = pixel_to_ray(
                nav_result.inputs[0],
                nav_result.inputs[1],
                nav_result.frame,
                world.robot,
                scene,
            )
            raycast = raycast_first_hit(
                ray, world.voxel_map, max_range=scene.cameras.max_range
            )
            waypoint = emplace_waypoint(
                raycast, ray, world.voxel_map, standoff=DEFAULT_STANDOFF
            )
            timings["wp"] = {"ray_length_m": round(raycast.distance, 6)}
            waypoint_dict = {
                "position": list(waypoint.position),
                "status": waypoint.status,
                "hit_voxel": list(waypoint.hit_voxel) if waypoint.hit_voxel else None,
                "standoff_applied": waypoint.standoff_applied,
                "clamped": waypoint.clamped,
            }
            if waypoint.status != "hit":
                wp_outcome = StageOutcome(
                    passed=False, detail="ray left the map (boundary projection)"
                )
            elif cmd.target_object_id:
                target = scene.object_by_id(cmd.target_object_id)
                dist = target.box.horizontal_distance(
                    waypoint.position[0], waypoint.position[1]
                )
                wp_outcome = StageOutcome(
                    passed=dist <= WP_DISTANCE_THRESHOLD,
                    detail=f"waypoint {dist:.3f} m from target footprint",
                )
            else:
                wp_outcome = StageOutcome(
                    passed=True, detail="waypoint on map (no target annotation)"
                )
        except (PadColumnError, ValueError) as exc:
            wp_outcome = StageOutcome(passed=False, detail=f"projection: {exc}")
    if not wp_outcome.passed or waypoint is None:
        stages = StageOutcomes(
            code=code_outcome, od=od_outcome, wp=wp_outcome, path_exec=_GATED
        )
        return report(stages, waypoint=waypoint_dict, **common)

    # ---- Path & Exec stage -------------------------------------------------
    planner_cfg = PlannerConfig.for_robot(scene.robot, seed=cmd.seed)
    rng = np.random.default_rng(cmd.seed)
    try:
        graph = build_graph(world.robot, world.voxel_map, planner_cfg, rng)
        path = plan_to_waypoint(
            graph, world.robot, waypoint.position, world.voxel_map, planner_cfg, rng
        )
    except Exception as exc:  # sample rejection at the root, goal outside map
        stages = StageOutcomes(
            code=code_outcome,
            od=od_outcome,
            wp=wp_outcome,
            path_exec=StageOutcome(passed=False, detail=f"planning: {exc}"),
        )
        return report(stages, waypoint=waypoint_dict, **common)
    follow = follow_path(path, world.robot, callback=pose_callback)
    planned_path = {
        "waypoints": [list(w) for w in path.waypoints],
        "cost_m": path.cost,
        "reached_goal": path.reached_goal,
    }
    timings["path_exec"] = {
        "graph_nodes": graph.node_count,
        "path_cost_m": round(path.cost, 6),
        "sim_seconds": round(follow.sim_time, 6),
    }
    success = path.reached_goal and follow.success
    path_outcome = StageOutcome(
        passed=success,
        detail=(
            f"reached_goal={path.reached_goal}, follower_success={follow.success}, "
            f"final distance {follow.distance_to_goal:.3f} m"
        ),
    )
    if success:
        world.robot = follow.final_state
    stages = StageOutcomes(
        code=code_outcome, od=od_outcome, wp=wp_outcome, path_exec=path_outcome
    )
    return report(stages, waypoint=waypoint_dict, planned_path=planned_path, **common)
