"""Language-commanded navigation on a simulated multi-camera robot.

Natural-language commands become restricted navigation programs, which are
validated and interpreted against a simulated world, grounded to 3D waypoints
by voxel ray casting, and executed by a sample-and-project graph planner.
"""

from .navlang import (
    NavAst,
    ProgramParseError,
    SourceProgram,
    UnsupportedConstructError,
    ValidationReport,
    parse_program,
    pretty_print,
    summarize_api_usage,
    validate_program,
)
from .navruntime import ExecutionTrace, NavResult, execute_program, resolve_nav_result
from .planner import (
    FollowResult,
    NavGraph,
    PlannedPath,
    PlannerConfig,
    build_graph,
    expand_graph,
    follow_path,
    plan_to_waypoint,
    project_sample,
    shortest_path,
)
from .projection import (
    PanoramaLayout,
    Ray,
    Waypoint,
    assemble_representation,
    emplace_waypoint,
    pixel_to_ray,
    raycast_first_hit,
)
from .worldsim import (
    RobotState,
    SceneSpec,
    ViewSet,
    VoxelMap,
    attribute_oracle,
    build_voxel_map,
    load_scene,
    render_views,
    step_robot,
    synthetic_detect,
)

__version__ = "0.1.0"
