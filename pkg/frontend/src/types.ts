// Wire types mirroring the navigation service's HTTP/WebSocket contract.
// The console never invents geometry: everything rendered comes from these.

export interface Pose {
  x: number;
  y: number;
  yaw: number;
}

export interface StatePayload {
  scene: string;
  pose: Pose;
}

export interface ViewRect {
  object_id: string;
  box: [number, number, number, number]; // left, lower, right, upper (v up)
  depth: number;
  label: string;
}

export interface FramePayload {
  frame: string;
  width: number;
  height: number;
  rects: ViewRect[];
}

export interface PanoramaLayout {
  order: string[];
  frame_width: number;
  pad_px: number;
  total_width: number;
}

export interface ViewsPayload {
  frames: FramePayload[];
  panorama: PanoramaLayout;
}

export interface MapPayload {
  dims: [number, number, number];
  resolution: number;
  rle: number[];
}

export interface StageOutcome {
  passed: boolean;
  detail: string;
}

export interface Stages {
  code: StageOutcome;
  od: StageOutcome;
  wp: StageOutcome;
  path_exec: StageOutcome;
}

export interface NavResultPayload {
  function: string;
  inputs: [number, number] | null;
  box: [number, number, number, number] | null;
  error: string | null;
  frame: string | null;
  normalized: boolean;
}

export interface WaypointPayload {
  position: [number, number, number];
  status: string;
  hit_voxel: [number, number, number] | null;
  standoff_applied: number;
  clamped: boolean;
}

export interface PlannedPathPayload {
  waypoints: number[][];
  cost_m: number;
  reached_goal: boolean;
}

export interface CommandReport {
  command: {
    text: string;
    scene: string;
    category: string;
    representation: string;
    fixture_id: string | null;
    target_object_id: string | null;
    seed: number;
  };
  program_text: string | null;
  api_usage: string[];
  trace: { steps_used: number; api_calls: unknown[]; notes: string[] } | null;
  nav_result: NavResultPayload | null;
  waypoint: WaypointPayload | null;
  planned_path: PlannedPathPayload | null;
  final_pose: Pose;
  stages: Stages;
  timings: Record<string, unknown>;
}

export type PoseEvent = {
  type: "pose";
  t: number;
  x: number;
  y: number;
  yaw: number;
  progress: number;
};

export type StatusEvent = {
  type: "status";
  state: "executing" | "idle";
  text: string;
};

export type WsEvent = PoseEvent | StatusEvent;
