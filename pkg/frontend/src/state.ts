// The console's session-view state: a pure model assembled from server
// payloads. Rendering reads this; nothing here touches the DOM, so the whole
// model is testable in Node (including against a live server).

import type {
  CommandReport,
  MapPayload,
  Pose,
  StatePayload,
  ViewsPayload,
  WsEvent,
} from "./types.js";

export interface StageBadge {
  name: string;
  label: string;
  passed: boolean;
  detail: string;
}

export interface SessionView {
  scene: string;
  pose: Pose;
  views: ViewsPayload | null;
  map: MapPayload | null;
  representation: "A" | "B";
  lastReport: CommandReport | null;
  poseTrail: Pose[];
  streamEvents: number;
  busy: boolean;
  banner: string | null;
}

export function initialView(): SessionView {
  return {
    scene: "",
    pose: { x: 0, y: 0, yaw: 0 },
    views: null,
    map: null,
    representation: "A",
    lastReport: null,
    poseTrail: [],
    streamEvents: 0,
    busy: false,
    banner: null,
  };
}

/** Reconstruct the ground-truth part of the view purely from GET payloads. */
export function loadFromServer(
  view: SessionView,
  state: StatePayload,
  views: ViewsPayload,
  map: MapPayload,
): SessionView {
  return {
    ...view,
    scene: state.scene,
    pose: state.pose,
    views,
    map,
    banner: null,
  };
}

const STAGE_LABELS: Record<string, string> = {
  code: "Code",
  od: "OD",
  wp: "WP",
  path_exec: "Path&Exec",
};

export function stageBadges(report: CommandReport): StageBadge[] {
  return (["code", "od", "wp", "path_exec"] as const).map((name) => ({
    name,
    label: STAGE_LABELS[name],
    passed: report.stages[name].passed,
    detail: report.stages[name].detail,
  }));
}

/** Path vertices straight from the server payload (meters, x/y). */
export function pathPolyline(report: CommandReport): [number, number][] {
  if (!report.planned_path) return [];
  return report.planned_path.waypoints.map((w) => [w[0], w[1]]);
}

/** Waypoint marker position, when the projection produced one. */
export function waypointMarker(report: CommandReport): [number, number] | null {
  if (!report.waypoint) return null;
  return [report.waypoint.position[0], report.waypoint.position[1]];
}

export function applyReport(view: SessionView, report: CommandReport): SessionView {
  return {
    ...view,
    lastReport: report,
    pose: report.final_pose,
    busy: false,
  };
}

export function applyWsEvent(view: SessionView, event: WsEvent): SessionView {
  if (event.type === "pose") {
    const pose = { x: event.x, y: event.y, yaw: event.yaw };
    return {
      ...view,
      pose,
      poseTrail: [...view.poseTrail, pose],
      streamEvents: view.streamEvents + 1,
    };
  }
  if (event.type === "status") {
    return { ...view, busy: event.state === "executing" };
  }
  return view;
}

export function commandBody(
  view: SessionView,
  text: string,
  fixture: string | null,
  target: string | null,
): Record<string, unknown> {
  const body: Record<string, unknown> = {
    text,
    scene: view.scene,
    representation: view.representation,
  };
  if (fixture) body.fixture = fixture;
  if (target) body.target_object_id = target;
  return body;
}
