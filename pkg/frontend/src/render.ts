// Canvas/DOM rendering. The base map layer is drawn once per map payload;
// pose updates only repaint the small overlay layer on top of it.

import { CELL_FLOOR, CELL_OBSTACLE, decodeRle, topDownOccupancy } from "./grid.js";
import { pathPolyline, stageBadges, waypointMarker } from "./state.js";
import type { SessionView } from "./state.js";
import type { CommandReport, FramePayload, Pose } from "./types.js";

const FLOOR_COLOR = "#20262e";
const VOID_COLOR = "#0b0e12";
const OBSTACLE_COLOR = "#8a93a3";
const PATH_COLOR = "#58c4ff";
const WAYPOINT_COLOR = "#ffd75e";
const ROBOT_COLOR = "#7CFC9A";
const TRAIL_COLOR = "rgba(124, 252, 154, 0.45)";
const BOX_COLOR = "#58c4ff";
const ANSWER_COLOR = "#ffd75e";

export interface MapTransform {
  scale: number; // canvas pixels per meter
  height: number; // canvas height in pixels
}

export function worldToCanvas(t: MapTransform, x: number, y: number): [number, number] {
  return [x * t.scale, t.height - y * t.scale];
}

export function renderCameraPanel(
  canvas: HTMLCanvasElement,
  frame: FramePayload,
  report: CommandReport | null,
): void {
  const scale = canvas.width / frame.width;
  const ctx = canvas.getContext("2d")!;
  ctx.fillStyle = VOID_COLOR;
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.font = "10px monospace";
  for (const rect of frame.rects) {
    const [l, b, r, u] = rect.box;
    const x = l * scale;
    const y = canvas.height - u * scale; // v grows upward on the wire
    const w = (r - l) * scale;
    const h = (u - b) * scale;
    ctx.strokeStyle = BOX_COLOR;
    ctx.strokeRect(x, y, w, h);
    ctx.fillStyle = BOX_COLOR;
    ctx.fillText(rect.label, x + 2, Math.max(y - 2, 10));
  }
  const answer = report?.nav_result;
  if (answer && answer.box && answer.frame === frame.frame) {
    const [l, b, r, u] = answer.box;
    ctx.strokeStyle = ANSWER_COLOR;
    ctx.lineWidth = 2;
    ctx.strokeRect(
      l * scale,
      canvas.height - u * scale,
      (r - l) * scale,
      (u - b) * scale,
    );
    ctx.lineWidth = 1;
  }
}

export function renderMapBase(canvas: HTMLCanvasElement, view: SessionView): MapTransform | null {
  if (!view.map) return null;
  const [nx, ny] = view.map.dims;
  const scale = Math.max(2, Math.floor(Math.min(640 / nx, 480 / ny)));
  canvas.width = nx * scale;
  canvas.height = ny * scale;
  const cells = decodeRle(view.map.dims, view.map.rle);
  const top = topDownOccupancy(view.map.dims, cells);
  const ctx = canvas.getContext("2d")!;
  for (let i = 0; i < nx; i++) {
    for (let j = 0; j < ny; j++) {
      const kind = top[i * ny + j];
      ctx.fillStyle =
        kind === CELL_OBSTACLE ? OBSTACLE_COLOR : kind === CELL_FLOOR ? FLOOR_COLOR : VOID_COLOR;
      ctx.fillRect(i * scale, canvas.height - (j + 1) * scale, scale, scale);
    }
  }
  // scale is px per cell; one cell is `resolution` meters
  return { scale: scale / view.map.resolution, height: canvas.height };
}

export function renderOverlay(canvas: HTMLCanvasElement, view: SessionView, t: MapTransform): void {
  const ctx = canvas.getContext("2d")!;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const report = view.lastReport;
  if (report) {
    const polyline = pathPolyline(report);
    if (polyline.length > 1) {
      ctx.strokeStyle = PATH_COLOR;
      ctx.lineWidth = 2;
      ctx.beginPath();
      polyline.forEach(([x, y], idx) => {
        const [cx, cy] = worldToCanvas(t, x, y);
        if (idx === 0) ctx.moveTo(cx, cy);
        else ctx.lineTo(cx, cy);
      });
      ctx.stroke();
      ctx.lineWidth = 1;
    }
    const marker = waypointMarker(report);
    if (marker) {
      const [cx, cy] = worldToCanvas(t, marker[0], marker[1]);
      ctx.strokeStyle = WAYPOINT_COLOR;
      ctx.beginPath();
      ctx.arc(cx, cy, 6, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.beginPath();
      ctx.arc(cx, cy, 1.5, 0, 2 * Math.PI);
      ctx.fillStyle = WAYPOINT_COLOR;
      ctx.fill();
    }
  }
  if (view.poseTrail.length > 1) {
    ctx.strokeStyle = TRAIL_COLOR;
    ctx.beginPath();
    view.poseTrail.forEach((pose, idx) => {
      const [cx, cy] = worldToCanvas(t, pose.x, pose.y);
      if (idx === 0) ctx.moveTo(cx, cy);
      else ctx.lineTo(cx, cy);
    });
    ctx.stroke();
  }
  drawRobot(ctx, t, view.pose);
}

function drawRobot(ctx: CanvasRenderingContext2D, t: MapTransform, pose: Pose): void {
  const [cx, cy] = worldToCanvas(t, pose.x, pose.y);
  ctx.fillStyle = ROBOT_COLOR;
  ctx.beginPath();
  ctx.arc(cx, cy, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = ROBOT_COLOR;
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  ctx.lineTo(cx + 10 * Math.cos(pose.yaw), cy - 10 * Math.sin(pose.yaw));
  ctx.stroke();
}

export function renderBadges(container: HTMLElement, report: CommandReport): void {
  container.innerHTML = "";
  for (const badge of stageBadges(report)) {
    const el = document.createElement("span");
    el.className = `badge ${badge.passed ? "pass" : "fail"}`;
    el.textContent = `${badge.label}: ${badge.passed ? "PASS" : "FAIL"}`;
    el.title = badge.detail;
    container.appendChild(el);
  }
}

export function renderProgram(container: HTMLElement, report: CommandReport): void {
  const text = report.program_text ?? "(no program)";
  container.textContent = text;
  const errorBox = document.getElementById("nav-error");
  if (errorBox) {
    const error = report.nav_result?.error;
    errorBox.textContent = error ? `program error: ${error}` : "";
  }
}
