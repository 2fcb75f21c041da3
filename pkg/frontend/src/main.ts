// Console wiring: form events, server fetches, WebSocket stream, rendering.

import { ApiClient } from "./api.js";
import {
  applyReport,
  applyWsEvent,
  commandBody,
  initialView,
  loadFromServer,
} from "./state.js";
import type { SessionView } from "./state.js";
import {
  renderBadges,
  renderCameraPanel,
  renderMapBase,
  renderOverlay,
  renderProgram,
} from "./render.js";
import type { MapTransform } from "./render.js";

const client = new ApiClient(window.location.origin);
let view: SessionView = initialView();
let transform: MapTransform | null = null;

const el = (id: string) => document.getElementById(id)!;
const mapBase = () => el("map-base") as HTMLCanvasElement;
const mapOverlay = () => el("map-overlay") as HTMLCanvasElement;

function banner(message: string | null): void {
  const box = el("banner");
  box.textContent = message ?? "";
  box.classList.toggle("visible", message !== null);
}

function renderFrames(): void {
  if (!view.views) return;
  for (const frame of view.views.frames) {
    const canvas = document.getElementById(`cam-${frame.frame}`) as HTMLCanvasElement | null;
    if (canvas) renderCameraPanel(canvas, frame, view.lastReport);
  }
}

function renderMap(): void {
  transform = renderMapBase(mapBase(), view);
  const overlay = mapOverlay();
  overlay.width = mapBase().width;
  overlay.height = mapBase().height;
  if (transform) renderOverlay(overlay, view, transform);
}

function renderPose(): void {
  if (transform) renderOverlay(mapOverlay(), view, transform);
  el("pose-readout").textContent =
    `x ${view.pose.x.toFixed(2)}  y ${view.pose.y.toFixed(2)}  yaw ${view.pose.yaw.toFixed(2)}`;
}

async function reloadFromServer(): Promise<void> {
  // the console is stateless: everything re-derives from GET endpoints
  const [state, views, map] = await Promise.all([
    client.state(),
    client.views(),
    client.map(),
  ]);
  view = loadFromServer(view, state, views, map);
  el("scene-name").textContent = view.scene;
  renderFrames();
  renderMap();
  renderPose();
}

function setBusy(busy: boolean): void {
  (el("command-input") as HTMLInputElement).disabled = busy;
  (el("submit") as HTMLButtonElement).disabled = busy;
  el("busy-note").textContent = busy ? "command in progress" : "";
}

async function submitCommand(): Promise<void> {
  const text = (el("command-input") as HTMLInputElement).value.trim();
  if (!text) return;
  const fixture = (el("fixture-input") as HTMLInputElement).value.trim() || null;
  const target = (el("target-input") as HTMLInputElement).value.trim() || null;
  view.representation = (el("rep-b") as HTMLInputElement).checked ? "B" : "A";
  view = { ...view, poseTrail: [], busy: true };
  setBusy(true);
  banner(null);
  try {
    const response = await client.command(commandBody(view, text, fixture, target));
    if (response.status === 409) {
      banner("command in progress");
      return; // stays disabled until the status:idle event arrives
    }
    if (!response.report) {
      banner(`request failed: ${response.error}`);
      setBusy(false);
      return;
    }
    view = applyReport(view, response.report);
    renderBadges(el("badges"), response.report);
    renderProgram(el("program"), response.report);
    renderFrames();
    renderPose();
    // views changed with the pose: refresh ground truth from the server
    await reloadFromServer();
    setBusy(false);
  } catch (err) {
    banner(`transport failure: ${err}`);
    setBusy(false);
  }
}

function start(): void {
  el("submit").addEventListener("click", () => void submitCommand());
  el("command-input").addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") void submitCommand();
  });
  el("reload").addEventListener("click", () => void reloadFromServer());
  client.openEvents((event) => {
    view = applyWsEvent(view, event);
    if (event.type === "pose") {
      renderPose(); // overlay repaint only; the base map stays as-is
    } else if (event.type === "status" && event.state === "idle") {
      setBusy(false);
    }
  });
  void reloadFromServer();
}

window.addEventListener("DOMContentLoaded", start);
