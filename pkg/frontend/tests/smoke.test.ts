// Console smoke test against a real server: spawns `langnav serve` with the
// theater scene, submits the fire-extinguisher fixture through the console's
// client/state core, and checks badges, waypoint marker, path polyline, and
// the live pose stream; then reconstructs the view from GET endpoints alone.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { ApiClient } from "../src/api.js";
import type { WebSocketLike } from "../src/api.js";
import {
  applyReport,
  applyWsEvent,
  commandBody,
  initialView,
  loadFromServer,
  pathPolyline,
  stageBadges,
  waypointMarker,
} from "../src/state.js";
import type { SessionView } from "../src/state.js";

const PORT = 8977;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

const nodeWsFactory = (url: string): WebSocketLike =>
  new WebSocket(url) as unknown as WebSocketLike;

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/state`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("langnav serve did not come up in time");
}

beforeAll(async () => {
  server = spawn("langnav", ["serve", "--scene", "theater", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForServer();
}, 45_000);

afterAll(() => {
  server?.kill();
});

describe("console smoke test (live server)", () => {
  it("runs the fire-extinguisher fixture and renders the full session view", async () => {
    const client = new ApiClient(BASE, nodeWsFactory);

    // initial load: the view is assembled purely from GET endpoints
    let view: SessionView = loadFromServer(
      initialView(),
      await client.state(),
      await client.views(),
      await client.map(),
    );
    expect(view.scene).toBe("theater");
    expect(view.views?.frames.map((f) => f.frame).sort()).toEqual([
      "front",
      "left",
      "right",
    ]);
    const startPose = view.pose;

    // subscribe to the pose stream, then submit the command
    const events = client.openEvents((event) => {
      view = applyWsEvent(view, event);
    });
    const response = await client.command(
      commandBody(view, "Go to the fire extinguisher", "theater/go_to_the_fire_extinguisher", "fire_extinguisher"),
    );
    expect(response.status).toBe(200);
    expect(response.report).not.toBeNull();
    const report = response.report!;
    view = applyReport(view, report);

    // four stage badges, all green for this fixture
    const badges = stageBadges(report);
    expect(badges).toHaveLength(4);
    expect(badges.every((b) => b.passed)).toBe(true);

    // waypoint marker and path polyline straight from the payload
    expect(waypointMarker(report)).not.toBeNull();
    const polyline = pathPolyline(report);
    expect(polyline.length).toBeGreaterThanOrEqual(2);
    expect(report.program_text).toContain("def execute_command");

    // at least one live pose-stream update arrived during the follow
    await new Promise((resolve) => setTimeout(resolve, 300));
    events.close();
    expect(view.streamEvents).toBeGreaterThanOrEqual(1);
    expect(view.pose).not.toEqual(startPose);

    // refresh ground truth at the new pose (what the console does after a run)
    view = loadFromServer(view, await client.state(), await client.views(), await client.map());

    // "reload": a brand-new view reconstructed from GET endpoints alone is
    // identical to the refreshed session view (console holds no ground truth)
    const reloaded = loadFromServer(
      initialView(),
      await client.state(),
      await client.views(),
      await client.map(),
    );
    expect(reloaded.scene).toBe("theater");
    expect(reloaded.pose).toEqual(report.final_pose);
    expect(reloaded.map).toEqual(view.map);
    expect(reloaded.views).toEqual(view.views);
  }, 60_000);

  it("second command starts from the advanced pose and 400s on bad bodies", async () => {
    const client = new ApiClient(BASE, nodeWsFactory);
    const bad = await client.command({ text: "" });
    expect(bad.status).toBe(400);
    const badScene = await client.command({ text: "go", scene: "lobby" });
    expect(badScene.status).toBe(400);
    expect(badScene.error).toContain("lobby");
  });
});
