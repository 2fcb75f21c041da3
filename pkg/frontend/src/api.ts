// Thin typed client over the navigation service. The WebSocket constructor
// is injectable so the same client runs in the browser and in Node tests.

import type {
  CommandReport,
  MapPayload,
  StatePayload,
  ViewsPayload,
  WsEvent,
} from "./types.js";

export interface WebSocketLike {
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((err: unknown) => void) | null;
  close(): void;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export interface CommandResponse {
  status: number;
  report: CommandReport | null;
  error: string | null;
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly wsFactory?: WebSocketFactory,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(`${this.base}${path}`);
    if (!response.ok) {
      throw new Error(`GET ${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  state(): Promise<StatePayload> {
    return this.getJson<StatePayload>("/api/state");
  }

  views(): Promise<ViewsPayload> {
    return this.getJson<ViewsPayload>("/api/views");
  }

  map(): Promise<MapPayload> {
    return this.getJson<MapPayload>("/api/map");
  }

  async command(body: Record<string, unknown>): Promise<CommandResponse> {
    const response = await fetch(`${this.base}/api/command`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      return {
        status: response.status,
        report: null,
        error: (payload && payload.error) || `HTTP ${response.status}`,
      };
    }
    return { status: response.status, report: payload as CommandReport, error: null };
  }

  /** Subscribe to pose/status events; returns a handle that closes the socket. */
  openEvents(onEvent: (event: WsEvent) => void): { close(): void } {
    const url = this.base.replace(/^http/, "ws") + "/ws";
    const factory: WebSocketFactory =
      this.wsFactory ?? ((u: string) => new WebSocket(u) as unknown as WebSocketLike);
    const socket = factory(url);
    socket.onmessage = (event) => {
      try {
        onEvent(JSON.parse(String(event.data)) as WsEvent);
      } catch {
        // malformed event: ignore rather than corrupt state
      }
    };
    socket.onerror = () => undefined;
    return { close: () => socket.close() };
  }
}
