/** Typed client for the game service; fetch and WebSocket are injectable so
 * tests can run outside a real browser. */

import type { ActionName, ActionResult, Frame, ProgressView, StateView } from "./types.js";

export interface WebSocketLike {
  addEventListener(type: "message", listener: (ev: { data: unknown }) => void): void;
  addEventListener(type: "close" | "open" | "error", listener: () => void): void;
  close(): void;
}

export type WebSocketCtor = new (url: string) => WebSocketLike;

export interface ApiOptions {
  baseUrl: string;
  fetchFn?: typeof fetch;
  wsCtor?: WebSocketCtor;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface StreamHandle {
  close(): void;
}

export class GameApi {
  private readonly baseUrl: string;
  private readonly fetchFn: typeof fetch;
  private readonly wsCtor: WebSocketCtor;

  constructor(options: ApiOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.fetchFn = options.fetchFn ?? globalThis.fetch.bind(globalThis);
    this.wsCtor = options.wsCtor ?? (globalThis.WebSocket as unknown as WebSocketCtor);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    if (!response.ok) {
      let code = `http_${response.status}`;
      let message = text;
      try {
        const body = JSON.parse(text);
        code = body.error ?? code;
        message = body.message ?? body.detail ?? message;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, code, message);
    }
    return JSON.parse(text) as T;
  }

  createSession(player: string, level = 1, seed?: number): Promise<StateView> {
    const body: Record<string, unknown> = { player, level };
    if (seed !== undefined) body.seed = seed;
    return this.request<StateView>("/v1/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getState(sessionId: string): Promise<StateView> {
    return this.request<StateView>(`/v1/sessions/${sessionId}`);
  }

  act(sessionId: string, action: ActionName, concept?: string): Promise<ActionResult> {
    const body: Record<string, unknown> = { action };
    if (concept !== undefined) body.concept = concept;
    return this.request<ActionResult>(`/v1/sessions/${sessionId}/actions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getProgress(player: string): Promise<ProgressView> {
    return this.request<ProgressView>(`/v1/players/${player}/progress`);
  }

  /** Subscribe to the session's push stream; frames arrive in order. */
  stream(sessionId: string, onFrame: (frame: Frame) => void): StreamHandle {
    const wsUrl =
      this.baseUrl.replace(/^http/, "ws") + `/v1/sessions/${sessionId}/stream`;
    const socket = new this.wsCtor(wsUrl);
    socket.addEventListener("message", (ev) => {
      const data = typeof ev.data === "string" ? ev.data : String(ev.data);
      onFrame(JSON.parse(data) as Frame);
    });
    return { close: () => socket.close() };
  }
}
