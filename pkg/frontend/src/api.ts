// Typed client for the local session service. Every payload that comes
// back from the server can be observed through `onPayload`, which the
// integration tests use to verify the correct orientation is never
// disclosed before a response is submitted.

export type Orientation = "up" | "down" | "left" | "right";

export interface LevelJson {
  index: number;
  pixel_shift: number;
  arcsec: number;
  arcsec_rounded: number;
}

export interface LevelTableJson {
  distance_m: number;
  scale_k: number | null;
  levels: LevelJson[];
}

export interface CreateSessionRequest {
  ppi: number;
  distance_m: number;
  seed?: number;
  width_px?: number;
  height_px?: number;
}

export interface CreateSessionResponse {
  session_id: string;
  seed: number;
  level_table: LevelTableJson;
}

export interface ResponseResult {
  correct: boolean;
  finished: boolean;
  trial_count: number;
  outcome: number | "OL" | null;
  outcome_rounded: number | "OL" | null;
}

export type PayloadListener = (kind: string, payload: unknown) => void;

export interface SessionApi {
  createSession(body: CreateSessionRequest): Promise<CreateSessionResponse>;
  fetchStimulus(sessionId: string): Promise<Blob>;
  postResponse(
    sessionId: string,
    orientation: Orientation,
    elapsedMs: number,
  ): Promise<ResponseResult>;
  fetchSession(sessionId: string): Promise<unknown>;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient implements SessionApi {
  constructor(
    private baseUrl: string,
    private onPayload?: PayloadListener,
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async json<T>(kind: string, path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) {
      throw new ApiError(res.status, `${path} failed with ${res.status}`);
    }
    const payload = (await res.json()) as T;
    this.onPayload?.(kind, payload);
    return payload;
  }

  createSession(body: CreateSessionRequest): Promise<CreateSessionResponse> {
    return this.json("create", "/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async fetchStimulus(sessionId: string): Promise<Blob> {
    const res = await fetch(`${this.baseUrl}/sessions/${sessionId}/stimulus`);
    if (!res.ok) {
      throw new ApiError(res.status, `stimulus fetch failed with ${res.status}`);
    }
    const blob = await res.blob();
    this.onPayload?.("stimulus", { type: blob.type, size: blob.size });
    return blob;
  }

  postResponse(
    sessionId: string,
    orientation: Orientation,
    elapsedMs: number,
  ): Promise<ResponseResult> {
    return this.json("response", `/sessions/${sessionId}/response`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ orientation, elapsed_ms: Math.max(0, Math.round(elapsedMs)) }),
    });
  }

  fetchSession(sessionId: string): Promise<unknown> {
    return this.json("session", `/sessions/${sessionId}`, {});
  }
}
