import type { EventRef, Refusal, Snapshot } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export type StepResult =
  | { ok: true; snapshot: Snapshot }
  | { ok: false; reason: string };

/** Thin typed client; every state change round-trips through the service. */
export class AnimatorApi {
  constructor(readonly baseUrl: string) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload: unknown = await response.json();
    if (!response.ok) {
      const message =
        typeof payload === "object" && payload !== null && "error" in payload
          ? String((payload as { error: unknown }).error)
          : response.statusText;
      throw new ApiError(response.status, message);
    }
    return payload;
  }

  async listSpecs(): Promise<string[]> {
    const out = (await this.request("GET", "/specs")) as { specs: string[] };
    return out.specs;
  }

  async createSession(specName: string): Promise<{ sessionId: string; snapshot: Snapshot }> {
    return (await this.request("POST", "/sessions", { specName })) as {
      sessionId: string;
      snapshot: Snapshot;
    };
  }

  async state(sessionId: string): Promise<Snapshot> {
    return (await this.request("GET", `/sessions/${sessionId}/state`)) as Snapshot;
  }

  /** A 409 is a refusal, not an error: the caller shows it and moves on. */
  async step(sessionId: string, event: EventRef, choiceIndex: number): Promise<StepResult> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/step`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ event, choiceIndex }),
    });
    const payload: unknown = await response.json();
    if (response.status === 409) {
      return { ok: false, reason: (payload as Refusal).reason };
    }
    if (!response.ok) {
      throw new ApiError(response.status, JSON.stringify(payload));
    }
    return { ok: true, snapshot: payload as Snapshot };
  }

  async undo(sessionId: string): Promise<Snapshot> {
    return (await this.request("POST", `/sessions/${sessionId}/undo`, {})) as Snapshot;
  }

  async reset(sessionId: string): Promise<Snapshot> {
    return (await this.request("POST", `/sessions/${sessionId}/reset`, {})) as Snapshot;
  }
}
