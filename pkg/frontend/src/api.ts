/** Typed fetch client for the wayfinder service.
 *
 * All mutations go through sequential awaited requests; the caller owns
 * ordering. Non-2xx responses raise ApiError carrying the server's error
 * envelope verbatim so the UI can surface it unchanged.
 */

import type {
  EpisodeSpec,
  ErrorEnvelope,
  SessionView,
  WorldMap,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly envelope: ErrorEnvelope;

  constructor(status: number, envelope: ErrorEnvelope) {
    super(envelope.message);
    this.name = "ApiError";
    this.status = status;
    this.envelope = envelope;
  }
}

async function decode<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let envelope: ErrorEnvelope;
  try {
    envelope = (await resp.json()) as ErrorEnvelope;
  } catch {
    envelope = { code: "HttpError", message: `HTTP ${resp.status}`, detail: null };
  }
  throw new ApiError(resp.status, envelope);
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  /** fetchFn is injectable so tests can run against a scripted stub. */
  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    const bound =
      typeof fetch === "function" ? fetch.bind(globalThis) : undefined;
    const fn = fetchFn ?? bound;
    if (!fn) {
      throw new Error("no fetch implementation available");
    }
    this.fetchFn = fn;
  }

  private async get<T>(path: string): Promise<T> {
    return decode<T>(await this.fetchFn(this.base + path));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return decode<T>(resp);
  }

  async addWorld(doc: unknown): Promise<{ world_id: string }> {
    return this.post("/worlds", doc);
  }

  async getMap(worldId: string): Promise<WorldMap> {
    return this.get(`/worlds/${encodeURIComponent(worldId)}/map`);
  }

  async createSession(
    worldId: string,
    episodeSpec: EpisodeSpec | "random" = "random",
  ): Promise<{ session_id: string }> {
    return this.post("/sessions", { world_id: worldId, episode_spec: episodeSpec });
  }

  async getSession(sessionId: string): Promise<SessionView> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  async sendUtterance(
    sessionId: string,
    text: string,
    goalText: string,
  ): Promise<SessionView> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/utterance`, {
      text,
      goal_text: goalText,
    });
  }

  async move(sessionId: string, to: string): Promise<SessionView> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/move`, { to });
  }

  async finish(sessionId: string, claimArrived: boolean): Promise<SessionView> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/finish`, {
      claim_arrived: claimArrived,
    });
  }

  async getReport(batchId: string): Promise<Record<string, unknown>> {
    return this.get(`/reports/${encodeURIComponent(batchId)}`);
  }
}
