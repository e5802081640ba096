/** Shared fixtures: a four-node line world, canned session views, and a
 * scripted in-memory stand-in for the HTTP service.
 *
 * The stub plays the server role only; it may compute scores because the
 * real server does. The client under test must never do so.
 */

import type { FetchLike } from "../src/api.js";
import type {
  FinalReport,
  NeighborOption,
  Phase,
  SessionView,
  WorldMap,
} from "../src/types.js";

export const EAST = Math.PI / 2;
export const WEST = (3 * Math.PI) / 2;

export const LINE_MAP: WorldMap = {
  world_id: "line-4",
  nodes: [
    { id: "c0", x: 0, y: 0, labels: ["lobby"] },
    { id: "c1", x: 3, y: 0, labels: ["hallway"] },
    { id: "c2", x: 6, y: 0, labels: ["studio"] },
    { id: "c3", x: 9, y: 0, labels: ["atrium"] },
  ],
  edges: [
    { a: "c0", b: "c1", labels: [] },
    { a: "c1", b: "c2", labels: [] },
    { a: "c2", b: "c3", labels: ["stairs"] },
  ],
};

const ADJACENCY: Record<string, NeighborOption[]> = {
  c0: [{ to: "c1", bearing: EAST, labels: [] }],
  c1: [
    { to: "c0", bearing: WEST, labels: [] },
    { to: "c2", bearing: EAST, labels: [] },
  ],
  c2: [
    { to: "c1", bearing: WEST, labels: [] },
    { to: "c3", bearing: EAST, labels: ["stairs"] },
  ],
  c3: [{ to: "c2", bearing: WEST, labels: ["stairs"] }],
};

const INSTRUCTIONS: Record<string, string> = {
  c0: "Face east. Walk 9 meters.",
  c1: "Face east. Walk 6 meters.",
  c2: "Face east. Walk 3 meters.",
  c3: "You are at your destination.",
};

const DIST_TO_GOAL: Record<string, number> = { c0: 9, c1: 6, c2: 3, c3: 0 };

export function makeView(overrides: Partial<SessionView> = {}): SessionView {
  return {
    session_id: "s1",
    world_id: "line-4",
    phase: "AWAIT_UTTERANCE",
    user_node: "c0",
    current_instructions: "",
    neighbor_options: ADJACENCY["c0"]!,
    moves_used: 0,
    budget: 12,
    final_report: null,
    ...overrides,
  };
}

export function instructedView(node: string, moves = 0): SessionView {
  return makeView({
    phase: "INSTRUCTED",
    user_node: node,
    current_instructions: INSTRUCTIONS[node]!,
    neighbor_options: ADJACENCY[node]!,
    moves_used: moves,
  });
}

export function doneView(node: string, report: FinalReport): SessionView {
  return makeView({
    phase: "DONE",
    user_node: node,
    current_instructions: INSTRUCTIONS[node]!,
    neighbor_options: ADJACENCY[node]!,
    moves_used: report.path.length - 1,
    final_report: report,
  });
}

export function sampleReport(overrides: Partial<FinalReport> = {}): FinalReport {
  return {
    episode_id: "e1",
    goal: "c3",
    path: ["c0", "c1", "c2", "c3"],
    shortest_len_m: 9.0,
    walked_len_m: 9.0,
    error_m: 0.0,
    success: true,
    oracle_success: true,
    spl_term: 1.0,
    ...overrides,
  };
}

/** Minimal Response stand-in; the client only touches ok/status/json(). */
export function jsonResponse(status: number, body: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  } as unknown as Response;
}

export interface LoggedRequest {
  method: string;
  path: string;
  body: unknown;
}

interface StubSession {
  phase: Phase;
  userNode: string;
  movesUsed: number;
  budget: number;
  path: string[];
  report: FinalReport | null;
}

/** Scripted service double implementing the session HTTP contract over the
 * four-node line world with a fixed episode: start c0, goal c3. */
export class StubServer {
  requests: LoggedRequest[] = [];
  sessions = new Map<string, StubSession>();
  private nextId = 1;

  readonly fetch: FetchLike = async (input, init) => {
    const method = init?.method ?? "GET";
    const path = input.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    this.requests.push({ method, path, body });
    return this.route(method, path, body);
  };

  private error(status: number, code: string, message: string): Response {
    return jsonResponse(status, { code, message, detail: null });
  }

  private view(sid: string, s: StubSession): SessionView {
    return {
      session_id: sid,
      world_id: "line-4",
      phase: s.phase,
      user_node: s.userNode,
      current_instructions:
        s.phase === "AWAIT_UTTERANCE" ? "" : INSTRUCTIONS[s.userNode]!,
      neighbor_options: ADJACENCY[s.userNode]!,
      moves_used: s.movesUsed,
      budget: s.budget,
      final_report: s.phase === "DONE" ? s.report : null,
    };
  }

  private finalize(s: StubSession, claimArrived: boolean): void {
    const error = DIST_TO_GOAL[s.userNode]!;
    const walked = 3 * (s.path.length - 1);
    const success = claimArrived && error <= 3.0;
    s.report = {
      episode_id: "e1",
      goal: "c3",
      path: [...s.path],
      shortest_len_m: 9.0,
      walked_len_m: walked,
      error_m: error,
      success,
      oracle_success: error <= 3.0,
      spl_term: success ? 9.0 / Math.max(9.0, walked) : 0.0,
    };
    s.phase = "DONE";
  }

  private route(method: string, path: string, body: any): Response {
    if (method === "POST" && path === "/worlds") {
      if (typeof body !== "object" || body === null || !body.world_id) {
        return this.error(400, "ParseError", "world document is malformed");
      }
      return jsonResponse(200, { world_id: body.world_id });
    }

    let m = path.match(/^\/worlds\/([^/]+)\/map$/);
    if (method === "GET" && m) {
      if (m[1] !== "line-4") {
        return this.error(404, "NotFound", `unknown world ${m[1]}`);
      }
      return jsonResponse(200, LINE_MAP);
    }

    if (method === "POST" && path === "/sessions") {
      if (body.world_id !== "line-4") {
        return this.error(404, "NotFound", `unknown world ${body.world_id}`);
      }
      const sid = `s${this.nextId++}`;
      this.sessions.set(sid, {
        phase: "AWAIT_UTTERANCE",
        userNode: "c0",
        movesUsed: 0,
        budget: 12,
        path: ["c0"],
        report: null,
      });
      return jsonResponse(200, { session_id: sid });
    }

    m = path.match(/^\/sessions\/([^/]+)(\/(utterance|move|finish))?$/);
    if (!m) {
      return this.error(404, "NotFound", `no route ${path}`);
    }
    const sid = m[1]!;
    const s = this.sessions.get(sid);
    if (!s) {
      return this.error(404, "NotFound", `unknown session ${sid}`);
    }
    const action = m[3];

    if (method === "GET" && !action) {
      return jsonResponse(200, this.view(sid, s));
    }
    if (method === "POST" && action === "utterance") {
      if (s.phase !== "AWAIT_UTTERANCE") {
        return this.error(409, "IllegalTransition",
          `UTTERANCE not legal in phase ${s.phase}`);
      }
      if (!body.goal_text) {
        return this.error(400, "InvalidArgument",
          "first utterance must describe the goal");
      }
      s.phase = "INSTRUCTED";
      return jsonResponse(200, this.view(sid, s));
    }
    if (method === "POST" && action === "move") {
      if (s.phase !== "INSTRUCTED") {
        return this.error(409, "IllegalTransition",
          `MOVE not legal in phase ${s.phase}`);
      }
      const legal = ADJACENCY[s.userNode]!.some((o) => o.to === body.to);
      if (!legal) {
        return this.error(409, "NonAdjacentMove",
          `${body.to} is not adjacent to ${s.userNode}`);
      }
      s.userNode = body.to;
      s.movesUsed += 1;
      s.path.push(body.to);
      if (s.movesUsed >= s.budget) {
        this.finalize(s, false);
      }
      return jsonResponse(200, this.view(sid, s));
    }
    if (method === "POST" && action === "finish") {
      if (s.phase !== "INSTRUCTED") {
        return this.error(409, "IllegalTransition",
          `FINISH not legal in phase ${s.phase}`);
      }
      this.finalize(s, Boolean(body.claim_arrived));
      return jsonResponse(200, this.view(sid, s));
    }
    return this.error(404, "NotFound", `no route ${method} ${path}`);
  }
}
