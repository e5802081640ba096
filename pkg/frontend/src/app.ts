/** DOM glue: wires the reducer, the map renderer, and the API client into
 * the four screens (world picker, utterance entry, navigation, final score).
 *
 * All state transitions go through reduce(); all numbers on screen come out
 * of server responses. Mutations run as sequential awaited requests and the
 * handle exposes idle() so scripted tests can wait for them.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderMapSvg } from "./map.js";
import {
  type ClientSessionState,
  initialState,
  moveTargets,
  reduce,
  screenOf,
  type StateEvent,
} from "./state.js";
import type { ErrorEnvelope, FinalReport } from "./types.js";

export interface AppHandle {
  getState(): ClientSessionState;
  /** Resolves once no action is in flight. */
  idle(): Promise<void>;
  actions: {
    loadWorld(worldId: string): Promise<void>;
    uploadWorld(json: string): Promise<void>;
    sendUtterance(text: string, goalText: string): Promise<void>;
    doMove(to: string): Promise<void>;
    doFinish(claimArrived: boolean): Promise<void>;
    restore(sessionId: string): Promise<void>;
    reset(): void;
  };
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function degrees(bearing: number): string {
  return `${Math.round((bearing * 180) / Math.PI)}°`;
}

function errorBanner(err: ErrorEnvelope | null): string {
  if (!err) {
    return "";
  }
  // envelope surfaced verbatim
  return `<div class="error-banner" data-error-code="${esc(err.code)}">` +
    `${esc(err.code)}: ${esc(err.message)}</div>`;
}

function reportPanel(r: FinalReport): string {
  const badge = r.success
    ? `<span class="badge badge-success" data-success="true">success</span>`
    : `<span class="badge badge-failure" data-success="false">failure</span>`;
  return (
    `<div class="final-report">` +
    `<h2>Session complete ${badge}</h2>` +
    `<dl>` +
    `<dt>Goal</dt><dd data-field="goal">${esc(r.goal)}</dd>` +
    `<dt>Error</dt><dd data-field="error">${r.error_m.toFixed(1)} m</dd>` +
    `<dt>Success</dt><dd data-field="success">${r.success ? "yes" : "no"}</dd>` +
    `<dt>Oracle success</dt><dd data-field="oracle">${r.oracle_success ? "yes" : "no"}</dd>` +
    `<dt>SPL</dt><dd data-field="spl">${r.spl_term.toFixed(3)}</dd>` +
    `<dt>Walked</dt><dd data-field="walked">${r.walked_len_m.toFixed(1)} m ` +
    `(shortest ${r.shortest_len_m.toFixed(1)} m)</dd>` +
    `</dl>` +
    `<button id="new-session">New session</button>` +
    `</div>`
  );
}

export function init(root: HTMLElement, client: ApiClient): AppHandle {
  let state: ClientSessionState = initialState;
  let inFlight = 0;
  let idleResolvers: Array<() => void> = [];

  function dispatch(event: StateEvent): void {
    state = reduce(state, event);
    render();
  }

  function settle(): void {
    if (inFlight === 0) {
      const waiting = idleResolvers;
      idleResolvers = [];
      for (const r of waiting) {
        r();
      }
    }
  }

  function remember(sessionId: string): void {
    // keep the session id in the URL so a refresh can restore it
    if (typeof window !== "undefined" && window.location) {
      window.location.hash = `s=${encodeURIComponent(sessionId)}`;
    }
  }

  async function run(work: () => Promise<void>): Promise<void> {
    inFlight += 1;
    dispatch({ kind: "request-started" });
    try {
      await work();
    } catch (err) {
      const envelope: ErrorEnvelope =
        err instanceof ApiError
          ? err.envelope
          : { code: "NetworkError", message: String(err), detail: null };
      dispatch({ kind: "request-failed", error: envelope });
    } finally {
      inFlight -= 1;
      settle();
    }
  }

  const actions: AppHandle["actions"] = {
    loadWorld: (worldId) =>
      run(async () => {
        const map = await client.getMap(worldId);
        dispatch({ kind: "map-loaded", map });
        const created = await client.createSession(map.world_id, "random");
        dispatch({ kind: "session-created", sessionId: created.session_id });
        remember(created.session_id);
        const view = await client.getSession(created.session_id);
        dispatch({ kind: "view-received", view });
      }),
    uploadWorld: (json) =>
      run(async () => {
        let doc: unknown;
        try {
          doc = JSON.parse(json);
        } catch {
          throw new ApiError(400, {
            code: "ParseError",
            message: "world JSON does not parse",
            detail: null,
          });
        }
        const added = await client.addWorld(doc);
        const map = await client.getMap(added.world_id);
        dispatch({ kind: "map-loaded", map });
        const created = await client.createSession(map.world_id, "random");
        dispatch({ kind: "session-created", sessionId: created.session_id });
        remember(created.session_id);
        const view = await client.getSession(created.session_id);
        dispatch({ kind: "view-received", view });
      }),
    sendUtterance: (text, goalText) =>
      run(async () => {
        if (!state.sessionId) {
          return;
        }
        const view = await client.sendUtterance(state.sessionId, text, goalText);
        dispatch({ kind: "view-received", view });
      }),
    doMove: (to) =>
      run(async () => {
        // illegal moves have no button; this guard covers stale state
        if (!state.sessionId || !moveTargets(state).includes(to)) {
          return;
        }
        const view = await client.move(state.sessionId, to);
        dispatch({ kind: "view-received", view });
      }),
    doFinish: (claimArrived) =>
      run(async () => {
        if (!state.sessionId) {
          return;
        }
        const view = await client.finish(state.sessionId, claimArrived);
        dispatch({ kind: "view-received", view });
      }),
    restore: (sessionId) =>
      run(async () => {
        const view = await client.getSession(sessionId);
        const map = await client.getMap(view.world_id);
        dispatch({ kind: "map-loaded", map });
        dispatch({ kind: "session-created", sessionId });
        dispatch({ kind: "view-received", view });
      }),
    reset: () => dispatch({ kind: "reset" }),
  };

  function mapSection(): string {
    if (!state.map) {
      return "";
    }
    return `<div class="map">${renderMapSvg(state.map, state.view)}</div>`;
  }

  function statusLine(): string {
    const v = state.view;
    if (!v) {
      return "";
    }
    return (
      `<p class="status">At <strong data-field="user-node">${esc(v.user_node)}</strong>` +
      ` &middot; moves <span data-field="moves">${v.moves_used}</span>` +
      ` / <span data-field="budget">${v.budget}</span></p>`
    );
  }

  function markup(): string {
    const screen = screenOf(state);
    const busy = state.pending ? " disabled" : "";
    if (screen === "world-picker") {
      return (
        errorBanner(state.error) +
        `<section class="screen" data-screen="world-picker">` +
        `<h1>wayfinder</h1>` +
        `<p>Load a world that the server already knows, or paste a world document.</p>` +
        `<label>World id <input id="world-id" type="text" placeholder="grid-4x4-s9"></label>` +
        `<button id="load-world"${busy}>Load world</button>` +
        `<details><summary>Upload world JSON</summary>` +
        `<textarea id="world-json" rows="8"></textarea>` +
        `<button id="upload-world"${busy}>Upload</button></details>` +
        `</section>`
      );
    }
    if (screen === "utterance") {
      return (
        errorBanner(state.error) +
        `<section class="screen" data-screen="utterance">` +
        `<h1>Where are you, and where to?</h1>` +
        mapSection() +
        `<label>Describe where you are ` +
        `<input id="where-i-am" type="text" placeholder="by the lobby"></label>` +
        `<label>Describe where you want to go ` +
        `<input id="where-i-want" type="text" placeholder="the atrium"></label>` +
        `<button id="send-utterance"${busy}>Ask for directions</button>` +
        `</section>`
      );
    }
    if (screen === "navigate") {
      const v = state.view!;
      const buttons = v.neighbor_options
        .map((o) => {
          const extra = o.labels.length > 0 ? ` (${esc(o.labels.join(", "))})` : "";
          return (
            `<button class="move" data-to="${esc(o.to)}"${busy}>` +
            `${esc(o.to)} &mdash; ${degrees(o.bearing)}${extra}</button>`
          );
        })
        .join("");
      return (
        errorBanner(state.error) +
        `<section class="screen" data-screen="navigate">` +
        statusLine() +
        `<blockquote id="instructions" data-field="instructions">` +
        `${esc(v.current_instructions)}</blockquote>` +
        mapSection() +
        `<div class="moves"><h3>Move to</h3>${buttons}</div>` +
        `<div class="finish">` +
        `<button id="claim-arrived"${busy}>I have arrived</button>` +
        `<button id="give-up"${busy}>Give up</button>` +
        `</div>` +
        `</section>`
      );
    }
    const v = state.view!;
    return (
      errorBanner(state.error) +
      `<section class="screen" data-screen="done">` +
      statusLine() +
      mapSection() +
      (v.final_report ? reportPanel(v.final_report) : "") +
      `</section>`
    );
  }

  function render(): void {
    const saved = new Map<string, string>();
    for (const id of ["world-id", "world-json", "where-i-am", "where-i-want"]) {
      const el = root.querySelector<HTMLInputElement | HTMLTextAreaElement>(`#${id}`);
      if (el) {
        saved.set(id, el.value);
      }
    }
    root.innerHTML = markup();
    for (const [id, value] of saved) {
      const el = root.querySelector<HTMLInputElement | HTMLTextAreaElement>(`#${id}`);
      if (el) {
        el.value = value;
      }
    }
    wire();
  }

  function valueOf(id: string): string {
    const el = root.querySelector<HTMLInputElement | HTMLTextAreaElement>(`#${id}`);
    return el ? el.value : "";
  }

  function wire(): void {
    root.querySelector("#load-world")?.addEventListener("click", () => {
      void actions.loadWorld(valueOf("world-id").trim());
    });
    root.querySelector("#upload-world")?.addEventListener("click", () => {
      void actions.uploadWorld(valueOf("world-json"));
    });
    root.querySelector("#send-utterance")?.addEventListener("click", () => {
      void actions.sendUtterance(valueOf("where-i-am"), valueOf("where-i-want"));
    });
    for (const btn of root.querySelectorAll<HTMLButtonElement>("button.move")) {
      btn.addEventListener("click", () => {
        void actions.doMove(btn.dataset.to ?? "");
      });
    }
    root.querySelector("#claim-arrived")?.addEventListener("click", () => {
      void actions.doFinish(true);
    });
    root.querySelector("#give-up")?.addEventListener("click", () => {
      void actions.doFinish(false);
    });
    root.querySelector("#new-session")?.addEventListener("click", () => {
      actions.reset();
    });
  }

  render();

  return {
    getState: () => state,
    idle: () =>
      inFlight === 0
        ? Promise.resolve()
        : new Promise((resolve) => idleResolvers.push(resolve)),
    actions,
  };
}

/** Browser entry point; inert under tests (no data-autoinit there). */
export function autoInit(): void {
  if (typeof document === "undefined") {
    return;
  }
  const root = document.getElementById("app");
  if (!root || root.dataset.autoinit === undefined) {
    return;
  }
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? window.location.origin;
  const handle = init(root, new ApiClient(base));
  const hash = new URLSearchParams(window.location.hash.replace(/^#/, ""));
  const sid = hash.get("s");
  if (sid) {
    void handle.actions.restore(sid);
  }
}

autoInit();
