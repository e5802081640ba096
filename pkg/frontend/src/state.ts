/** Client-side session state and its reducer.
 *
 * The server is the single source of truth: every field that reaches the
 * screen comes out of the last SessionView or WorldMap response. The reducer
 * only tracks which response is current plus transient UI bits (selected
 * node, in-flight request flag, last error envelope). No metric is ever
 * computed here.
 */

import type {
  ErrorEnvelope,
  SessionView,
  WorldMap,
} from "./types.js";

export interface ClientSessionState {
  worldId: string | null;
  map: WorldMap | null;
  sessionId: string | null;
  view: SessionView | null;
  selectedNode: string | null;
  pending: boolean;
  error: ErrorEnvelope | null;
}

export const initialState: ClientSessionState = {
  worldId: null,
  map: null,
  sessionId: null,
  view: null,
  selectedNode: null,
  pending: false,
  error: null,
};

export type StateEvent =
  | { kind: "reset" }
  | { kind: "request-started" }
  | { kind: "request-failed"; error: ErrorEnvelope }
  | { kind: "map-loaded"; map: WorldMap }
  | { kind: "session-created"; sessionId: string }
  | { kind: "view-received"; view: SessionView }
  | { kind: "node-selected"; node: string };

export type Screen = "world-picker" | "utterance" | "navigate" | "done";

/** Node ids the user may move to right now: exactly the last view's
 * neighbor_options, and only while the session is awaiting moves. */
export function moveTargets(state: ClientSessionState): string[] {
  const v = state.view;
  if (!v || v.phase !== "INSTRUCTED") {
    return [];
  }
  return v.neighbor_options.map((o) => o.to);
}

export function canMoveTo(state: ClientSessionState, node: string): boolean {
  return !state.pending && moveTargets(state).includes(node);
}

export function screenOf(state: ClientSessionState): Screen {
  if (state.map === null || state.sessionId === null) {
    return "world-picker";
  }
  const v = state.view;
  if (v === null || v.phase === "AWAIT_UTTERANCE") {
    return "utterance";
  }
  return v.phase === "DONE" ? "done" : "navigate";
}

export function reduce(
  state: ClientSessionState,
  event: StateEvent,
): ClientSessionState {
  switch (event.kind) {
    case "reset":
      return initialState;
    case "request-started":
      return { ...state, pending: true, error: null };
    case "request-failed":
      return { ...state, pending: false, error: event.error };
    case "map-loaded":
      return {
        ...state,
        map: event.map,
        worldId: event.map.world_id,
        pending: false,
        error: null,
      };
    case "session-created":
      return {
        ...state,
        sessionId: event.sessionId,
        view: null,
        selectedNode: null,
        pending: false,
        error: null,
      };
    case "view-received": {
      const keep =
        state.selectedNode !== null &&
        event.view.neighbor_options.some((o) => o.to === state.selectedNode);
      return {
        ...state,
        view: event.view,
        worldId: event.view.world_id,
        sessionId: event.view.session_id,
        selectedNode: keep ? state.selectedNode : null,
        pending: false,
        error: null,
      };
    }
    case "node-selected": {
      // selecting anything that is not a legal move target is a no-op
      if (!moveTargets(state).includes(event.node)) {
        return state;
      }
      return { ...state, selectedNode: event.node };
    }
  }
}
