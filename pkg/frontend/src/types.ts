/** JSON shapes exchanged with the wayfinder HTTP service.
 *
 * These mirror the server's serializers field for field; the client never
 * derives or recomputes any of the numbers it displays.
 */

export interface NeighborOption {
  to: string;
  bearing: number;
  labels: string[];
}

export type Phase = "AWAIT_UTTERANCE" | "INSTRUCTED" | "DONE";

export interface FinalReport {
  episode_id: string;
  goal: string;
  path: string[];
  shortest_len_m: number;
  walked_len_m: number;
  error_m: number;
  success: boolean;
  oracle_success: boolean;
  spl_term: number;
  diagnostics?: Record<string, unknown>;
}

export interface SessionView {
  session_id: string;
  world_id: string;
  phase: Phase;
  user_node: string;
  current_instructions: string;
  neighbor_options: NeighborOption[];
  moves_used: number;
  budget: number;
  final_report: FinalReport | null;
}

export interface MapNode {
  id: string;
  x: number;
  y: number;
  labels: string[];
}

export interface MapEdge {
  a: string;
  b: string;
  labels: string[];
}

export interface WorldMap {
  world_id: string;
  nodes: MapNode[];
  edges: MapEdge[];
}

/** Error envelope returned by the server for every 4xx/5xx. */
export interface ErrorEnvelope {
  code: string;
  message: string;
  detail: unknown;
}

export interface UtteranceDoc {
  text: string;
  role: "describe_position" | "describe_goal";
}

export interface EpisodeSpec {
  episode_id: string;
  world_id: string;
  true_start: string;
  true_goal: string;
  start_utterance: UtteranceDoc;
  goal_utterance: UtteranceDoc;
}
