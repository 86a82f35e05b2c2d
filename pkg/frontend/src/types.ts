// Payload types mirroring the service API. The server is authoritative:
// the client never derives probabilities or parameters on its own.

export type Phase =
  | "awaiting_confidence"
  | "awaiting_counter"
  | "awaiting_ranking"
  | "agent_turn"
  | "ended";

export interface ArgumentCard {
  id: string;
  display: string;
}

export interface TranscriptEvent {
  t: number;
  speaker: "agent" | "human";
  argument: string;
  display: string;
  confidence: number | null;
  attacks: string | null;
}

export interface CandidateView {
  id: string;
  label: string;
  probability: number;
}

export interface BeliefPayload {
  atoms: string[];
  probs: number[];
  timestep: number;
}

export interface SessionView {
  id: string;
  scenario_id: string;
  phase: Phase;
  round: number;
  max_rounds: number;
  ended_reason: string | null;
  confidence_scale: number[] | null;
  transcript: TranscriptEvent[];
  pending_argument: ArgumentCard | null;
  offered_counters: ArgumentCard[];
  candidates: CandidateView[];
  belief: BeliefPayload;
  live_params: { s: number; r: number };
  model_rankings: { round: number; order: string[] }[];
  final_argument_ranking: string[];
}

export interface ScenarioSummary {
  id: string;
  atoms: string[];
  n_arguments: number;
  candidate_models: string[];
  max_rounds: number;
  confidence_scale: number[] | null;
}

export interface ApiError {
  code: string;
  message: string;
  phase: string;
}
