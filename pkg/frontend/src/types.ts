// Server payload shapes, field for field.

export type CandidateStatus =
  | "selected"
  | "contacted"
  | "unreachable"
  | "declined"
  | "trained";

export interface NetworkNode {
  id: string;
}

export interface NetworkEdge {
  u: string;
  v: string;
  existence_prob: number;
  provenance: "platform" | "field" | "both";
}

export interface NetworkPayload {
  propagation_prob: number;
  nodes: NetworkNode[];
  edges: NetworkEdge[];
}

export interface BeliefPayload {
  per_node_prob: Record<string, number>;
  round_index: number;
  trained: string[];
}

export interface CandidateEntry {
  label: string;
  gain: number;
  status: CandidateStatus;
}

export interface RoundPayload {
  index: number;
  entries: CandidateEntry[];
  belief_before: BeliefPayload;
  belief_after: BeliefPayload | null;
  opened_at: string;
  closed_at: string | null;
}

export interface CampaignConfigPayload {
  k_select: number;
  k_train: number;
  num_rounds: number;
  num_samples: number;
  runs_per_sample: number;
  propagation_prob: number | null;
  master_seed: number;
  method: string;
  workers: number;
}

export interface CampaignPayload {
  config: CampaignConfigPayload;
  network_path: string;
  network_hash: string;
  belief: BeliefPayload;
  rounds: RoundPayload[];
  num_events: number;
  last_event_hash: string;
  state_hash: string;
  open_round: number | null;
  exclusions: string[];
}

export interface RankedCandidate {
  label: string;
  gain: number;
}

export interface OpenRoundResponse {
  round: number;
  candidates: RankedCandidate[];
}

export interface CloseRoundResponse {
  round: number;
  trained: string[];
  belief: BeliefPayload;
  state_hash: string;
}

export interface RecordStatusResponse {
  round: number;
  label: string;
  status: string;
}

export interface WhatIfResponse {
  candidates: RankedCandidate[];
  method: string;
  exclusions: string[];
}

export interface ReportResponse {
  outcomes: unknown;
  text: string;
}
