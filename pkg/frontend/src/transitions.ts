// Mirror of the server's candidate state machine. The UI only ever offers
// transitions from this table; the server still enforces its own copy.

import type { CandidateStatus } from "./types.js";

const LEGAL: Record<CandidateStatus, CandidateStatus[]> = {
  selected: ["contacted", "unreachable"],
  contacted: ["trained", "declined"],
  // terminal within the round (unreachable candidates become eligible again
  // in later rounds, but their status this round is settled)
  trained: [],
  declined: [],
  unreachable: [],
};

export function legalNext(status: CandidateStatus): CandidateStatus[] {
  return LEGAL[status].slice();
}

export function isSettled(status: CandidateStatus): boolean {
  return LEGAL[status].length === 0;
}

/** A round can close once no candidate has a pending decision. */
export function canClose(statuses: CandidateStatus[]): boolean {
  return statuses.length > 0 && statuses.every(isSettled);
}
