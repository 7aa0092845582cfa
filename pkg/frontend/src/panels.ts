// HTML builders for the round and what-if panels. Buttons carry
// data-action attributes; main.ts owns the event wiring. Every status
// button offered comes from the legal-transition table, nothing else.

import { canClose, legalNext } from "./transitions.js";
import type {
  CampaignPayload,
  CandidateStatus,
  RankedCandidate,
  WhatIfResponse,
} from "./types.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function campaignSummaryHtml(camp: CampaignPayload): string {
  const cfg = camp.config;
  const closed = camp.rounds.filter((r) => r.closed_at !== null).length;
  const open = camp.open_round;
  const roundState = open !== null ? `round ${open} open` : "no open round";
  return (
    `<span>select ${cfg.k_select} / train ${cfg.k_train} / ` +
    `${closed}/${cfg.num_rounds} rounds closed</span>` +
    `<span>${roundState}</span>` +
    `<span>trained: ${camp.belief.trained.length ? esc(camp.belief.trained.join(", ")) : "none"}</span>` +
    `<span class="hash" title="${esc(camp.state_hash)}">state ${esc(camp.state_hash.slice(0, 12))}</span>`
  );
}

function candidateRowHtml(label: string, gain: number,
                          status: CandidateStatus): string {
  const actions = legalNext(status)
    .map(
      (next) =>
        `<button data-action="record" data-node="${esc(label)}" ` +
        `data-status="${next}">${next}</button>`,
    )
    .join("");
  return (
    `<tr class="status-${status}">` +
    `<td class="label">${esc(label)}</td>` +
    `<td class="gain">${gain.toFixed(3)}</td>` +
    `<td class="status">${status}</td>` +
    `<td class="actions">${actions}</td>` +
    `</tr>`
  );
}

export function roundPanelHtml(camp: CampaignPayload): string {
  const open = camp.rounds.find((r) => r.index === camp.open_round);
  const finished =
    camp.rounds.length >= camp.config.num_rounds &&
    camp.rounds.every((r) => r.closed_at !== null);

  if (!open) {
    const note = finished
      ? "<p>campaign complete</p>"
      : "<p>no round open</p>";
    const openBtn = finished
      ? ""
      : `<button data-action="open-round" class="primary">open round ${camp.rounds.length}</button>`;
    const history = camp.rounds
      .map(
        (r) =>
          `<li>round ${r.index}: trained ` +
          `${r.entries.filter((e) => e.status === "trained").map((e) => esc(e.label)).join(", ") || "none"}</li>`,
      )
      .join("");
    return `${note}${openBtn}${history ? `<ul class="history">${history}</ul>` : ""}`;
  }

  const rows = open.entries
    .map((e) => candidateRowHtml(e.label, e.gain, e.status))
    .join("");
  const closable = canClose(open.entries.map((e) => e.status));
  const closeBtn =
    `<button data-action="close-round" class="primary"` +
    `${closable ? "" : " disabled"}>close round ${open.index}</button>`;
  const pending = open.entries.filter((e) => legalNext(e.status).length > 0).length;
  const hint = closable
    ? ""
    : `<p class="hint">${pending} candidate(s) still need a decision</p>`;
  return (
    `<table class="candidates"><thead>` +
    `<tr><th>candidate</th><th>gain</th><th>status</th><th>record</th></tr>` +
    `</thead><tbody>${rows}</tbody></table>` +
    hint +
    closeBtn
  );
}

export function whatifResultHtml(res: WhatIfResponse): string {
  const rows = res.candidates
    .map(
      (c: RankedCandidate, i: number) =>
        `<tr><td>${i + 1}</td><td class="label">${esc(c.label)}</td>` +
        `<td class="gain">${c.gain.toFixed(3)}</td></tr>`,
    )
    .join("");
  const excl = res.exclusions.length
    ? `<p class="hint">excluding: ${esc(res.exclusions.join(", "))}</p>`
    : "";
  return (
    `<p class="hint">method: ${esc(res.method)} (preview only, nothing saved)</p>` +
    excl +
    `<table class="whatif-result"><thead><tr><th>#</th><th>candidate</th><th>gain</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

export function errorHtml(message: string): string {
  return `<span class="error-text">${esc(message)}</span>`;
}
