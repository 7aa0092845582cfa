// Dashboard wiring: fetch state, render panels, translate clicks into
// service calls, re-render after every mutation.

import { ApiClient, ApiError } from "./api.js";
import { DEFAULT_SEED, layoutNetwork } from "./layout.js";
import type { Point } from "./layout.js";
import {
  campaignSummaryHtml,
  errorHtml,
  roundPanelHtml,
  whatifResultHtml,
} from "./panels.js";
import { legendHtml, networkSvg } from "./render.js";
import type { CampaignPayload, CandidateStatus, NetworkPayload } from "./types.js";

const VIEW_W = 820;
const VIEW_H = 560;

const api = new ApiClient("");

let net: NetworkPayload | null = null;
let positions: Map<string, Point> = new Map();

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found;
}

function showError(err: unknown): void {
  const msg =
    err instanceof ApiError ? `${err.category}: ${err.message}` : String(err);
  el("error-bar").innerHTML = errorHtml(msg);
  el("error-bar").classList.add("visible");
}

function clearError(): void {
  el("error-bar").classList.remove("visible");
  el("error-bar").innerHTML = "";
}

async function refresh(): Promise<void> {
  const camp = await api.campaign();
  const belief = await api.belief();

  const roundStatus = new Map<string, CandidateStatus>();
  const open = camp.rounds.find((r) => r.index === camp.open_round);
  if (open) {
    for (const e of open.entries) roundStatus.set(e.label, e.status);
  }

  if (net) {
    el("network-view").innerHTML = networkSvg(net, {
      positions,
      belief,
      roundStatus,
      width: VIEW_W,
      height: VIEW_H,
    });
  }
  el("summary").innerHTML = campaignSummaryHtml(camp);
  el("round-panel").innerHTML = roundPanelHtml(camp);
  syncWhatifDefaults(camp);
}

function syncWhatifDefaults(camp: CampaignPayload): void {
  const kInput = el("whatif-k") as HTMLInputElement;
  if (!kInput.value) kInput.value = String(camp.config.k_select);
}

async function action(fn: () => Promise<unknown>): Promise<void> {
  clearError();
  try {
    await fn();
  } catch (err) {
    showError(err);
  }
  await refresh().catch(showError);
}

function wireRoundPanel(): void {
  el("round-panel").addEventListener("click", (ev) => {
    const btn = (ev.target as HTMLElement).closest("button");
    if (!btn || btn.hasAttribute("disabled")) return;
    const act = btn.dataset.action;
    if (act === "open-round") {
      void action(() => api.openRound());
    } else if (act === "close-round") {
      void action(() => api.closeRound());
    } else if (act === "record") {
      const node = btn.dataset.node;
      const status = btn.dataset.status as CandidateStatus | undefined;
      if (node && status) {
        void action(() => api.recordStatus(node, status));
      }
    }
  });
}

function wireWhatif(): void {
  el("whatif-run").addEventListener("click", () => {
    clearError();
    const kRaw = (el("whatif-k") as HTMLInputElement).value.trim();
    const exclRaw = (el("whatif-exclusions") as HTMLInputElement).value.trim();
    const opts: { k?: number; exclusions?: string[] } = {};
    if (kRaw) opts.k = Number(kRaw);
    if (exclRaw) {
      opts.exclusions = exclRaw.split(",").map((s) => s.trim()).filter(Boolean);
    }
    api
      .whatifSelect(opts)
      .then((res) => {
        el("whatif-result").innerHTML = whatifResultHtml(res);
      })
      .catch(showError);
  });
}

async function boot(): Promise<void> {
  el("legend").innerHTML = legendHtml();
  wireRoundPanel();
  wireWhatif();
  el("refresh").addEventListener("click", () => void refresh().catch(showError));
  try {
    net = await api.network();
    // fixed seed: the layout is a pure function of the network
    positions = layoutNetwork(
      net.nodes.map((n) => n.id),
      net.edges,
      { width: VIEW_W, height: VIEW_H, seed: DEFAULT_SEED },
    );
    await refresh();
  } catch (err) {
    showError(err);
  }
}

void boot();
