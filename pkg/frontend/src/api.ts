// Typed client for the campaign service. Every dashboard request goes
// through here; nothing else in the frontend talks to the network.

import type {
  BeliefPayload,
  CampaignPayload,
  CandidateStatus,
  CloseRoundResponse,
  NetworkPayload,
  OpenRoundResponse,
  RecordStatusResponse,
  ReportResponse,
  WhatIfResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly category: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  // base "" means same origin: the service serves the dashboard itself
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.base + path, init);
    const payload = await res.json().catch(() => ({}));
    if (!res.ok) {
      const doc = payload as { error?: string; category?: string };
      throw new ApiError(
        res.status,
        doc.category ?? "unknown",
        doc.error ?? `request failed with status ${res.status}`,
      );
    }
    return payload as T;
  }

  network(): Promise<NetworkPayload> {
    return this.request("GET", "/network");
  }

  campaign(): Promise<CampaignPayload> {
    return this.request("GET", "/campaign");
  }

  belief(): Promise<BeliefPayload> {
    return this.request("GET", "/belief");
  }

  report(completeCase: boolean): Promise<ReportResponse> {
    return this.request("GET", `/report?complete_case=${completeCase}`);
  }

  openRound(): Promise<OpenRoundResponse> {
    return this.request("POST", "/rounds/open");
  }

  closeRound(): Promise<CloseRoundResponse> {
    return this.request("POST", "/rounds/close");
  }

  recordStatus(label: string, status: CandidateStatus): Promise<RecordStatusResponse> {
    return this.request("POST", `/candidates/${encodeURIComponent(label)}/status`, {
      status,
    });
  }

  whatifSelect(opts: { k?: number; exclusions?: string[] } = {}): Promise<WhatIfResponse> {
    const body: Record<string, unknown> = {};
    if (opts.k !== undefined) body.k = opts.k;
    if (opts.exclusions !== undefined) body.exclusions = opts.exclusions;
    return this.request("POST", "/whatif/select", body);
  }
}
