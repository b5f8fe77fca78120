// Thin typed client over fetch. The fetch function is injectable so tests
// can feed recorded responses.

import type {
  ActionJson,
  ApiError,
  DatasetInfo,
  PipelineView,
  SessionView,
  StepResponse,
  Suggestion,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiFailure extends Error {
  readonly body: ApiError;
  readonly status: number;

  constructor(status: number, body: ApiError) {
    super(`${body.error}: ${body.detail}`);
    this.status = status;
    this.body = body;
  }
}

export class Api {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiFailure(resp.status, body as ApiError);
    }
    return body as T;
  }

  listDatasets(): Promise<{ datasets: DatasetInfo[] }> {
    return this.request("/datasets");
  }

  createSession(body: Record<string, unknown>): Promise<SessionView> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request(`/sessions/${id}`);
  }

  postStep(id: string, seq: number, action: ActionJson): Promise<StepResponse> {
    return this.request(`/sessions/${id}/steps`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ seq, action }),
    });
  }

  getSuggestions(
    id: string,
    constraints: { operator?: string; itemset?: number; attribute?: string },
    n = 5,
  ): Promise<{ step_index: number; suggestions: Suggestion[] }> {
    const params = new URLSearchParams();
    if (constraints.operator) params.set("operator", constraints.operator);
    if (constraints.itemset !== undefined) params.set("itemset", String(constraints.itemset));
    if (constraints.attribute) params.set("attribute", constraints.attribute);
    params.set("n", String(n));
    return this.request(`/sessions/${id}/suggestions?${params}`);
  }

  getPipeline(id: string): Promise<PipelineView> {
    return this.request(`/sessions/${id}/pipeline`);
  }
}
