/** Typed client for the chaosfilter HTTP API. Every number shown in the UI
 * comes from these responses; the client computes nothing itself. */

export interface UploadResponse {
  session_id: string;
  alphabet: string[];
  frequencies: Record<string, number>;
  trace_count: number;
  event_count: number;
  dropped_traces: number;
}

export interface RankingRow {
  rank: number;
  activity: string;
  criterion: number;
  alpha: number;
  frequency: number;
  retained: boolean;
  enabled: boolean;
}

export interface RankingResponse {
  method: string;
  rows: RankingRow[];
  note: string;
}

export interface TogglesResponse {
  disabled: string[];
  enabled_count: number;
  explained_ratio: number;
}

export interface TreeDoc {
  op: string;
  label?: string;
  children?: TreeDoc[];
}

export interface DfgEdge {
  source: string;
  target: string;
  count: number;
}

export interface DfgDoc {
  nodes: string[];
  edges: DfgEdge[];
  start_counts: Record<string, number>;
  end_counts: Record<string, number>;
}

export interface DiscoverResponse {
  tree: TreeDoc;
  tree_text: string;
  dfg: DfgDoc;
  nondeterminism: number | null;
  fitness_fraction: number;
  flower_baseline: number;
  enabled: string[];
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail =
      typeof body === "object" && body !== null && "detail" in body
        ? String((body as { detail: unknown }).detail)
        : response.statusText;
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  uploadLog(content: string | Blob, contentType: string): Promise<UploadResponse> {
    return this.fetchImpl(`${this.baseUrl}/logs`, {
      method: "POST",
      headers: { "content-type": contentType },
      body: content,
    }).then((r) => parse<UploadResponse>(r));
  }

  ranking(sessionId: string, method: string, laplace: boolean): Promise<RankingResponse> {
    const params = new URLSearchParams({ method, laplace: String(laplace) });
    return this.fetchImpl(
      `${this.baseUrl}/sessions/${sessionId}/ranking?${params}`,
    ).then((r) => parse<RankingResponse>(r));
  }

  setToggles(sessionId: string, disabled: string[]): Promise<TogglesResponse> {
    return this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/toggles`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ disabled }),
    }).then((r) => parse<TogglesResponse>(r));
  }

  discover(sessionId: string, edgeFilterRatio = 0): Promise<DiscoverResponse> {
    return this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/discover`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ edge_filter_ratio: edgeFilterRatio }),
    }).then((r) => parse<DiscoverResponse>(r));
  }
}
