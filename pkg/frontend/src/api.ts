/** Typed client for the chronolint HTTP API. All numbers are kept exactly
 * as the server sent them; no rounding happens on the way in. */

export interface CommitOut {
  commit_id: string;
  committed_at: number;
  author_name: string;
  author_email: string;
  summary: string;
  parent_count: number;
}

export interface ProgressOut {
  total: number;
  done: number;
  failed: number;
  current_commit: string | null;
  phase: string;
}

export interface RunSummary {
  run_id: string;
  created_at: string;
  fingerprint: string;
  branch: string;
  repo: string;
  phase: string;
  total: number;
  done: number;
  failed: number;
}

export interface RunDetail {
  run_id: string;
  created_at: string;
  fingerprint: string;
  config: Record<string, unknown>;
  phase: string;
  progress: ProgressOut;
  commits: CommitOut[];
  status: Record<string, string>;
  errors: Record<string, string>;
  error: string | null;
}

export interface SeriesOut {
  run_id: string;
  commits: CommitOut[];
  metrics: Record<string, (number | null)[]>;
}

export interface HotspotOut {
  index: number;
  commit_id: string;
  committed_at: number;
  score: number;
  contributions: Record<string, number>;
}

export interface SignificanceOut {
  run_id: string;
  weights: Record<string, number>;
  commits: CommitOut[];
  scores: number[];
  contributions: Record<string, number[]>;
  hotspots: HotspotOut[];
}

export interface IssueOut {
  rule_id: string;
  category: string;
  severity: string;
  file: string;
  line: number;
  message: string;
}

export interface RunConfigRequest {
  repo: string;
  branch: string;
  since?: number | null;
  until?: number | null;
  authors?: string[] | null;
  max_snapshots?: number | null;
  coverage_glob?: string | null;
}

export interface WeightsRequest {
  weights: Record<string, number>;
  renormalize?: boolean;
  top_n?: number;
  absolute_ranking?: boolean;
}

export interface AuthorOut {
  name: string;
  email: string;
}

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike = fetch.bind(globalThis),
    private readonly base: string = "",
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let code = "HttpError";
      let message = `${response.status}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        if (body.code) code = body.code;
        if (body.message) message = body.message;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  listRuns(): Promise<RunSummary[]> {
    return this.request("/api/runs");
  }

  runDetail(runId: string): Promise<RunDetail> {
    return this.request(`/api/runs/${runId}`);
  }

  startRun(config: RunConfigRequest): Promise<{ run_id: string; status: string }> {
    return this.request("/api/runs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  enumerate(
    repo: string,
    branch: string,
  ): Promise<{ commit_count: number; authors: AuthorOut[] }> {
    return this.request("/api/enumerate", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ repo, branch }),
    });
  }

  series(runId: string, metrics: string[]): Promise<SeriesOut> {
    const query = metrics.length ? `?metrics=${metrics.join(",")}` : "";
    return this.request(`/api/runs/${runId}/series${query}`);
  }

  significance(
    runId: string,
    body: WeightsRequest,
    signal?: AbortSignal,
  ): Promise<SignificanceOut> {
    return this.request(`/api/runs/${runId}/significance`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  issues(runId: string, commitId: string): Promise<{ issues: IssueOut[] }> {
    return this.request(`/api/runs/${runId}/snapshots/${commitId}/issues`);
  }
}
