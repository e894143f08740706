import type {
  ApiErrorBody,
  Candidate,
  Cluster,
  Dimension,
  Feasible,
  ProjectSummary,
  RankedRow,
  Stats,
  Thresholds,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(body.message);
  }

  get isConflict(): boolean {
    return this.body.code === "revision_conflict";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: "http_error", message: response.statusText, details: [] };
  }
  return new ApiError(response.status, body);
}

/** Thin typed client over /api/v1; every mutation carries the caller's
 * last-seen revision so the service can refuse lost updates. */
export class ApiClient {
  constructor(private base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(`${this.base}/api/v1${path}`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private async send<T>(method: string, path: string, body: unknown): Promise<T> {
    const response = await fetch(`${this.base}/api/v1${path}`, {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  project(): Promise<ProjectSummary> {
    return this.get("/project");
  }

  candidates(): Promise<{ revision: number; stale: boolean; candidates: Candidate[] }> {
    return this.get("/candidates");
  }

  clusters(): Promise<{ revision: number; stale: boolean; clusters: Cluster[] }> {
    return this.get("/clusters");
  }

  ranking(): Promise<{ revision: number; stale: boolean; ranking: RankedRow[] | null }> {
    return this.get("/ranking");
  }

  stats(): Promise<{ revision: number; stale: boolean; stats: Stats | null }> {
    return this.get("/stats");
  }

  weights(): Promise<{ revision: number; dimensions: Dimension[] }> {
    return this.get("/config/weights");
  }

  thresholds(): Promise<{ revision: number } & Thresholds> {
    return this.get("/config/thresholds");
  }

  ratings(candidateId: string): Promise<{ revision: number; ratings: Record<string, number> }> {
    return this.get(`/ratings/${encodeURIComponent(candidateId)}`);
  }

  putRatings(
    candidateId: string,
    revision: number,
    ratings: Record<string, number>,
  ): Promise<{ revision: number }> {
    return this.send("PUT", `/ratings/${encodeURIComponent(candidateId)}`, {
      revision,
      ratings,
    });
  }

  putWeights(revision: number, dimensions: Dimension[]): Promise<{ revision: number }> {
    return this.send("PUT", "/config/weights", { revision, dimensions });
  }

  putThresholds(
    revision: number,
    values: Partial<Thresholds>,
  ): Promise<{ revision: number }> {
    return this.send("PUT", "/config/thresholds", { revision, ...values });
  }

  setFeasibility(
    candidateId: string,
    revision: number,
    feasible: Feasible,
  ): Promise<{ revision: number }> {
    return this.send("PATCH", `/candidates/${encodeURIComponent(candidateId)}`, {
      revision,
      feasible,
    });
  }

  mergeClusters(revision: number, clusterIds: string[]): Promise<{ revision: number; cluster_id: string }> {
    return this.send("POST", "/clusters/merge", { revision, cluster_ids: clusterIds });
  }

  splitCluster(
    clusterId: string,
    revision: number,
    memberIds: string[],
  ): Promise<{ revision: number }> {
    return this.send("POST", `/clusters/${encodeURIComponent(clusterId)}/split`, {
      revision,
      member_ids: memberIds,
    });
  }

  recompute(
    revision: number,
    scope: "all" | "ranking_only" = "all",
  ): Promise<{ revision: number; ran: string[] }> {
    return this.send("POST", "/recompute", { revision, scope });
  }
}
