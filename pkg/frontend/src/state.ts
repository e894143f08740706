import { ApiClient, ApiError } from "./api";
import type { Candidate, Cluster, Dimension, RankedRow, Stats, Thresholds } from "./types";

export interface ViewState {
  revision: number;
  candidates: Candidate[];
  clusters: Cluster[];
  ranking: RankedRow[] | null;
  rankingStale: boolean;
  stats: Stats | null;
  statsStale: boolean;
  dimensions: Dimension[];
  thresholds: Thresholds | null;
  offline: boolean;
}

type Listener = (state: ViewState) => void;

/** Client-side mirror of the service state plus the last-seen revision.
 *
 * Mutations go through `mutate`, which hands the current revision to the
 * API call; a revision conflict never overwrites local edit buffers, it
 * surfaces through `onConflict` so the moderator can reload and reapply.
 */
export class ViewModel {
  state: ViewState = {
    revision: 0,
    candidates: [],
    clusters: [],
    ranking: null,
    rankingStale: true,
    stats: null,
    statsStale: true,
    dimensions: [],
    thresholds: null,
    offline: false,
  };

  onConflict: (() => void) | null = null;

  private listeners: Listener[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(public api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  async refresh(): Promise<void> {
    try {
      const [project, candidates, clusters, ranking, stats, weights, thresholds] =
        await Promise.all([
          this.api.project(),
          this.api.candidates(),
          this.api.clusters(),
          this.api.ranking(),
          this.api.stats(),
          this.api.weights(),
          this.api.thresholds(),
        ]);
      this.state = {
        revision: project.revision,
        candidates: candidates.candidates,
        clusters: clusters.clusters,
        ranking: ranking.ranking,
        rankingStale: ranking.stale,
        stats: stats.stats,
        statsStale: stats.stale,
        dimensions: weights.dimensions,
        thresholds: {
          theta_link: thresholds.theta_link,
          theta_dup: thresholds.theta_dup,
          min_score: thresholds.min_score,
          min_relevance: thresholds.min_relevance,
        },
        offline: false,
      };
    } catch (error) {
      if (error instanceof ApiError) throw error;
      this.state = { ...this.state, offline: true };
    }
    this.emit();
  }

  /** Run a mutation against the current revision; refresh on success.
   * Returns true when applied, false when a conflict was surfaced. */
  async mutate(
    action: (revision: number) => Promise<{ revision: number }>,
  ): Promise<boolean> {
    try {
      await action(this.state.revision);
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        this.onConflict?.();
        return false;
      }
      throw error;
    }
    await this.refresh();
    return true;
  }

  startPolling(intervalMs: number): void {
    this.stopPolling();
    this.timer = setInterval(() => void this.refresh(), intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }
}
