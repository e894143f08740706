// Wire types for the /api/v1 surface. The console renders these verbatim;
// every score and rank on screen comes from the service, never from local
// arithmetic.

export type Feasible = "yes" | "no" | "undecided";
export type ReqType = "functional" | "nonfunctional" | "unknown";

export interface Candidate {
  id: string;
  source_refs: string[];
  statement: string;
  author_category: "expert" | "ordinary";
  req_type: ReqType;
  consensus: number;
  duplicate_count: number;
  feasible: Feasible;
  status: "candidate" | "final" | "dropped";
  marker_fired: boolean;
  base_priority: number | null;
  topic_distance: number | null;
}

export interface Cluster {
  id: string;
  label: string;
  topic_distance: number;
  member_ids: string[];
}

export interface RankedRow {
  candidate_id: string;
  score: number;
  rank: number;
  status: "final" | "dropped";
  reason: string | null;
}

export interface Dimension {
  name: string;
  kind: "value" | "risk";
  weight: number;
}

export interface TimelineBucket {
  day: number;
  posts: number;
  comments: number;
  likes: number;
  active_users: number;
}

export interface Stats {
  invited: number;
  active: number;
  participation_rate: number | null;
  total_posts: number;
  posts_per_active_user: number | null;
  candidate_count: number;
  nfr_count: number;
  nfr_ratio: number | null;
  candidates_per_active_user: number | null;
  final_count: number;
  final_ratio: number | null;
  expert_final: number;
  ordinary_final: number;
  expert_final_ratio: number | null;
  ordinary_final_ratio: number | null;
  timeline: TimelineBucket[];
}

export interface Thresholds {
  theta_link: number;
  theta_dup: number;
  min_score: number;
  min_relevance: number;
}

export interface ProjectSummary {
  revision: number;
  topic_statement: string | null;
  room_title: string | null;
  stale: Record<string, boolean>;
  counts: {
    participants: number;
    posts: number;
    candidates: number;
    clusters: number;
    ratings: number;
  };
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: unknown[];
}
