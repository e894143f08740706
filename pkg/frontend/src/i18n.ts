// All console text lives here so moderators can localize the bundle without
// touching view code. Swap the table (or merge a partial override) at boot.

const en = {
  "tab.triage": "Triage",
  "tab.matrix": "Matrix",
  "tab.clusters": "Clusters",
  "tab.dashboard": "Dashboard",
  "triage.empty": "No candidates yet. Run a recompute once the export is loaded.",
  "triage.statement": "Statement",
  "triage.consensus": "Consensus",
  "triage.duplicates": "Duplicates",
  "triage.priority": "Review priority",
  "triage.relevance": "Topic relevance",
  "triage.feasible": "Feasible",
  "badge.expert": "expert",
  "badge.ordinary": "ordinary",
  "badge.functional": "FR",
  "badge.nonfunctional": "NFR",
  "badge.unknown": "?",
  "matrix.empty": "Nothing to rate yet.",
  "matrix.requirement": "Requirement",
  "matrix.score": "Score",
  "matrix.rank": "Rank",
  "matrix.recompute": "Recompute",
  "matrix.ranked.title": "Ranking",
  "matrix.ranked.pending": "Ranking not computed yet.",
  "matrix.dropped.title": "Dropped requirements",
  "matrix.dropped.none": "Nothing dropped.",
  "matrix.dropped.reason": "Reason",
  "matrix.invalid": "Ratings are whole numbers from 0 to 10.",
  "clusters.empty": "No clusters yet.",
  "clusters.merge": "Merge selected",
  "clusters.split": "Split out selected members",
  "clusters.members": "members",
  "clusters.distance": "topic distance",
  "dashboard.empty": "No stats yet. Recompute after rating.",
  "dashboard.participation": "Participation",
  "dashboard.invited": "invited",
  "dashboard.active": "active",
  "dashboard.posts": "posts",
  "dashboard.funnel": "Requirements funnel",
  "dashboard.candidates": "candidates",
  "dashboard.nfr": "non-functional",
  "dashboard.final": "final",
  "dashboard.activity": "Activity by day",
  "stale.banner": "Showing stale data; recompute to refresh derived results.",
  "offline.banner": "Service unreachable; retrying...",
  "conflict.title": "Someone else changed the project",
  "conflict.body":
    "Your edit was based on an older revision and was not applied. Reload the latest state, then reapply your change.",
  "conflict.reload": "Reload latest",
  "error.prefix": "Request failed",
};

export type StringKey = keyof typeof en;

let table: Record<string, string> = { ...en };

export function t(key: StringKey): string {
  return table[key] ?? key;
}

export function setStrings(overrides: Partial<Record<StringKey, string>>): void {
  table = { ...en, ...overrides };
}
