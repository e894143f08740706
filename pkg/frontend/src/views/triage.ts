import { t, type StringKey } from "../i18n";
import type { ViewModel } from "../state";
import type { Candidate } from "../types";
import { el, esc, fmt } from "./helpers";

type SortKey = "base_priority" | "consensus" | "duplicate_count" | "relevance";

const columns: [SortKey, StringKey][] = [
  ["base_priority", "triage.priority"],
  ["consensus", "triage.consensus"],
  ["duplicate_count", "triage.duplicates"],
  ["relevance", "triage.relevance"],
];

function sortValue(candidate: Candidate, key: SortKey): number {
  if (key === "relevance") {
    return candidate.topic_distance === null ? 0 : 1 - candidate.topic_distance;
  }
  const value = candidate[key];
  return value === null ? 0 : value;
}

/** Sortable candidate list with authorship/type badges and an inline
 * feasibility toggle. Sorting is descending on the chosen signal. */
export class TriageView {
  private sortKey: SortKey = "base_priority";

  constructor(
    private root: HTMLElement,
    private model: ViewModel,
  ) {
    model.subscribe(() => this.render());
  }

  setSort(key: SortKey): void {
    this.sortKey = key;
    this.render();
  }

  render(): void {
    const { candidates } = this.model.state;
    this.root.innerHTML = "";
    if (candidates.length === 0) {
      this.root.append(el("p", "empty", esc(t("triage.empty"))));
      return;
    }
    const table = el("table", "triage");
    const header = el("tr");
    header.append(el("th", "", esc(t("triage.statement"))));
    for (const [key, label] of columns) {
      const th = el("th", "sortable", esc(t(label)));
      th.dataset.sort = key;
      if (key === this.sortKey) th.classList.add("sorted");
      th.addEventListener("click", () => this.setSort(key));
      header.append(th);
    }
    header.append(el("th", "", esc(t("triage.feasible"))));
    table.append(header);

    const sorted = [...candidates].sort(
      (a, b) => sortValue(b, this.sortKey) - sortValue(a, this.sortKey),
    );
    for (const candidate of sorted) {
      table.append(this.row(candidate));
    }
    this.root.append(table);
  }

  private row(candidate: Candidate): HTMLTableRowElement {
    const tr = el("tr", `cand status-${candidate.status}`);
    tr.dataset.id = candidate.id;
    const badges =
      `<span class="badge cat-${candidate.author_category}">` +
      `${esc(t(candidate.author_category === "expert" ? "badge.expert" : "badge.ordinary"))}</span>` +
      `<span class="badge type-${candidate.req_type}">` +
      `${esc(t(`badge.${candidate.req_type}` as const))}</span>`;
    tr.append(
      el(
        "td",
        "statement",
        `<span class="cand-id">${esc(candidate.id)}</span> ${esc(candidate.statement)} ${badges}`,
      ),
    );
    tr.append(el("td", "num", fmt(candidate.base_priority)));
    tr.append(el("td", "num", String(candidate.consensus)));
    tr.append(el("td", "num", String(candidate.duplicate_count)));
    tr.append(
      el(
        "td",
        "num",
        candidate.topic_distance === null ? "–" : fmt(1 - candidate.topic_distance),
      ),
    );

    const cell = el("td", "feasible");
    const select = el("select") as HTMLSelectElement;
    for (const option of ["undecided", "yes", "no"]) {
      const node = el("option", "", option) as HTMLOptionElement;
      node.value = option;
      if (option === candidate.feasible) node.selected = true;
      select.append(node);
    }
    select.addEventListener("change", () => {
      void this.model.mutate((revision) =>
        this.model.api.setFeasibility(
          candidate.id,
          revision,
          select.value as Candidate["feasible"],
        ),
      );
    });
    cell.append(select);
    tr.append(cell);
    return tr;
  }
}
