import { t } from "../i18n";
import type { ViewModel } from "../state";
import { el, esc, fmt } from "./helpers";

/** Rating grid (candidates x dimensions, integers 0-10) with editable
 * weights in the header, a recompute button, and the ranked table plus
 * dropped appendix beside the grid.
 *
 * Every number in the ranked panel is the service's: the grid edits post
 * ratings/weights through the API and the panel re-reads /ranking, so a
 * what-if is always one recompute away and never locally computed.
 */
export class MatrixView {
  constructor(
    private root: HTMLElement,
    private model: ViewModel,
  ) {
    model.subscribe(() => this.render());
  }

  render(): void {
    const { candidates, dimensions } = this.model.state;
    this.root.innerHTML = "";
    if (candidates.length === 0) {
      this.root.append(el("p", "empty", esc(t("matrix.empty"))));
      return;
    }

    const wrap = el("div", "matrix-wrap");
    wrap.append(this.grid());
    wrap.append(this.rankedPanel());
    this.root.append(wrap);

    const button = el("button", "recompute", esc(t("matrix.recompute")));
    button.addEventListener("click", () => {
      void this.model.mutate((revision) => this.model.api.recompute(revision, "all"));
    });
    this.root.append(button);
    void dimensions;
  }

  private grid(): HTMLElement {
    const { candidates, dimensions, ranking } = this.model.state;
    const scores = new Map((ranking ?? []).map((row) => [row.candidate_id, row]));

    const table = el("table", "matrix-grid");
    const header = el("tr");
    header.append(el("th", "", esc(t("matrix.requirement"))));
    for (const dim of dimensions) {
      const th = el("th", `dim kind-${dim.kind}`);
      const label = el("span", "", esc(dim.name));
      const weight = el("input", "weight") as HTMLInputElement;
      weight.type = "number";
      weight.value = String(dim.weight);
      weight.dataset.dimension = dim.name;
      weight.addEventListener("change", () => this.submitWeights());
      th.append(label, weight);
      header.append(th);
    }
    header.append(el("th", "", esc(t("matrix.score"))));
    table.append(header);

    for (const candidate of candidates) {
      const tr = el("tr", "matrix-row");
      tr.dataset.id = candidate.id;
      tr.append(
        el(
          "td",
          "statement",
          `<span class="cand-id">${esc(candidate.id)}</span> ${esc(candidate.statement)}`,
        ),
      );
      for (const dim of dimensions) {
        const td = el("td", "rating-cell");
        const input = el("input", "rating") as HTMLInputElement;
        input.type = "number";
        input.min = "0";
        input.max = "10";
        input.step = "1";
        input.dataset.candidate = candidate.id;
        input.dataset.dimension = dim.name;
        input.addEventListener("change", () => void this.submitRow(candidate.id, tr));
        td.append(input);
        tr.append(td);
      }
      const scored = scores.get(candidate.id);
      tr.append(el("td", "num score-cell", scored ? fmt(scored.score) : "–"));
      table.append(tr);
    }
    void this.fillRatings(table);
    return table;
  }

  private async fillRatings(table: HTMLElement): Promise<void> {
    // rating values come from the service per candidate, filled after mount
    const inputs = table.querySelectorAll<HTMLInputElement>("input.rating");
    const wanted = new Set<string>();
    inputs.forEach((input) => wanted.add(input.dataset.candidate ?? ""));
    for (const candidateId of wanted) {
      if (!candidateId) continue;
      try {
        const { ratings } = await this.model.api.ratings(candidateId);
        inputs.forEach((input) => {
          if (input.dataset.candidate !== candidateId) return;
          const value = ratings[input.dataset.dimension ?? ""];
          if (value !== undefined) input.value = String(value);
        });
      } catch {
        // candidate may have vanished between renders; the poll will catch up
      }
    }
  }

  private async submitRow(candidateId: string, row: HTMLElement): Promise<void> {
    const ratings: Record<string, number> = {};
    const inputs = row.querySelectorAll<HTMLInputElement>("input.rating");
    for (const input of inputs) {
      if (input.value === "") continue;
      const value = Number(input.value);
      if (!Number.isInteger(value) || value < 0 || value > 10) {
        input.classList.add("invalid");
        input.title = t("matrix.invalid");
        return;
      }
      input.classList.remove("invalid");
      ratings[input.dataset.dimension ?? ""] = value;
    }
    if (Object.keys(ratings).length === 0) return;
    await this.model.mutate((revision) =>
      this.model.api.putRatings(candidateId, revision, ratings),
    );
  }

  private submitWeights(): void {
    const inputs = this.root.querySelectorAll<HTMLInputElement>("input.weight");
    const byName = new Map(this.model.state.dimensions.map((d) => [d.name, d]));
    const dimensions = [...inputs].map((input) => {
      const dim = byName.get(input.dataset.dimension ?? "");
      return {
        name: dim?.name ?? "",
        kind: dim?.kind ?? ("value" as const),
        weight: Number(input.value),
      };
    });
    void this.model.mutate((revision) =>
      this.model.api.putWeights(revision, dimensions),
    );
  }

  private rankedPanel(): HTMLElement {
    const { ranking, rankingStale, candidates } = this.model.state;
    const panel = el("div", "ranked-panel");
    panel.append(el("h3", "", esc(t("matrix.ranked.title"))));
    if (rankingStale) {
      panel.append(el("p", "stale-banner", esc(t("stale.banner"))));
    }
    if (!ranking) {
      panel.append(el("p", "empty", esc(t("matrix.ranked.pending"))));
      return panel;
    }
    const names = new Map(candidates.map((c) => [c.id, c.statement]));

    const table = el("table", "ranked");
    const header = el("tr");
    header.append(
      el("th", "", esc(t("matrix.rank"))),
      el("th", "", esc(t("matrix.requirement"))),
      el("th", "", esc(t("matrix.score"))),
    );
    table.append(header);
    for (const row of ranking.filter((r) => r.status === "final")) {
      const tr = el("tr", "ranked-row");
      tr.dataset.id = row.candidate_id;
      tr.append(
        el("td", "num", String(row.rank)),
        el(
          "td",
          "statement",
          `<span class="cand-id">${esc(row.candidate_id)}</span> ${esc(names.get(row.candidate_id) ?? "")}`,
        ),
        el("td", "num score-cell", fmt(row.score)),
      );
      table.append(tr);
    }
    panel.append(table);

    panel.append(el("h3", "", esc(t("matrix.dropped.title"))));
    const dropped = ranking.filter((r) => r.status === "dropped");
    if (dropped.length === 0) {
      panel.append(el("p", "empty", esc(t("matrix.dropped.none"))));
      return panel;
    }
    const droppedTable = el("table", "dropped");
    const droppedHeader = el("tr");
    droppedHeader.append(
      el("th", "", esc(t("matrix.rank"))),
      el("th", "", esc(t("matrix.requirement"))),
      el("th", "", esc(t("matrix.score"))),
      el("th", "", esc(t("matrix.dropped.reason"))),
    );
    droppedTable.append(droppedHeader);
    for (const row of dropped) {
      const tr = el("tr", "dropped-row");
      tr.dataset.id = row.candidate_id;
      tr.append(
        el("td", "num", String(row.rank)),
        el("td", "statement", esc(row.candidate_id)),
        el("td", "num score-cell", fmt(row.score)),
        el("td", "reason", esc(row.reason ?? "")),
      );
      droppedTable.append(tr);
    }
    panel.append(droppedTable);
    return panel;
  }
}
