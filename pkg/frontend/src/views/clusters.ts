import { t } from "../i18n";
import type { ViewModel } from "../state";
import { el, esc, fmt } from "./helpers";

/** Cluster board: one card per cluster. Dragging a card onto another merges
 * the two; checkboxes select several cards for a bulk merge or members for a
 * split. The partition invariant is the service's; a rejected merge/split
 * surfaces as a toast. */
export class ClusterBoardView {
  private selectedClusters = new Set<string>();
  private selectedMembers = new Map<string, Set<string>>();
  private dragged: string | null = null;

  constructor(
    private root: HTMLElement,
    private model: ViewModel,
  ) {
    model.subscribe(() => this.render());
  }

  render(): void {
    const { clusters } = this.model.state;
    this.root.innerHTML = "";
    if (clusters.length === 0) {
      this.root.append(el("p", "empty", esc(t("clusters.empty"))));
      return;
    }

    const actions = el("div", "cluster-actions");
    const merge = el("button", "merge", esc(t("clusters.merge")));
    merge.addEventListener("click", () => void this.merge());
    actions.append(merge);
    this.root.append(actions);

    const board = el("div", "cluster-board");
    for (const cluster of clusters) {
      board.append(this.card(cluster.id, cluster.label, cluster.topic_distance, cluster.member_ids));
    }
    this.root.append(board);
  }

  private card(
    id: string,
    label: string,
    distance: number,
    memberIds: string[],
  ): HTMLElement {
    const card = el("div", "cluster-card");
    card.dataset.id = id;
    card.draggable = true;
    card.addEventListener("dragstart", () => {
      this.dragged = id;
    });
    card.addEventListener("dragover", (event) => {
      if (this.dragged && this.dragged !== id) event.preventDefault();
    });
    card.addEventListener("drop", (event) => {
      event.preventDefault();
      void this.dropOn(id);
    });

    const pick = el("input") as HTMLInputElement;
    pick.type = "checkbox";
    pick.className = "pick-cluster";
    pick.checked = this.selectedClusters.has(id);
    pick.addEventListener("change", () => {
      if (pick.checked) this.selectedClusters.add(id);
      else this.selectedClusters.delete(id);
    });

    const title = el(
      "span",
      "cluster-title",
      `${esc(label || id)} <span class="muted">(${memberIds.length} ${esc(t("clusters.members"))}, ` +
        `${esc(t("clusters.distance"))} ${fmt(distance)})</span>`,
    );
    const head = el("div", "cluster-head");
    head.append(pick, title);
    card.append(head);

    const list = el("ul", "member-list");
    for (const member of memberIds) {
      const item = el("li");
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.className = "pick-member";
      box.checked = this.selectedMembers.get(id)?.has(member) ?? false;
      box.addEventListener("change", () => {
        const bucket = this.selectedMembers.get(id) ?? new Set<string>();
        if (box.checked) bucket.add(member);
        else bucket.delete(member);
        this.selectedMembers.set(id, bucket);
      });
      item.append(box, document.createTextNode(" " + member));
      list.append(item);
    }
    card.append(list);

    const split = el("button", "split", esc(t("clusters.split")));
    split.addEventListener("click", () => void this.split(id));
    card.append(split);
    return card;
  }

  private async dropOn(targetId: string): Promise<void> {
    const source = this.dragged;
    this.dragged = null;
    if (!source || source === targetId) return;
    try {
      await this.model.mutate((revision) =>
        this.model.api.mergeClusters(revision, [source, targetId]),
      );
    } catch (error) {
      this.toast(error);
    }
  }

  private async merge(): Promise<void> {
    const picked = [...this.selectedClusters];
    if (picked.length < 2) return;
    try {
      await this.model.mutate((revision) =>
        this.model.api.mergeClusters(revision, picked),
      );
      this.selectedClusters.clear();
      this.selectedMembers.clear();
    } catch (error) {
      this.toast(error);
    }
  }

  private async split(clusterId: string): Promise<void> {
    const members = [...(this.selectedMembers.get(clusterId) ?? [])];
    if (members.length === 0) return;
    try {
      await this.model.mutate((revision) =>
        this.model.api.splitCluster(clusterId, revision, members),
      );
      this.selectedMembers.delete(clusterId);
    } catch (error) {
      this.toast(error);
    }
  }

  private toast(error: unknown): void {
    const message = error instanceof Error ? error.message : String(error);
    const node = el("div", "toast", `${esc(t("error.prefix"))}: ${esc(message)}`);
    this.root.prepend(node);
    setTimeout(() => node.remove(), 4000);
  }
}
