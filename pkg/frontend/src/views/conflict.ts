import { t } from "../i18n";
import type { ViewModel } from "../state";
import { el, esc } from "./helpers";

/** Reload-and-reapply prompt shown whenever a mutation hits a revision
 * conflict. The stale edit is never applied silently; the moderator reloads
 * the latest state and decides again. */
export function installConflictPrompt(root: HTMLElement, model: ViewModel): void {
  model.onConflict = () => {
    if (root.querySelector(".conflict-modal")) return;
    const overlay = el("div", "conflict-overlay");
    const modal = el("div", "conflict-modal");
    modal.append(el("h3", "", esc(t("conflict.title"))));
    modal.append(el("p", "", esc(t("conflict.body"))));
    const reload = el("button", "reload", esc(t("conflict.reload")));
    reload.addEventListener("click", () => {
      overlay.remove();
      void model.refresh();
    });
    modal.append(reload);
    overlay.append(modal);
    root.append(overlay);
  };
}
