import { ApiClient } from "./api";
import { t } from "./i18n";
import { ViewModel } from "./state";
import { ClusterBoardView } from "./views/clusters";
import { installConflictPrompt } from "./views/conflict";
import { DashboardView } from "./views/dashboard";
import { el, esc } from "./views/helpers";
import { MatrixView } from "./views/matrix";
import { TriageView } from "./views/triage";
import "./style.css";

const TABS = [
  ["triage", "tab.triage"],
  ["matrix", "tab.matrix"],
  ["clusters", "tab.clusters"],
  ["dashboard", "tab.dashboard"],
] as const;

export function mountConsole(root: HTMLElement, apiBase = ""): ViewModel {
  const model = new ViewModel(new ApiClient(apiBase));

  const offline = el("div", "offline-banner hidden", esc(t("offline.banner")));
  root.append(offline);
  model.subscribe((state) => {
    offline.classList.toggle("hidden", !state.offline);
  });

  const nav = el("nav", "tabs");
  const panes = new Map<string, HTMLElement>();
  for (const [id, label] of TABS) {
    const button = el("button", "tab", esc(t(label)));
    button.dataset.tab = id;
    button.addEventListener("click", () => activate(id));
    nav.append(button);
    const pane = el("section", `pane pane-${id} hidden`);
    panes.set(id, pane);
  }
  const recomputeAll = el("button", "tab recompute-all", esc(t("matrix.recompute")));
  recomputeAll.addEventListener("click", () => {
    void model.mutate((revision) => model.api.recompute(revision, "all"));
  });
  nav.append(recomputeAll);
  root.append(nav);
  for (const pane of panes.values()) root.append(pane);

  function activate(id: string): void {
    for (const [key, pane] of panes) pane.classList.toggle("hidden", key !== id);
    nav.querySelectorAll(".tab").forEach((node) => {
      node.classList.toggle("active", (node as HTMLElement).dataset.tab === id);
    });
  }

  new TriageView(panes.get("triage")!, model);
  new MatrixView(panes.get("matrix")!, model);
  new ClusterBoardView(panes.get("clusters")!, model);
  new DashboardView(panes.get("dashboard")!, model);
  installConflictPrompt(root, model);

  activate("triage");
  return model;
}

function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const model = mountConsole(root);
  void model.refresh();
  const poll = Number(new URLSearchParams(location.search).get("poll") ?? "5000");
  if (poll > 0) model.startPolling(poll);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
