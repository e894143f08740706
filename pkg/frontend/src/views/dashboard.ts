import { t } from "../i18n";
import type { ViewModel } from "../state";
import { el, esc, fmt, pct } from "./helpers";

/** Participation, funnel, and the day-by-day activity series rendered as a
 * text bar chart; numbers shown are exactly the service's stats payload. */
export class DashboardView {
  constructor(
    private root: HTMLElement,
    private model: ViewModel,
  ) {
    model.subscribe(() => this.render());
  }

  render(): void {
    const { stats, statsStale } = this.model.state;
    this.root.innerHTML = "";
    if (!stats) {
      this.root.append(el("p", "empty", esc(t("dashboard.empty"))));
      return;
    }
    if (statsStale) {
      this.root.append(el("p", "stale-banner", esc(t("stale.banner"))));
    }

    const participation = el("div", "panel participation");
    participation.append(el("h3", "", esc(t("dashboard.participation"))));
    participation.append(
      el(
        "p",
        "",
        `${stats.invited} ${esc(t("dashboard.invited"))}, ` +
          `${stats.active} ${esc(t("dashboard.active"))} ` +
          `(<span class="participation-rate">${pct(stats.participation_rate)}</span>), ` +
          `${stats.total_posts} ${esc(t("dashboard.posts"))} ` +
          `(${fmt(stats.posts_per_active_user)}/user)`,
      ),
    );
    this.root.append(participation);

    const funnel = el("div", "panel funnel");
    funnel.append(el("h3", "", esc(t("dashboard.funnel"))));
    funnel.append(
      el(
        "p",
        "",
        `${stats.candidate_count} ${esc(t("dashboard.candidates"))} → ` +
          `<span class="nfr-ratio">${stats.nfr_count} ${esc(t("dashboard.nfr"))} (${pct(stats.nfr_ratio)})</span> → ` +
          `<span class="final-count">${stats.final_count} ${esc(t("dashboard.final"))} (${pct(stats.final_ratio)})</span>`,
      ),
    );
    funnel.append(
      el(
        "p",
        "split",
        `expert ${stats.expert_final} (${pct(stats.expert_final_ratio)}) / ` +
          `ordinary ${stats.ordinary_final} (${pct(stats.ordinary_final_ratio)})`,
      ),
    );
    this.root.append(funnel);

    const activity = el("div", "panel activity");
    activity.append(el("h3", "", esc(t("dashboard.activity"))));
    const peak = Math.max(1, ...stats.timeline.map((b) => b.posts + b.comments + b.likes));
    const list = el("div", "bars");
    for (const bucket of stats.timeline) {
      const total = bucket.posts + bucket.comments + bucket.likes;
      const row = el("div", "bar-row");
      row.dataset.day = String(bucket.day);
      const width = Math.round((total / peak) * 100);
      row.append(
        el("span", "bar-label", `d${bucket.day}`),
        el("span", "bar", `<span class="fill" style="width:${width}%"></span>`),
        el("span", "bar-value", String(total)),
      );
      list.append(row);
    }
    activity.append(list);
    this.root.append(activity);
  }
}
