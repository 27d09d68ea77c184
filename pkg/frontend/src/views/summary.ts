/** Risk assessment summary: session metadata, totals, and the per-region
 * severity distribution. */
import { severityColor } from "../colors.js";
import { Store, ViewState } from "../state.js";

export function mountSummaryView(root: HTMLElement, store: Store): void {
  root.classList.add("summary-view");
  root.innerHTML = `<div class="panel-title">Risk Assessment Summary</div><div class="body"></div>`;
  const body = root.querySelector(".body") as HTMLElement;
  store.subscribe((state) => render(root, body, state));
  render(root, body, store.state);
}

function render(root: HTMLElement, body: HTMLElement, state: ViewState): void {
  root.dataset.analysisId = state.analysisId ?? "";
  body.textContent = "";
  const report = state.report;
  if (!report) {
    body.textContent = state.loading ? "loading..." : "upload or pick an analysis to begin";
    return;
  }

  const session = document.createElement("div");
  session.className = "session-line";
  session.textContent =
    `${report.session.source} - ${report.session.frame_count} frames @ ` +
    `${report.session.frame_rate_hz.toFixed(0)} Hz, ${report.session.duration_s.toFixed(2)} s, ` +
    `${report.session.body_mass_kg.toFixed(0)} kg`;
  body.appendChild(session);

  const totals = document.createElement("div");
  totals.className = "totals-line";
  totals.dataset.incidents = String(report.totals.incidents);
  const by = report.totals.by_severity;
  totals.textContent =
    `${report.totals.incidents} incident(s) - ` +
    `low ${by.low ?? 0} / medium ${by.medium ?? 0} / high ${by.high ?? 0} - ` +
    `max severity ${report.totals.max_severity}`;
  body.appendChild(totals);

  const table = document.createElement("table");
  table.className = "distribution";
  const header = document.createElement("tr");
  for (const cell of ["region", "low", "medium", "high"]) {
    const th = document.createElement("th");
    th.textContent = cell;
    header.appendChild(th);
  }
  table.appendChild(header);
  for (const [region, counts] of Object.entries(report.distribution)) {
    const row = document.createElement("tr");
    const name = document.createElement("td");
    name.textContent = region;
    row.appendChild(name);
    for (const severity of ["low", "medium", "high"] as const) {
      const td = document.createElement("td");
      const count = counts[severity] ?? 0;
      td.textContent = String(count);
      if (count > 0) td.style.color = severityColor(severity);
      row.appendChild(td);
    }
    table.appendChild(row);
  }
  body.appendChild(table);
}
