/** Incident list: time of occurrence, anatomical location, severity.
 * Clicking a row selects the incident, which jumps the shared cursor to
 * its peak frame. */
import { severityColor } from "../colors.js";
import { Store, ViewState } from "../state.js";

export function mountIncidentsView(root: HTMLElement, store: Store): void {
  root.classList.add("incidents-view");
  root.innerHTML = `<div class="panel-title">Incidents</div><ol class="incident-list"></ol>`;
  const list = root.querySelector(".incident-list") as HTMLElement;

  list.addEventListener("click", (event) => {
    const row = (event.target as HTMLElement).closest("li[data-index]");
    if (row) store.selectIncident(Number((row as HTMLElement).dataset.index));
  });

  store.subscribe((state) => render(root, list, state));
  render(root, list, store.state);
}

function render(root: HTMLElement, list: HTMLElement, state: ViewState): void {
  root.dataset.analysisId = state.analysisId ?? "";
  const incidents = state.report?.incidents ?? [];
  root.dataset.count = String(incidents.length);

  list.textContent = "";
  if (!incidents.length) {
    const empty = document.createElement("li");
    empty.className = "empty";
    empty.textContent = state.report ? "0 incidents" : "no analysis loaded";
    list.appendChild(empty);
    return;
  }
  incidents.forEach((incident, index) => {
    const row = document.createElement("li");
    row.dataset.index = String(index);
    row.dataset.peakFrame = String(incident.peak_frame);
    row.classList.toggle("selected", state.selectedIncident === index);

    const dot = document.createElement("span");
    dot.className = "severity-dot";
    dot.style.background = severityColor(incident.severity);
    row.appendChild(dot);

    const text = document.createElement("span");
    text.textContent =
      `${incident.start_s.toFixed(2)}-${incident.end_s.toFixed(2)}s  ` +
      `${incident.label} @ ${incident.region}  ` +
      `peak ${incident.peak_value.toFixed(1)} ${incident.peak_unit} [${incident.severity}]`;
    row.appendChild(text);
    list.appendChild(row);
  });
}
