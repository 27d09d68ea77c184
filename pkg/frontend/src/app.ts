/** Bootstraps the coordinated views against one Store. */
import { ServiceClient } from "./api.js";
import { Store } from "./state.js";
import { mountBodyMapView } from "./views/bodymap.js";
import { mountChartsView } from "./views/charts.js";
import { mountIncidentsView } from "./views/incidents.js";
import { mountRulesView } from "./views/rules.js";
import { mountSkeletonView } from "./views/skeleton.js";
import { mountSummaryView } from "./views/summary.js";
import { mountTimelineView } from "./views/timeline.js";

export interface App {
  store: Store;
}

export function mountApp(root: HTMLElement, serviceUrl: string): App {
  const api = new ServiceClient(serviceUrl);
  const store = new Store(api);

  root.innerHTML = `
    <header class="topbar">
      <span class="brand">motion risk review</span>
      <label class="upload-label">motion file
        <input type="file" class="upload-input" accept=".bvh,.json">
      </label>
      <label>mass (kg) <input type="number" class="mass-input" value="70" min="1" step="1"></label>
      <select class="session-picker"><option value="">sessions...</option></select>
      <span class="error-banner" role="alert"></span>
    </header>
    <main class="layout">
      <section id="skeleton-panel"></section>
      <section id="charts-panel"></section>
      <aside class="right-rail">
        <section id="summary-panel"></section>
        <section id="bodymap-panel"></section>
        <section id="incidents-panel"></section>
        <section id="rules-panel"></section>
      </aside>
    </main>
    <footer id="timeline-panel"></footer>
  `;

  mountSkeletonView(root.querySelector("#skeleton-panel") as HTMLElement, store);
  mountChartsView(root.querySelector("#charts-panel") as HTMLElement, store);
  mountSummaryView(root.querySelector("#summary-panel") as HTMLElement, store);
  mountBodyMapView(root.querySelector("#bodymap-panel") as HTMLElement, store);
  mountIncidentsView(root.querySelector("#incidents-panel") as HTMLElement, store);
  mountRulesView(root.querySelector("#rules-panel") as HTMLElement, store);
  mountTimelineView(root.querySelector("#timeline-panel") as HTMLElement, store);

  const banner = root.querySelector(".error-banner") as HTMLElement;
  store.subscribe((state) => {
    banner.textContent = state.error ?? "";
    banner.classList.toggle("visible", !!state.error);
  });

  const upload = root.querySelector(".upload-input") as HTMLInputElement;
  const mass = root.querySelector(".mass-input") as HTMLInputElement;
  upload.addEventListener("change", async () => {
    const file = upload.files?.[0];
    if (!file) return;
    const content = await file.text();
    await store.uploadAndLoad(file.name, content, Number(mass.value) || 70);
    void refreshSessions();
  });

  const picker = root.querySelector(".session-picker") as HTMLSelectElement;
  picker.addEventListener("change", () => {
    if (picker.value) void store.loadAnalysis(picker.value);
  });
  async function refreshSessions(): Promise<void> {
    try {
      const { analyses } = await api.listAnalyses();
      picker.innerHTML = `<option value="">sessions...</option>`;
      for (const handle of analyses) {
        if (handle.status !== "complete") continue;
        const option = document.createElement("option");
        option.value = handle.id;
        option.textContent = `${handle.source} (${handle.id.slice(0, 8)})`;
        option.selected = handle.id === store.state.analysisId;
        picker.appendChild(option);
      }
    } catch {
      // service unreachable: the error banner reports it on load attempts
    }
  }
  void refreshSessions();

  return { store };
}
