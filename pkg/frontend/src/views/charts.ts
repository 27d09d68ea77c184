/** Time-aligned multi-stream charts with one synchronized cursor.
 *
 * Every chart draws from the same ViewState: the vertical cursor sits at
 * the cursor frame's time in all of them, and the selected incident's
 * span is shaded wherever it overlaps a chart's stream. Clicking or
 * dragging inside a chart scrubs the shared cursor.
 */
import { severityColor } from "../colors.js";
import { Store, ViewState } from "../state.js";
import type { StreamDoc } from "../types.js";

const WIDTH = 560;
const HEIGHT = 96;
const PAD_LEFT = 56;
const PAD_RIGHT = 8;

const SVG_NS = "http://www.w3.org/2000/svg";

export function mountChartsView(root: HTMLElement, store: Store): void {
  root.classList.add("charts-view");
  root.innerHTML = `<div class="panel-title">Multi-Stream Analysis</div>
    <div class="measure-picker"></div>
    <div class="chart-list"></div>`;
  const picker = root.querySelector(".measure-picker") as HTMLElement;
  const list = root.querySelector(".chart-list") as HTMLElement;

  picker.addEventListener("change", () => {
    const chosen = [...picker.querySelectorAll("input:checked")].map(
      (input) => (input as HTMLInputElement).value,
    );
    void store.setSelectedMeasures(chosen);
  });

  store.subscribe((state) => render(root, picker, list, state, store));
  render(root, picker, list, store.state, store);
}

function render(
  root: HTMLElement,
  picker: HTMLElement,
  list: HTMLElement,
  state: ViewState,
  store: Store,
): void {
  root.dataset.analysisId = state.analysisId ?? "";
  root.dataset.cursorFrame = String(state.cursorFrame);

  renderPicker(picker, state);

  list.textContent = "";
  const streams = state.streams;
  if (!streams) return;
  const rate = streams.frame_rate_hz;
  root.dataset.cursorTime = (state.cursorFrame / rate).toFixed(4);

  for (const stream of streams.streams) {
    if (!state.selectedMeasures.includes(stream.id)) continue;
    list.appendChild(chart(stream, streams.time_s, state, store));
  }
}

function renderPicker(picker: HTMLElement, state: ViewState): void {
  picker.textContent = "";
  for (const id of state.availableMeasures) {
    const label = document.createElement("label");
    const input = document.createElement("input");
    input.type = "checkbox";
    input.value = id;
    input.checked = state.selectedMeasures.includes(id);
    label.appendChild(input);
    label.appendChild(document.createTextNode(id));
    picker.appendChild(label);
  }
}

function chart(stream: StreamDoc, times: number[], state: ViewState, store: Store): HTMLElement {
  const container = document.createElement("div");
  container.className = "chart";
  container.dataset.measure = stream.id;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("width", "100%");

  const duration = times.length ? times[times.length - 1] : 1;
  const xOf = (t: number) => PAD_LEFT + (t / Math.max(duration, 1e-9)) * (WIDTH - PAD_LEFT - PAD_RIGHT);

  let low = Math.min(...stream.samples);
  let high = Math.max(...stream.samples);
  if (!(high > low)) {
    low -= 1;
    high += 1;
  }
  const yOf = (v: number) => HEIGHT - 14 - ((v - low) / (high - low)) * (HEIGHT - 24);

  // selected incident span, shaded where it overlaps this timeline
  const incident =
    state.selectedIncident !== null ? state.report?.incidents[state.selectedIncident] : null;
  if (incident) {
    const shade = document.createElementNS(SVG_NS, "rect");
    const x0 = xOf(incident.start_s);
    const x1 = xOf(incident.end_s);
    shade.setAttribute("x", x0.toFixed(1));
    shade.setAttribute("y", "4");
    shade.setAttribute("width", Math.max(x1 - x0, 1).toFixed(1));
    shade.setAttribute("height", String(HEIGHT - 18));
    shade.setAttribute("fill", severityColor(incident.severity));
    shade.setAttribute("opacity", "0.18");
    shade.classList.add("incident-span");
    svg.appendChild(shade);
  }

  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute(
    "points",
    stream.samples.map((v, i) => `${xOf(times[i]).toFixed(1)},${yOf(v).toFixed(1)}`).join(" "),
  );
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "#7db3e8");
  line.setAttribute("stroke-width", "1.4");
  svg.appendChild(line);

  // shared time cursor
  const rate = state.streams?.frame_rate_hz ?? 1;
  const cursorX = xOf(state.cursorFrame / rate);
  const cursor = document.createElementNS(SVG_NS, "line");
  cursor.classList.add("time-cursor");
  cursor.setAttribute("x1", cursorX.toFixed(1));
  cursor.setAttribute("x2", cursorX.toFixed(1));
  cursor.setAttribute("y1", "2");
  cursor.setAttribute("y2", String(HEIGHT - 12));
  cursor.setAttribute("stroke", "#f2c14e");
  cursor.setAttribute("stroke-width", "1");
  svg.appendChild(cursor);
  container.dataset.cursorX = cursorX.toFixed(1);

  const label = document.createElementNS(SVG_NS, "text");
  label.setAttribute("x", "4");
  label.setAttribute("y", "12");
  label.setAttribute("fill", "#9fb4cc");
  label.setAttribute("font-size", "10");
  const atCursor = stream.samples[Math.min(state.cursorFrame, stream.samples.length - 1)];
  label.textContent = `${stream.id} (${stream.unit}) = ${atCursor?.toFixed(2) ?? "-"}`;
  svg.appendChild(label);

  const scrubTo = (event: MouseEvent) => {
    const rect = svg.getBoundingClientRect();
    if (rect.width <= 0) return;
    const fx = ((event.clientX - rect.left) / rect.width) * WIDTH;
    const t = ((fx - PAD_LEFT) / (WIDTH - PAD_LEFT - PAD_RIGHT)) * duration;
    store.scrub(Math.round(t * rate));
  };
  svg.addEventListener("mousedown", (event) => {
    scrubTo(event as MouseEvent);
    const move = (e: Event) => scrubTo(e as MouseEvent);
    const up = () => {
      window.removeEventListener("mousemove", move);
      window.removeEventListener("mouseup", up);
    };
    window.addEventListener("mousemove", move);
    window.addEventListener("mouseup", up);
  });

  container.appendChild(svg);
  return container;
}
