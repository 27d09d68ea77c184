/** Playback timeline: scrubber, play/pause, rate, and incident markers
 * aligned with the 3D animation. */
import { severityColor } from "../colors.js";
import { Store, ViewState } from "../state.js";

export function mountTimelineView(root: HTMLElement, store: Store): void {
  root.classList.add("timeline-view");
  root.innerHTML = `
    <button class="play">Play</button>
    <select class="rate">
      <option value="0.25">0.25x</option>
      <option value="0.5">0.5x</option>
      <option value="1" selected>1x</option>
      <option value="2">2x</option>
    </select>
    <div class="scrub-wrap">
      <div class="markers"></div>
      <input class="scrubber" type="range" min="0" max="0" step="1" value="0">
    </div>
    <span class="clock">0.00 s</span>
  `;
  const play = root.querySelector(".play") as HTMLButtonElement;
  const rate = root.querySelector(".rate") as HTMLSelectElement;
  const scrubber = root.querySelector(".scrubber") as HTMLInputElement;
  const markers = root.querySelector(".markers") as HTMLElement;
  const clock = root.querySelector(".clock") as HTMLElement;

  play.addEventListener("click", () => store.setPlaying(!store.state.playing));
  rate.addEventListener("change", () => store.setPlaybackRate(Number(rate.value)));
  scrubber.addEventListener("input", () => store.scrub(Number(scrubber.value)));

  // playback loop driven by wall-clock time and the playback rate
  let lastTick: number | null = null;
  const tick = (now: number) => {
    const state = store.state;
    if (state.playing && state.handle?.frame_rate_hz) {
      if (lastTick !== null) {
        const advance = ((now - lastTick) / 1000) * state.handle.frame_rate_hz * state.playbackRate;
        const next = state.cursorFrame + advance;
        const max = (state.handle.frame_count ?? 1) - 1;
        store.scrub(next > max ? 0 : next);
      }
      lastTick = now;
    } else {
      lastTick = null;
    }
    if (typeof requestAnimationFrame === "function") requestAnimationFrame(tick);
  };
  if (typeof requestAnimationFrame === "function") requestAnimationFrame(tick);

  store.subscribe((state) => render(root, play, scrubber, markers, clock, state));
  render(root, play, scrubber, markers, clock, store.state);
}

function render(
  root: HTMLElement,
  play: HTMLButtonElement,
  scrubber: HTMLInputElement,
  markers: HTMLElement,
  clock: HTMLElement,
  state: ViewState,
): void {
  root.dataset.analysisId = state.analysisId ?? "";
  root.dataset.cursorFrame = String(state.cursorFrame);
  const frameCount = state.handle?.frame_count ?? 0;
  const rate = state.handle?.frame_rate_hz ?? 1;

  play.textContent = state.playing ? "Pause" : "Play";
  scrubber.max = String(Math.max(frameCount - 1, 0));
  scrubber.value = String(state.cursorFrame);
  clock.textContent = `${(state.cursorFrame / rate).toFixed(2)} s / ${(frameCount / rate).toFixed(2)} s`;

  markers.textContent = "";
  const incidents = state.report?.incidents ?? [];
  incidents.forEach((incident, index) => {
    const marker = document.createElement("div");
    marker.className = "incident-marker";
    marker.dataset.index = String(index);
    const left = frameCount > 1 ? (incident.start_frame / (frameCount - 1)) * 100 : 0;
    const width = frameCount > 1
      ? ((incident.end_frame - incident.start_frame + 1) / (frameCount - 1)) * 100
      : 100;
    marker.style.left = `${left.toFixed(2)}%`;
    marker.style.width = `${Math.max(width, 0.5).toFixed(2)}%`;
    marker.style.background = severityColor(incident.severity);
    marker.classList.toggle("selected", state.selectedIncident === index);
    markers.appendChild(marker);
  });
}
