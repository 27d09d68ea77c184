/** Single source of truth for the coordinated views.
 *
 * Every view renders from this ViewState; no view holds data of its own,
 * so all panels always display the same analysis. Re-evaluation keeps at
 * most one request in flight and discards stale responses (a response for
 * a superseded request token is dropped).
 */
import { ServiceClient } from "./api.js";
import { CameraState, DEFAULT_CAMERA, CameraPreset } from "./camera.js";
import type {
  AnalysisHandle,
  FramesPayload,
  Report,
  RuleSetDoc,
  StreamsPayload,
} from "./types.js";

/** Charts stay legible with a handful of traces; more via explicit selection. */
export const DEFAULT_MAX_MEASURES = 4;

export interface ViewState {
  analysisId: string | null;
  handle: AnalysisHandle | null;
  report: Report | null;
  frames: FramesPayload | null;
  streams: StreamsPayload | null;
  availableMeasures: string[];
  selectedMeasures: string[];
  cursorFrame: number;
  playing: boolean;
  playbackRate: number;
  camera: CameraState;
  selectedIncident: number | null;
  rulesDraft: RuleSetDoc | null;
  /** id of the handle this one was re-evaluated from, for undo */
  parentId: string | null;
  reevaluating: boolean;
  loading: boolean;
  error: string | null;
}

function initialState(): ViewState {
  return {
    analysisId: null,
    handle: null,
    report: null,
    frames: null,
    streams: null,
    availableMeasures: [],
    selectedMeasures: [],
    cursorFrame: 0,
    playing: false,
    playbackRate: 1,
    camera: { ...DEFAULT_CAMERA },
    selectedIncident: null,
    rulesDraft: null,
    parentId: null,
    reevaluating: false,
    loading: false,
    error: null,
  };
}

type Listener = (state: ViewState) => void;

export class Store {
  state: ViewState = initialState();
  private listeners: Listener[] = [];
  private reevalToken = 0;

  constructor(readonly api: ServiceClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private patch(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  get frameCount(): number {
    return this.state.handle?.frame_count ?? this.state.frames?.frame_count ?? 0;
  }

  /** Load a completed analysis and populate every view from it. */
  async loadAnalysis(id: string): Promise<void> {
    this.patch({ ...initialState(), loading: true, camera: this.state.camera });
    try {
      const handle = await this.api.waitForCompletion(id);
      if (handle.status === "failed") {
        throw new Error(handle.diagnostic || "analysis failed");
      }
      const report = await this.api.getReport(id);
      const frames = await this.api.getAllFrames(id, handle.frame_count ?? 0);
      const catalog = await this.api.getStreams(id);
      const available = catalog.streams.map((s) => s.id);
      const selected = defaultMeasureSelection(available, report);
      const streams = selected.length
        ? await this.api.getStreams(id, selected)
        : catalog;
      this.patch({
        analysisId: id,
        handle,
        report,
        frames,
        streams,
        availableMeasures: available,
        selectedMeasures: selected,
        cursorFrame: 0,
        selectedIncident: null,
        rulesDraft: handle.rules ?? null,
        parentId: handle.parent ?? null,
        loading: false,
        error: null,
      });
    } catch (e) {
      this.patch({
        ...initialState(),
        camera: this.state.camera,
        error: e instanceof Error ? e.message : String(e),
      });
    }
  }

  /** Upload a motion document, wait for the pipeline, then load it. */
  async uploadAndLoad(name: string, content: string, bodyMassKg: number): Promise<void> {
    this.patch({ loading: true, error: null });
    try {
      const handle = await this.api.createAnalysis({
        name,
        content,
        params: { body_mass_kg: bodyMassKg },
      });
      await this.loadAnalysis(handle.id);
    } catch (e) {
      this.patch({ loading: false, error: e instanceof Error ? e.message : String(e) });
    }
  }

  /** Move the shared time cursor; out-of-range frames clamp. */
  scrub(frame: number): void {
    const max = Math.max(0, this.frameCount - 1);
    const clamped = Math.min(Math.max(Math.round(frame), 0), max);
    this.patch({ cursorFrame: clamped });
  }

  /** Select an incident: cursor jumps to its peak frame. */
  selectIncident(index: number | null): void {
    if (index === null) {
      this.patch({ selectedIncident: null });
      return;
    }
    const incident = this.state.report?.incidents[index];
    if (!incident) return;
    this.patch({ selectedIncident: index });
    this.scrub(incident.peak_frame);
  }

  setCamera(preset: CameraPreset): void {
    this.patch({ camera: { ...this.state.camera, preset } });
  }

  orbitBy(dYawDeg: number, dPitchDeg: number): void {
    const camera = this.state.camera;
    this.patch({
      camera: {
        ...camera,
        preset: "orbit",
        yawDeg: camera.yawDeg + dYawDeg,
        pitchDeg: Math.min(89, Math.max(-89, camera.pitchDeg + dPitchDeg)),
      },
    });
  }

  setPlaying(playing: boolean): void {
    this.patch({ playing });
  }

  setPlaybackRate(rate: number): void {
    this.patch({ playbackRate: rate });
  }

  async setSelectedMeasures(ids: string[]): Promise<void> {
    const id = this.state.analysisId;
    if (!id) return;
    const selected = ids.filter((m) => this.state.availableMeasures.includes(m));
    const streams = selected.length ? await this.api.getStreams(id, selected) : null;
    if (this.state.analysisId !== id) return; // analysis changed mid-flight
    this.patch({ selectedMeasures: selected, streams });
  }

  /** Apply edited rules: re-evaluate on the service and swap handles. */
  async applyRules(rules: RuleSetDoc): Promise<void> {
    const sourceId = this.state.analysisId;
    if (!sourceId || this.state.reevaluating) return;
    const token = ++this.reevalToken;
    this.patch({ reevaluating: true, error: null });
    try {
      const handle = await this.api.reevaluate(sourceId, rules);
      if (token !== this.reevalToken || this.state.analysisId !== sourceId) {
        return; // superseded: discard
      }
      this.patch({ reevaluating: false });
      await this.loadAnalysisPreservingGeometry(handle.id, sourceId);
    } catch (e) {
      if (token === this.reevalToken) {
        this.patch({
          reevaluating: false,
          error: e instanceof Error ? e.message : String(e),
        });
      }
    }
  }

  /** Undo a re-evaluation by returning to the parent handle. */
  async undoReevaluate(): Promise<void> {
    const parent = this.state.parentId;
    if (parent) await this.loadAnalysisPreservingGeometry(parent, null);
  }

  /**
   * Swap to a re-evaluated handle. Streams and geometry are bit-identical
   * by the service contract, so only risk-layer views need new data; the
   * frames payload is reused to avoid refetching geometry.
   */
  private async loadAnalysisPreservingGeometry(
    id: string,
    parentId: string | null,
  ): Promise<void> {
    const keepFrames = this.state.frames;
    const cursor = this.state.cursorFrame;
    try {
      const handle = await this.api.waitForCompletion(id);
      const report = await this.api.getReport(id);
      const streams = this.state.selectedMeasures.length
        ? await this.api.getStreams(id, this.state.selectedMeasures)
        : await this.api.getStreams(id);
      this.patch({
        analysisId: id,
        handle,
        report,
        frames: keepFrames ? { ...keepFrames, id } : null,
        streams,
        cursorFrame: cursor,
        selectedIncident: null,
        rulesDraft: handle.rules ?? this.state.rulesDraft,
        parentId: parentId ?? handle.parent ?? null,
        loading: false,
        error: null,
      });
    } catch (e) {
      this.patch({ error: e instanceof Error ? e.message : String(e), loading: false });
    }
  }
}

/** Default chart selection: the primary measures of fired rules, else the
 * first angle streams, capped at DEFAULT_MAX_MEASURES. */
export function defaultMeasureSelection(available: string[], report: Report): string[] {
  const picks: string[] = [];
  for (const incident of report.incidents) {
    if (available.includes(incident.peak_measure) && !picks.includes(incident.peak_measure)) {
      picks.push(incident.peak_measure);
    }
  }
  for (const id of available) {
    if (picks.length >= DEFAULT_MAX_MEASURES) break;
    if (!picks.includes(id)) picks.push(id);
  }
  return picks.slice(0, DEFAULT_MAX_MEASURES);
}
