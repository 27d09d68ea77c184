import { describe, expect, it } from "vitest";

import type { ServiceClient } from "../src/api.js";
import { Store, defaultMeasureSelection } from "../src/state.js";
import type {
  AnalysisHandle,
  FramesPayload,
  Report,
  RuleSetDoc,
  StreamsPayload,
} from "../src/types.js";

const FRAME_COUNT = 100;
const RULES: RuleSetDoc = {
  rules: [
    {
      id: "r1",
      label: "r1",
      region: "ankle_l",
      conditions: [{ measure: "m1", comparator: "gt", threshold: 40, unit: "deg" }],
      primary: 0,
      min_duration_s: 0.05,
      merge_gap_s: 0.2,
    },
  ],
};

function handleFor(id: string, parent: string | null = null): AnalysisHandle {
  return {
    id,
    status: "complete",
    created_at: "t",
    source: "fixture",
    parent,
    frame_count: FRAME_COUNT,
    frame_rate_hz: 50,
    incident_count: id === "base" ? 1 : 0,
    rules: RULES,
  };
}

function reportFor(id: string): Report {
  const incidents =
    id === "base"
      ? [
          {
            rule_id: "r1",
            label: "r1",
            region: "ankle_l",
            start_frame: 30,
            end_frame: 60,
            peak_frame: 42,
            peak_value: 45,
            peak_unit: "deg",
            peak_measure: "m1",
            severity: "medium" as const,
            start_s: 0.6,
            end_s: 1.22,
            bridged_gaps: [],
          },
        ]
      : [];
  return {
    session: {
      source: "fixture",
      frame_rate_hz: 50,
      frame_count: FRAME_COUNT,
      duration_s: 2,
      body_mass_kg: 70,
    },
    incidents,
    distribution: {},
    stress_scores: { ankle_l: incidents.length ? 0.5 : 0 },
    totals: {
      incidents: incidents.length,
      by_severity: { low: 0, medium: incidents.length, high: 0 },
      max_severity: incidents.length ? "medium" : "none",
    },
  };
}

function framesFor(id: string): FramesPayload {
  return {
    id,
    start: 0,
    end: FRAME_COUNT - 1,
    frame_count: FRAME_COUNT,
    frame_rate_hz: 50,
    joint_names: ["root"],
    parents: [-1],
    frames: Array.from({ length: FRAME_COUNT }, (_, f) => ({
      positions_m: [[0, f * 0.01, 0]],
      orientations_wxyz: [[1, 0, 0, 0]],
    })),
  };
}

function streamsFor(id: string, ids?: string[]): StreamsPayload {
  const all = ["m1", "m2", "m3", "m4", "m5", "m6"];
  const chosen = ids?.length ? ids : all;
  return {
    id,
    frame_rate_hz: 50,
    time_s: Array.from({ length: FRAME_COUNT }, (_, f) => f / 50),
    streams: chosen.map((m) => ({
      id: m,
      unit: "deg",
      samples: new Array(FRAME_COUNT).fill(0),
    })),
  };
}

interface MockControls {
  reevaluateCalls: RuleSetDoc[];
  releaseReevaluate: (() => void)[];
}

function mockApi(): { api: ServiceClient; controls: MockControls } {
  const controls: MockControls = { reevaluateCalls: [], releaseReevaluate: [] };
  const api = {
    waitForCompletion: async (id: string) =>
      handleFor(id, id.startsWith("reeval") ? "base" : null),
    getAnalysis: async (id: string) => handleFor(id),
    getReport: async (id: string) => reportFor(id),
    getAllFrames: async (id: string) => framesFor(id),
    getStreams: async (id: string, ids?: string[]) => streamsFor(id, ids),
    reevaluate: (id: string, rules: RuleSetDoc) => {
      controls.reevaluateCalls.push(rules);
      return new Promise<AnalysisHandle>((resolve) => {
        controls.releaseReevaluate.push(() =>
          resolve(handleFor(`reeval${controls.reevaluateCalls.length}`, id)),
        );
      });
    },
  };
  return { api: api as unknown as ServiceClient, controls };
}

async function settled(): Promise<void> {
  for (let i = 0; i < 10; i++) await Promise.resolve();
}

describe("view state store", () => {
  it("loadAnalysis populates every panel's data and resets the cursor", async () => {
    const { api } = mockApi();
    const store = new Store(api);
    await store.loadAnalysis("base");
    expect(store.state.analysisId).toBe("base");
    expect(store.state.report?.totals.incidents).toBe(1);
    expect(store.state.frames?.frames.length).toBe(FRAME_COUNT);
    expect(store.state.cursorFrame).toBe(0);
    expect(store.state.rulesDraft).toEqual(RULES);
    expect(store.state.error).toBeNull();
  });

  it("scrub clamps out-of-range frames", async () => {
    const { api } = mockApi();
    const store = new Store(api);
    await store.loadAnalysis("base");
    store.scrub(-5);
    expect(store.state.cursorFrame).toBe(0);
    store.scrub(1e9);
    expect(store.state.cursorFrame).toBe(FRAME_COUNT - 1);
    store.scrub(41.6);
    expect(store.state.cursorFrame).toBe(42);
  });

  it("selecting an incident jumps the cursor to its peak frame", async () => {
    const { api } = mockApi();
    const store = new Store(api);
    await store.loadAnalysis("base");
    store.selectIncident(0);
    expect(store.state.selectedIncident).toBe(0);
    expect(store.state.cursorFrame).toBe(42);
    store.selectIncident(null);
    expect(store.state.selectedIncident).toBeNull();
  });

  it("keeps a single re-evaluate in flight and swaps handles on completion", async () => {
    const { api, controls } = mockApi();
    const store = new Store(api);
    await store.loadAnalysis("base");
    store.scrub(42);

    void store.applyRules(RULES);
    await settled();
    void store.applyRules(RULES); // in flight: must be ignored
    await settled();
    expect(controls.reevaluateCalls.length).toBe(1);
    expect(store.state.reevaluating).toBe(true);

    controls.releaseReevaluate[0]();
    await settled();
    expect(store.state.analysisId).toBe("reeval1");
    expect(store.state.parentId).toBe("base");
    expect(store.state.report?.totals.incidents).toBe(0);
    expect(store.state.cursorFrame).toBe(42); // cursor survives the swap
    expect(store.state.frames?.id).toBe("reeval1"); // geometry reused, relabeled
  });

  it("discards a stale re-evaluate response after the analysis changed", async () => {
    const { api, controls } = mockApi();
    const store = new Store(api);
    await store.loadAnalysis("base");

    void store.applyRules(RULES);
    await settled();
    await store.loadAnalysis("other"); // user switches sessions mid-flight
    controls.releaseReevaluate[0]();
    await settled();
    expect(store.state.analysisId).toBe("other"); // stale response dropped
  });

  it("undo returns to the parent handle", async () => {
    const { api, controls } = mockApi();
    const store = new Store(api);
    await store.loadAnalysis("base");
    void store.applyRules(RULES);
    await settled();
    controls.releaseReevaluate[0]();
    await settled();
    expect(store.state.analysisId).toBe("reeval1");

    await store.undoReevaluate();
    expect(store.state.analysisId).toBe("base");
    expect(store.state.report?.totals.incidents).toBe(1);
  });

  it("load failure leaves an error banner and empty views", async () => {
    const { api } = mockApi();
    (api as unknown as Record<string, unknown>).waitForCompletion = async () => {
      throw new Error("service unreachable");
    };
    const store = new Store(api);
    await store.loadAnalysis("base");
    expect(store.state.error).toMatch(/unreachable/);
    expect(store.state.analysisId).toBeNull();
    expect(store.state.report).toBeNull();
  });
});

describe("default measure selection", () => {
  it("prefers incident measures and caps the count", () => {
    const report = reportFor("base");
    const picks = defaultMeasureSelection(["m5", "m1", "m2", "m3", "m4"], report);
    expect(picks[0]).toBe("m1"); // the incident's primary measure leads
    expect(picks.length).toBe(4);
  });
});
