/** Documents exchanged with the analysis service. */

export interface AnalysisHandle {
  id: string;
  status: "pending" | "complete" | "failed";
  created_at: string;
  source: string;
  parent: string | null;
  diagnostic?: string;
  frame_count?: number;
  frame_rate_hz?: number;
  incident_count?: number;
  rules?: RuleSetDoc;
}

export interface Incident {
  rule_id: string;
  label: string;
  region: string;
  start_frame: number;
  end_frame: number;
  peak_frame: number;
  peak_value: number;
  peak_unit: string;
  peak_measure: string;
  severity: "low" | "medium" | "high";
  start_s: number;
  end_s: number;
  bridged_gaps: number[][];
}

export interface Report {
  session: {
    source: string;
    frame_rate_hz: number;
    frame_count: number;
    duration_s: number;
    body_mass_kg: number;
  };
  incidents: Incident[];
  distribution: Record<string, Record<string, number>>;
  stress_scores: Record<string, number>;
  totals: {
    incidents: number;
    by_severity: Record<string, number>;
    max_severity: string;
  };
}

export interface FramePose {
  positions_m: number[][];
  orientations_wxyz: number[][];
}

export interface FramesPayload {
  id: string;
  start: number;
  end: number;
  frame_count: number;
  frame_rate_hz: number;
  joint_names: string[];
  parents: number[];
  frames: FramePose[];
}

export interface StreamDoc {
  id: string;
  unit: string;
  samples: number[];
}

export interface StreamsPayload {
  id: string;
  frame_rate_hz: number;
  time_s: number[];
  streams: StreamDoc[];
}

export interface ConditionDoc {
  measure: string;
  comparator: "gt" | "lt" | "in_range" | "out_of_range";
  threshold?: number;
  low?: number;
  high?: number;
  unit?: string;
}

export interface RuleDoc {
  id: string;
  label: string;
  region: string;
  conditions: ConditionDoc[];
  primary: number;
  min_duration_s: number;
  merge_gap_s: number;
  severity_low?: number;
  severity_medium?: number;
}

export interface RuleSetDoc {
  rules: RuleDoc[];
}

export interface ServiceError {
  code: string;
  message: string;
  detail?: string;
}

export const REGIONS = [
  "ankle_l",
  "ankle_r",
  "knee_l",
  "knee_r",
  "hip_l",
  "hip_r",
  "trunk",
] as const;
