/**
 * Wire types for the annotation service /v1 API.
 *
 * These mirror the server's response models exactly. Session and task
 * payloads are blinded by design: there is no `label` and no
 * `fake_regions` field anywhere the client can see before submitting.
 */

/** Half-open region in seconds as sent over the wire: [onset, offset). */
export type RegionPair = [number, number];

export type Verdict = "genuine" | "fake";

export interface TaskPayload {
  clip_id: string;
  caption: string;
  duration: number;
  audio_url: string;
  submitted: boolean;
}

export interface SessionPayload {
  evaluator_id: string;
  sets: string[];
  clips_per_set: number;
  tasks: TaskPayload[];
  completed: number;
  total: number;
}

export interface SubmitRequest {
  clip_id: string;
  label: Verdict;
  regions: RegionPair[];
}

export interface SubmitResponse {
  status: "stored";
  clip_id: string;
  replaced: boolean;
  remaining: number;
}

export interface HealthPayload {
  status: "ok";
  version: string;
  sets: string[];
  clips: number;
  evaluators: number;
}

export interface ResolutionBlock {
  resolution: number;
  precision: number;
  recall: number;
  f1: number;
  score: number;
  counts: { resolution: number; tp: number; fp: number; fn: number; tn: number };
}

export interface MetricReport {
  acc_identify: number;
  alpha: number;
  identify_counts: { tp: number; fp: number; tn: number; fn: number };
  resolutions: ResolutionBlock[];
  notes: string[];
}

export interface EvaluatorBlock {
  evaluator_id: string;
  submitted: number;
  assigned: number;
  missing: string[];
  report: MetricReport;
}

export interface AverageBlock {
  acc_identify: number;
  alpha: number;
  resolutions: Omit<ResolutionBlock, "counts">[];
}

export interface ReportPayload {
  evaluators: EvaluatorBlock[];
  average: AverageBlock | null;
  notes: string[];
  table: string;
}
