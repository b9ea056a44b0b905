/** Shapes of the review service payloads. Every number shown in the UI
 * comes straight from these objects; nothing is recomputed client-side. */

export type Verdict = "appropriate" | "inappropriate" | "undecided";

export interface WitnessView {
  fingerprint: string;
  p1: string;
  p2: string;
  positions: string[];
  association: number;
  influence: number;
  reach_prob: number;
  subterm_size: number;
  verdict: Verdict;
  size: number;
}

export interface SubexprRow {
  fingerprint: string;
  p1: string;
  p2: string;
  positions: string[];
  association: number;
  influence: number;
  reach_prob: number;
  subterm_size: number;
  position: string;
  parent: string;
}

export interface SubexprPayload {
  epsilon: number;
  delta: number;
  rows: SubexprRow[];
}

export interface RepairEdit {
  positions: string[];
  before: string;
  constant: string;
}

export interface RepairResult {
  edits: RepairEdit[];
  residual_witnesses: WitnessView[];
  iterations: number;
}

export interface DiffPayload {
  before: string;
  after: string;
  edits: RepairEdit[];
}

export interface JudgmentBody {
  fingerprint: string;
  verdict: Verdict;
  note?: string;
  author?: string;
}

export interface SessionForm {
  model_path: string;
  dataset_path: string;
  protected: string;
  label?: string | null;
  epsilon?: number;
  delta?: number;
  seed?: number;
  bins?: number;
}
