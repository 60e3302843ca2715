/** Payload types of the assessment service API. */

export type CellRef = { task: string; r: number; c: number };

export type AxisEntry = { id: string; label: string };

export type RubricDoc = {
  name: string;
  rows: AxisEntry[];
  columns: AxisEntry[];
  rows_ordered: boolean;
  cells: string[][];
  tasks: string[];
};

export type ModelInfo = {
  model_id: string;
  provenance: string;
  rubric: RubricDoc;
  params: Record<string, unknown>;
  skills: string[];
  tasks: string[];
};

export type ObservationKind = "achieved" | "obs";

export type Observation = {
  task: string;
  kind: ObservationKind;
  r: number;
  c: number;
  value?: number | null;
};

export type PosteriorReport = {
  posteriors: Record<string, number>;
  evidence_digest: string;
  log_likelihood: number;
};

export type PosteriorsWithScore = PosteriorReport & { probabilistic_score: number };

export type TaskSuggestion = { task: string; expected_gain_bits: number };

export type SessionEvent = {
  ts: string;
  type: "observation" | "undo";
  observation: Observation | null;
};

export type SessionLog = {
  session_id: string;
  model_id: string;
  status: "active" | "closed";
  events: SessionEvent[];
};
