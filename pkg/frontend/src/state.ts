/**
 * Console state and its pure transitions.
 *
 * Server-authoritative by construction: the posterior grid and the history
 * only ever change inside `applyServerState`, which takes what the service
 * returned. What-if previews live in a separate overlay slot and never touch
 * history. All truth lives in the service; `applyServerState` is also how a
 * reload re-hydrates.
 */

import {
  conflictsWith,
  mergeValues,
  observationDelta,
  type CellValues,
  type Coord,
} from "./order.js";
import type {
  ModelInfo,
  Observation,
  PosteriorReport,
  SessionEvent,
  TaskSuggestion,
} from "./types.js";

export type ConsoleState = {
  model: ModelInfo | null;
  sessionId: string | null;
  /** Latest report returned by the service; the grid renders exactly this. */
  report: PosteriorReport | null;
  score: number | null;
  /** Mirror of the server event log after the last sync. */
  history: SessionEvent[];
  suggestions: TaskSuggestion[];
  /** What-if overlay; rendering it never creates history. */
  preview: PosteriorReport | null;
  /** Cells highlighted after the service rejected an observation. */
  conflictCells: Coord[];
  error: string | null;
};

export function initialState(): ConsoleState {
  return {
    model: null,
    sessionId: null,
    report: null,
    score: null,
    history: [],
    suggestions: [],
    preview: null,
    conflictCells: [],
    error: null,
  };
}

export type ServerUpdate = {
  report?: PosteriorReport;
  score?: number;
  events?: SessionEvent[];
  suggestions?: TaskSuggestion[];
};

/** Fold a service response into the state; the only way the grid changes. */
export function applyServerState(state: ConsoleState, update: ServerUpdate): ConsoleState {
  return {
    ...state,
    report: update.report ?? state.report,
    score: update.score ?? state.score,
    history: update.events ?? state.history,
    suggestions: update.suggestions ?? state.suggestions,
    preview: null,
    conflictCells: [],
    error: null,
  };
}

export function connected(
  state: ConsoleState,
  model: ModelInfo,
  sessionId: string,
): ConsoleState {
  return { ...initialState(), model, sessionId };
}

export function showPreview(state: ConsoleState, preview: PosteriorReport): ConsoleState {
  return { ...state, preview };
}

export function clearPreview(state: ConsoleState): ConsoleState {
  return { ...state, preview: null };
}

export function rejected(
  state: ConsoleState,
  message: string,
  conflictCells: Coord[],
): ConsoleState {
  return { ...state, error: message, conflictCells, preview: null };
}

/** Cell values implied by the synced history (undo events pop the stack). */
export function knownCellValues(state: ConsoleState, task: string): CellValues {
  const model = state.model;
  if (!model) return new Map();
  const stack: Observation[] = [];
  for (const event of state.history) {
    if (event.type === "observation" && event.observation) stack.push(event.observation);
    else if (event.type === "undo") stack.pop();
  }
  let values: CellValues = new Map();
  const { rows, columns, rows_ordered } = model.rubric;
  for (const obs of stack) {
    if (obs.task !== task) continue;
    values = mergeValues(
      values,
      observationDelta(rows.length, columns.length, rows_ordered, obs),
    );
  }
  return values;
}

/**
 * Client-side pre-validation of the pending form entry; the service check
 * remains authoritative.
 */
export function pendingConflicts(state: ConsoleState, obs: Observation): Coord[] {
  const model = state.model;
  if (!model) return [];
  const { rows, columns, rows_ordered } = model.rubric;
  const delta = observationDelta(rows.length, columns.length, rows_ordered, obs);
  return conflictsWith(knownCellValues(state, obs.task), delta, rows_ordered);
}

export function observedTasks(state: ConsoleState): Set<string> {
  const tasks = new Set<string>();
  const stack: Observation[] = [];
  for (const event of state.history) {
    if (event.type === "observation" && event.observation) stack.push(event.observation);
    else if (event.type === "undo") stack.pop();
  }
  for (const obs of stack) tasks.add(obs.task);
  return tasks;
}
