/**
 * View models: what the DOM layer renders, computed from state alone.
 * Probabilities display with two decimals; the heatmap runs monotonically
 * from light (unlikely mastered) to dark (likely mastered).
 */

import type { ConsoleState } from "./state.js";
import type { SessionEvent, TaskSuggestion } from "./types.js";

export function formatProb(p: number): string {
  return p.toFixed(2);
}

/** Monotone light-to-dark blue; lightness falls linearly with probability. */
export function heatColor(p: number): string {
  const clamped = Math.min(1, Math.max(0, p));
  const lightness = 96 - 58 * clamped;
  return `hsl(213 42% ${lightness.toFixed(1)}%)`;
}

export function heatTextColor(p: number): string {
  return p > 0.62 ? "#f5f8fc" : "#18222e";
}

export type GridCellView = {
  r: number;
  c: number;
  skillId: string;
  rowLabel: string;
  colLabel: string;
  behaviour: string;
  prob: number | null;
  display: string;
  color: string;
  textColor: string;
  /** Overlay value when a what-if preview is active. */
  previewDisplay: string | null;
  conflict: boolean;
};

function skillIdFor(r: number, c: number): string {
  return r <= 9 && c <= 9 ? `X_${r}${c}` : `X_${r}_${c}`;
}

export function gridView(state: ConsoleState): GridCellView[][] {
  const model = state.model;
  if (!model) return [];
  const { rows, columns, cells } = model.rubric;
  const conflictSet = new Set(state.conflictCells.map((c) => `${c.r}:${c.c}`));
  return rows.map((row, i) =>
    columns.map((col, j) => {
      const r = i + 1;
      const c = j + 1;
      const skillId = skillIdFor(r, c);
      const prob = state.report?.posteriors[skillId] ?? null;
      const previewProb = state.preview?.posteriors[skillId];
      return {
        r,
        c,
        skillId,
        rowLabel: row.label || row.id,
        colLabel: col.label || col.id,
        behaviour: cells[i]?.[j] ?? "",
        prob,
        display: prob === null ? "-" : formatProb(prob),
        color: prob === null ? "hsl(213 20% 98%)" : heatColor(prob),
        textColor: prob === null ? "#18222e" : heatTextColor(prob),
        previewDisplay: previewProb === undefined ? null : formatProb(previewProb),
        conflict: conflictSet.has(`${r}:${c}`),
      };
    }),
  );
}

export type HistoryEntryView = {
  index: number;
  ts: string;
  text: string;
  undone: boolean;
};

export function describeEvent(event: SessionEvent): string {
  if (event.type === "undo") return "undo";
  const obs = event.observation;
  if (!obs) return "observation";
  if (obs.kind === "achieved") return `${obs.task}: achieved (${obs.r},${obs.c})`;
  return `${obs.task}: (${obs.r},${obs.c}) = ${obs.value}`;
}

/** Every server event, with popped observations struck through. */
export function historyView(events: SessionEvent[]): HistoryEntryView[] {
  const undone = new Set<number>();
  const stack: number[] = [];
  events.forEach((event, index) => {
    if (event.type === "observation") stack.push(index);
    else if (event.type === "undo") {
      const popped = stack.pop();
      if (popped !== undefined) undone.add(popped);
    }
  });
  return events.map((event, index) => ({
    index,
    ts: event.ts,
    text: describeEvent(event),
    undone: event.type === "observation" && undone.has(index),
  }));
}

export type SuggestionView = { task: string; gainText: string };

export function suggestionView(suggestions: TaskSuggestion[]): SuggestionView[] {
  return suggestions.map((s) => ({
    task: s.task,
    gainText: `${s.expected_gain_bits.toFixed(3)} bits`,
  }));
}

export function scoreText(state: ConsoleState): string {
  if (state.score === null || !state.model) return "-";
  const max = state.model.skills.length;
  return `${state.score.toFixed(2)} / ${max}`;
}
