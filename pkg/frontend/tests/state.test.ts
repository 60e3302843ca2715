import { describe, expect, it } from "vitest";

import {
  applyServerState,
  clearPreview,
  connected,
  initialState,
  knownCellValues,
  observedTasks,
  pendingConflicts,
  rejected,
  showPreview,
} from "../src/state.js";
import type { ModelInfo, PosteriorReport, SessionEvent } from "../src/types.js";

const model: ModelInfo = {
  model_id: "m1",
  provenance: "grid:params",
  rubric: {
    name: "grid",
    rows: [
      { id: "r1", label: "row one" },
      { id: "r2", label: "row two" },
    ],
    columns: [
      { id: "c1", label: "col one" },
      { id: "c2", label: "col two" },
    ],
    rows_ordered: true,
    cells: [
      ["a", "b"],
      ["c", "d"],
    ],
    tasks: ["t1", "t2"],
  },
  params: {},
  skills: ["X_11", "X_12", "X_21", "X_22"],
  tasks: ["t1", "t2"],
};

const report = (value: number): PosteriorReport => ({
  posteriors: { X_11: value, X_12: value, X_21: value, X_22: value },
  evidence_digest: `d${value}`,
  log_likelihood: 0,
});

const observationEvent = (
  task: string,
  kind: "achieved" | "obs",
  r: number,
  c: number,
  value?: number,
): SessionEvent => ({
  ts: "2030-01-01T00:00:00Z",
  type: "observation",
  observation: { task, kind, r, c, value: value ?? null },
});

const undoEvent: SessionEvent = { ts: "2030-01-01T00:00:01Z", type: "undo", observation: null };

describe("server-authoritative updates", () => {
  it("the grid changes only through applyServerState", () => {
    let state = connected(initialState(), model, "s1");
    expect(state.report).toBeNull();
    state = applyServerState(state, { report: report(0.5), score: 2.0 });
    expect(state.report?.posteriors.X_11).toBe(0.5);
    expect(state.score).toBe(2.0);
  });

  it("a server update clears previews and stale conflicts", () => {
    let state = connected(initialState(), model, "s1");
    state = showPreview(state, report(0.9));
    state = rejected(state, "409: clash", [{ r: 1, c: 1 }]);
    state = applyServerState(state, { report: report(0.6) });
    expect(state.preview).toBeNull();
    expect(state.conflictCells).toEqual([]);
    expect(state.error).toBeNull();
  });

  it("history mirrors the server event log", () => {
    let state = connected(initialState(), model, "s1");
    const events = [observationEvent("t1", "achieved", 2, 2), undoEvent];
    state = applyServerState(state, { events });
    expect(state.history).toHaveLength(2);
  });
});

describe("previews", () => {
  it("never touch the history or the main report", () => {
    let state = connected(initialState(), model, "s1");
    state = applyServerState(state, { report: report(0.5), events: [] });
    const before = state.report;
    state = showPreview(state, report(0.8));
    expect(state.preview?.posteriors.X_11).toBe(0.8);
    expect(state.report).toBe(before);
    expect(state.history).toHaveLength(0);
    state = clearPreview(state);
    expect(state.preview).toBeNull();
  });
});

describe("client-side consistency", () => {
  it("derives per-task cell values from the surviving history", () => {
    let state = connected(initialState(), model, "s1");
    state = applyServerState(state, {
      events: [
        observationEvent("t1", "achieved", 1, 2),
        observationEvent("t2", "obs", 2, 2, 0),
      ],
    });
    const values = knownCellValues(state, "t1");
    expect(values.get("1:1")).toBe(1);
    expect(values.get("1:2")).toBe(1);
    expect(values.get("2:2")).toBe(0);
    expect(knownCellValues(state, "t2").get("2:2")).toBe(0);
  });

  it("an undone observation no longer constrains the form", () => {
    let state = connected(initialState(), model, "s1");
    state = applyServerState(state, {
      events: [observationEvent("t1", "achieved", 1, 1), undoEvent],
    });
    expect(knownCellValues(state, "t1").size).toBe(0);
    expect(observedTasks(state).size).toBe(0);
  });

  it("pendingConflicts blocks a dominance-inconsistent entry", () => {
    let state = connected(initialState(), model, "s1");
    state = applyServerState(state, {
      events: [observationEvent("t1", "achieved", 1, 2)],
    });
    const clashes = pendingConflicts(state, {
      task: "t1",
      kind: "obs",
      r: 1,
      c: 1,
      value: 0,
    });
    expect(clashes.length).toBeGreaterThan(0);
    expect(
      pendingConflicts(state, { task: "t2", kind: "obs", r: 1, c: 1, value: 0 }),
    ).toEqual([]);
  });
});
