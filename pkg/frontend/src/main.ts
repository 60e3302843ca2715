/**
 * DOM wiring for the assessment console. All state changes funnel through
 * the pure transitions in state.ts; every render follows a server response.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  applyServerState,
  clearPreview,
  connected,
  initialState,
  pendingConflicts,
  rejected,
  showPreview,
  type ConsoleState,
} from "./state.js";
import type { Observation, ObservationKind } from "./types.js";
import { gridView, historyView, scoreText, suggestionView } from "./view.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

class Console {
  private api: ApiClient;
  private state: ConsoleState = initialState();
  private selected: { r: number; c: number } | null = null;

  constructor(baseUrl: string) {
    this.api = new ApiClient(baseUrl);
  }

  bind(): void {
    $("connect").addEventListener("click", () => void this.connect());
    $("record").addEventListener("click", () => void this.record());
    $("undo").addEventListener("click", () => void this.undo());
    $<HTMLSelectElement>("kind").addEventListener("change", () => this.render());
    $<HTMLSelectElement>("task").addEventListener("change", () => this.render());
    $<HTMLSelectElement>("value").addEventListener("change", () => this.render());
  }

  private pendingObservation(): Observation | null {
    if (!this.selected) return null;
    const task = $<HTMLSelectElement>("task").value;
    const kind = $<HTMLSelectElement>("kind").value as ObservationKind;
    const obs: Observation = { task, kind, ...this.selected };
    if (kind === "obs") obs.value = Number($<HTMLSelectElement>("value").value);
    return obs;
  }

  private async connect(): Promise<void> {
    try {
      const { models } = await this.api.listModels();
      const modelId = models[0];
      if (!modelId) throw new ApiError(404, "no model registered on the service");
      const model = await this.api.getModel(modelId);
      const sessionId = await this.api.createSession(modelId);
      this.state = connected(this.state, model, sessionId);
      await this.sync();
    } catch (err) {
      this.fail(err);
    }
  }

  /** Re-hydrate everything the grid, panel and history show. */
  private async sync(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    const [posteriors, log, suggestions] = await Promise.all([
      this.api.getPosteriors(sessionId),
      this.api.getLog(sessionId),
      this.api.nextTasks(sessionId),
    ]);
    this.state = applyServerState(this.state, {
      report: posteriors,
      score: posteriors.probabilistic_score,
      events: log.events,
      suggestions,
    });
    this.render();
  }

  private async record(): Promise<void> {
    const sessionId = this.state.sessionId;
    const obs = this.pendingObservation();
    if (!sessionId || !obs) return;
    try {
      await this.api.postObservation(sessionId, obs);
      await this.sync();
    } catch (err) {
      this.fail(err);
    }
  }

  private async undo(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    try {
      await this.api.undoLatest(sessionId);
      await this.sync();
    } catch (err) {
      this.fail(err);
    }
  }

  private async preview(r: number, c: number): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId || !$<HTMLInputElement>("preview-mode").checked) return;
    const base = this.pendingObservation();
    const obs: Observation = { ...(base ?? { task: "", kind: "achieved" as const }), r, c };
    if (!obs.task) obs.task = $<HTMLSelectElement>("task").value;
    try {
      const report = await this.api.whatIf(sessionId, obs);
      this.state = showPreview(this.state, report);
      this.render();
    } catch {
      // previews fail silently; the form still validates on submit
    }
  }

  private endPreview(): void {
    if (!this.state.preview) return;
    this.state = clearPreview(this.state);
    this.render();
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError) {
      this.state = rejected(
        this.state,
        `${err.status}: ${err.message}`,
        err.conflicts.map(({ r, c }) => ({ r, c })),
      );
    } else {
      this.state = rejected(this.state, String(err), []);
    }
    this.render();
  }

  private render(): void {
    const model = this.state.model;
    $("session-info").textContent = this.state.sessionId
      ? `session ${this.state.sessionId.slice(0, 8)} on ${model?.provenance ?? ""}`
      : "not connected";
    $("score").textContent = scoreText(this.state);
    $("error").textContent = this.state.error ?? "";

    this.renderGrid();
    this.renderForm();
    this.renderSuggestions();
    this.renderHistory();
  }

  private renderGrid(): void {
    const container = $("grid");
    container.innerHTML = "";
    const rows = gridView(this.state);
    const nCols = rows[0]?.length ?? 0;
    container.style.gridTemplateColumns = `repeat(${nCols}, minmax(9rem, 1fr))`;
    for (const row of rows) {
      for (const cell of row) {
        const div = document.createElement("div");
        div.className = "cell";
        if (cell.conflict) div.classList.add("conflict");
        if (this.selected?.r === cell.r && this.selected?.c === cell.c) {
          div.classList.add("selected");
        }
        div.style.background = cell.color;
        div.style.color = cell.textColor;
        const preview =
          cell.previewDisplay === null
            ? ""
            : `<span class="preview">&rarr; ${cell.previewDisplay}</span>`;
        div.innerHTML =
          `<header>${cell.rowLabel} &times; ${cell.colLabel}</header>` +
          `<p>${cell.behaviour}</p>` +
          `<strong data-skill="${cell.skillId}">${cell.display}</strong>${preview}`;
        div.addEventListener("click", () => {
          this.selected = { r: cell.r, c: cell.c };
          this.render();
        });
        div.addEventListener("mouseenter", () => void this.preview(cell.r, cell.c));
        div.addEventListener("mouseleave", () => this.endPreview());
        container.appendChild(div);
      }
    }
  }

  private renderForm(): void {
    const model = this.state.model;
    const taskSelect = $<HTMLSelectElement>("task");
    if (model && taskSelect.options.length !== model.tasks.length) {
      taskSelect.innerHTML = model.tasks
        .map((t) => `<option value="${t}">${t}</option>`)
        .join("");
    }
    const kind = $<HTMLSelectElement>("kind").value as ObservationKind;
    $<HTMLSelectElement>("value").disabled = kind !== "obs";
    $("target").textContent = this.selected
      ? `(${this.selected.r}, ${this.selected.c})`
      : "click a cell";

    const record = $<HTMLButtonElement>("record");
    const obs = this.pendingObservation();
    if (!obs || !this.state.sessionId) {
      record.disabled = true;
      $("form-warning").textContent = "";
      return;
    }
    const clashes = pendingConflicts(this.state, obs);
    record.disabled = clashes.length > 0;
    $("form-warning").textContent = clashes.length
      ? `conflicts with recorded outcomes at ${clashes
          .map((x) => `(${x.r},${x.c})`)
          .join(", ")}`
      : "";
  }

  private renderSuggestions(): void {
    const list = $("suggestions");
    list.innerHTML = "";
    for (const s of suggestionView(this.state.suggestions)) {
      const li = document.createElement("li");
      li.textContent = `${s.task} - ${s.gainText}`;
      list.appendChild(li);
    }
  }

  private renderHistory(): void {
    const list = $("history");
    list.innerHTML = "";
    for (const entry of historyView(this.state.history)) {
      const li = document.createElement("li");
      li.textContent = entry.text;
      if (entry.undone) li.classList.add("undone");
      list.appendChild(li);
    }
    $<HTMLButtonElement>("undo").disabled = !this.state.history.some(
      (e) => e.type === "observation",
    );
  }
}

const baseUrl = new URLSearchParams(window.location.search).get("api") ?? "";
const app = new Console(baseUrl);
app.bind();
