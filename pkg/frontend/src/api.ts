/** Typed client for the assessment service; the only backend it talks to. */

import type {
  CellRef,
  ModelInfo,
  Observation,
  PosteriorReport,
  PosteriorsWithScore,
  SessionLog,
  TaskSuggestion,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  conflicts: CellRef[];

  constructor(status: number, detail: string, conflicts: CellRef[] = []) {
    super(detail);
    this.status = status;
    this.conflicts = conflicts;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  let conflicts: CellRef[] = [];
  try {
    const body = await response.json();
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.detail) detail = JSON.stringify(body.detail);
    if (Array.isArray(body.conflicts)) {
      conflicts = body.conflicts.filter((c: CellRef) => c && typeof c.r === "number");
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, detail, conflicts);
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  listModels(): Promise<{ models: string[] }> {
    return this.request("/models");
  }

  getModel(modelId: string): Promise<ModelInfo> {
    return this.request(`/models/${modelId}`);
  }

  async createSession(modelId: string): Promise<string> {
    const body = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
      body: JSON.stringify({ model_id: modelId }),
    });
    return body.session_id;
  }

  postObservation(sessionId: string, obs: Observation): Promise<PosteriorReport> {
    return this.request(`/sessions/${sessionId}/observations`, {
      method: "POST",
      body: JSON.stringify(obs),
    });
  }

  undoLatest(sessionId: string): Promise<PosteriorReport> {
    return this.request(`/sessions/${sessionId}/observations/latest`, {
      method: "DELETE",
    });
  }

  getPosteriors(sessionId: string): Promise<PosteriorsWithScore> {
    return this.request(`/sessions/${sessionId}/posteriors`);
  }

  whatIf(sessionId: string, obs: Observation): Promise<PosteriorReport> {
    const params = new URLSearchParams({
      task: obs.task,
      r: String(obs.r),
      c: String(obs.c),
      kind: obs.kind,
    });
    if (obs.value !== undefined && obs.value !== null) {
      params.set("value", String(obs.value));
    }
    return this.request(`/sessions/${sessionId}/whatif?${params}`);
  }

  nextTasks(sessionId: string): Promise<TaskSuggestion[]> {
    return this.request(`/sessions/${sessionId}/next-task`);
  }

  getLog(sessionId: string): Promise<SessionLog> {
    return this.request(`/sessions/${sessionId}/log`);
  }
}
