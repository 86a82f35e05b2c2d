// Thin fetch client for the dialogue service.

import type { ApiError, ScenarioSummary, SessionView } from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: ApiError,
  ) {
    super(`${detail.code}: ${detail.message}`);
  }

  get isPhaseConflict(): boolean {
    return this.status === 409;
  }
}

async function request<T>(base: string, method: string, path: string, body?: unknown): Promise<T> {
  const resp = await fetch(base + path, {
    method,
    headers: body === undefined ? undefined : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const text = await resp.text();
  const payload = text ? JSON.parse(text) : null;
  if (!resp.ok) {
    const detail: ApiError =
      payload && typeof payload.code === "string"
        ? payload
        : { code: `http_${resp.status}`, message: text, phase: "" };
    throw new ServiceError(resp.status, detail);
  }
  return payload as T;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  listScenarios(): Promise<ScenarioSummary[]> {
    return request(this.base, "GET", "/api/scenarios");
  }

  createSession(scenarioId: string, participant?: string): Promise<SessionView> {
    const body: Record<string, unknown> = { scenario_id: scenarioId };
    if (participant) body.participant = participant;
    return request(this.base, "POST", "/api/sessions", body);
  }

  getSession(id: string): Promise<SessionView> {
    return request(this.base, "GET", `/api/sessions/${id}`);
  }

  submitConfidence(id: string, value: number): Promise<SessionView> {
    return request(this.base, "POST", `/api/sessions/${id}/confidence`, { value });
  }

  submitCounter(id: string, choiceId: string, confidence: number): Promise<SessionView> {
    return request(this.base, "POST", `/api/sessions/${id}/counter`, {
      choice_id: choiceId,
      confidence,
    });
  }

  submitRanking(id: string, order: string[]): Promise<SessionView> {
    return request(this.base, "POST", `/api/sessions/${id}/ranking`, { order });
  }

  submitArgumentRanking(id: string, order: string[]): Promise<SessionView> {
    return request(this.base, "POST", `/api/sessions/${id}/argument-ranking`, { order });
  }

  endSession(id: string, reason: string): Promise<SessionView> {
    return request(this.base, "POST", `/api/sessions/${id}/end`, { reason });
  }

  fetchTrace(id: string): Promise<unknown> {
    return request(this.base, "GET", `/api/sessions/${id}/trace`);
  }
}
