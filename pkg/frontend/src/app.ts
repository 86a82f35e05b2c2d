// Session controller: one active session, sequential awaited mutations.
// Every mutation disables the inputs until the server answers, so a
// double click can only ever produce one server event; phase conflicts
// trigger a full state refetch instead of guessing.

import { ApiClient, ServiceError } from "./api.js";
import { render, type Handlers, type UiState } from "./ui.js";
import type { SessionView } from "./types.js";

export class SessionApp {
  private view: SessionView;
  private state: UiState = {
    busy: false,
    error: null,
    pickedCounter: null,
    rankingDraft: [],
    argumentDraft: [],
    argumentRankingSent: false,
  };
  private lastAction: (() => Promise<void>) | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
    view: SessionView,
  ) {
    this.view = view;
    this.syncDrafts();
    this.paint();
  }

  get sessionId(): string {
    return this.view.id;
  }

  get currentView(): SessionView {
    return this.view;
  }

  private syncDrafts(): void {
    if (this.view.phase === "awaiting_ranking") {
      const ids = this.view.candidates.map((c) => c.id);
      if (
        this.state.rankingDraft.length !== ids.length ||
        !this.state.rankingDraft.every((id) => ids.includes(id))
      ) {
        this.state.rankingDraft = ids;
      }
    }
    if (this.view.phase === "ended" && this.state.argumentDraft.length === 0) {
      this.state.argumentDraft = this.view.transcript.map((e) => e.argument);
    }
    if (this.view.phase !== "awaiting_counter") {
      this.state.pickedCounter = null;
    }
  }

  private paint(): void {
    render(this.root, this.view, this.state, this.handlers);
  }

  private apply(view: SessionView): void {
    this.view = view;
    this.state.error = null;
    this.syncDrafts();
    this.paint();
  }

  private async mutate(action: () => Promise<SessionView>): Promise<void> {
    if (this.state.busy) return; // in-flight: ignore extra clicks
    this.state.busy = true;
    this.paint();
    try {
      const view = await action();
      this.state.busy = false;
      this.apply(view);
    } catch (error) {
      this.state.busy = false;
      if (error instanceof ServiceError && error.isPhaseConflict) {
        // the client fell out of sync: refetch the authoritative state
        this.state.error = `${error.detail.code}: ${error.detail.message} (server phase: ${error.detail.phase}); view refreshed`;
        this.view = await this.client.getSession(this.view.id);
        this.syncDrafts();
        this.paint();
      } else if (error instanceof ServiceError) {
        this.state.error = `${error.detail.code}: ${error.detail.message}`;
        this.paint();
      } else {
        // network trouble: keep the state, offer a retry
        this.state.error = `network error: ${String(error)}`;
        this.paint();
      }
    }
  }

  private moveDraft(draft: string[], index: number, delta: number): string[] {
    const target = index + delta;
    if (target < 0 || target >= draft.length) return draft;
    const next = [...draft];
    [next[index], next[target]] = [next[target], next[index]];
    return next;
  }

  private get activeDraftKey(): "rankingDraft" | "argumentDraft" {
    return this.view.phase === "ended" ? "argumentDraft" : "rankingDraft";
  }

  readonly handlers: Handlers = {
    onConfidence: (value) => {
      this.lastAction = () =>
        this.mutate(() => this.client.submitConfidence(this.view.id, value));
      void this.lastAction();
    },
    onCounter: (choiceId, confidence) => {
      this.lastAction = () =>
        this.mutate(() => this.client.submitCounter(this.view.id, choiceId, confidence));
      void this.lastAction();
    },
    onRanking: (order) => {
      this.lastAction = () =>
        this.mutate(() => this.client.submitRanking(this.view.id, order));
      void this.lastAction();
    },
    onArgumentRanking: (order) => {
      this.lastAction = () =>
        this.mutate(async () => {
          const view = await this.client.submitArgumentRanking(this.view.id, order);
          this.state.argumentRankingSent = true;
          return view;
        });
      void this.lastAction();
    },
    onEnd: (reason) => {
      this.lastAction = () =>
        this.mutate(() => this.client.endSession(this.view.id, reason));
      void this.lastAction();
    },
    onRetry: () => {
      if (this.lastAction) void this.lastAction();
      else void this.refresh();
    },
    onPickCounter: (choiceId) => {
      this.state.pickedCounter = choiceId;
      this.paint();
    },
    onMoveRank: (index, delta) => {
      const key = this.activeDraftKey;
      this.state[key] = this.moveDraft(this.state[key], index, delta);
      this.paint();
    },
    onDragRank: (from, to) => {
      const key = this.activeDraftKey;
      const draft = [...this.state[key]];
      const [item] = draft.splice(from, 1);
      draft.splice(to, 0, item);
      this.state[key] = draft;
      this.paint();
    },
  };

  async refresh(): Promise<void> {
    this.apply(await this.client.getSession(this.view.id));
  }
}

export async function startSession(
  client: ApiClient,
  root: HTMLElement,
  scenarioId: string,
  participant?: string,
): Promise<SessionApp> {
  const view = await client.createSession(scenarioId, participant);
  return new SessionApp(client, root, view);
}
