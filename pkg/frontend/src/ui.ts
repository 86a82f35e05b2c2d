// DOM rendering. Full re-render per server response; the server view is
// the single source of truth and displayed numbers are shown verbatim.

import type { CandidateView, SessionView } from "./types.js";

export interface Handlers {
  onConfidence(value: number): void;
  onCounter(choiceId: string, confidence: number): void;
  onRanking(order: string[]): void;
  onArgumentRanking(order: string[]): void;
  onEnd(reason: string): void;
  onRetry(): void;
  onMoveRank(index: number, delta: number): void;
  onDragRank(from: number, to: number): void;
  onPickCounter(choiceId: string): void;
}

const SCALE_LABELS: Record<string, string> = {
  "0.1": "Very low (0.1)",
  "0.3": "Low (0.3)",
  "0.5": "Average (0.5)",
  "0.7": "High (0.7)",
  "0.9": "Very high (0.9)",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function confidenceLabel(value: number): string {
  return SCALE_LABELS[String(value)] ?? String(value);
}

function confidenceButtons(
  scale: number[] | null,
  disabled: boolean,
  onPick: (value: number) => void,
): HTMLElement {
  const wrap = el("div", "confidence-buttons");
  const levels = scale ?? [0.1, 0.3, 0.5, 0.7, 0.9];
  for (const value of levels) {
    const button = el("button", "confidence", confidenceLabel(value));
    button.dataset.value = String(value);
    button.disabled = disabled;
    button.addEventListener("click", () => onPick(value));
    wrap.appendChild(button);
  }
  return wrap;
}

function transcript(view: SessionView): HTMLElement {
  const box = el("section", "transcript");
  box.appendChild(el("h2", undefined, "Dialogue"));
  if (view.transcript.length === 0 && !view.pending_argument) {
    box.appendChild(el("p", "muted", "No arguments exchanged yet."));
  }
  for (const event of view.transcript) {
    const row = el("div", `bubble ${event.speaker}`);
    row.appendChild(el("div", "speaker", event.speaker === "agent" ? "Blitzcrank" : "You"));
    row.appendChild(el("div", "text", event.display));
    if (event.confidence !== null) {
      const conf = el("div", "confidence-tag", `confidence ${String(event.confidence)}`);
      conf.dataset.value = String(event.confidence);
      row.appendChild(conf);
    }
    box.appendChild(row);
  }
  return box;
}

function probabilityBars(candidates: CandidateView[]): HTMLElement {
  const box = el("section", "candidates");
  box.appendChild(el("h2", undefined, "Candidate perspectives"));
  const max = Math.max(...candidates.map((c) => c.probability), 1e-12);
  for (const candidate of candidates) {
    const row = el("div", "bar-row");
    row.dataset.candidate = candidate.id;
    row.appendChild(el("div", "bar-label", candidate.label));
    const track = el("div", "bar-track");
    const fill = el("div", "bar-fill");
    fill.style.width = `${(candidate.probability / max) * 100}%`;
    track.appendChild(fill);
    row.appendChild(track);
    // the number itself comes verbatim from the server payload
    const value = el("div", "bar-value", String(candidate.probability));
    value.dataset.probability = String(candidate.probability);
    row.appendChild(value);
    box.appendChild(row);
  }
  return box;
}

function agentCard(view: SessionView, handlers: Handlers, busy: boolean): HTMLElement {
  const box = el("section", "agent-card");
  box.appendChild(el("h2", undefined, "Blitzcrank argues"));
  if (!view.pending_argument) {
    box.appendChild(el("p", "muted", "Waiting for the next argument."));
    return box;
  }
  box.appendChild(el("p", "argument-text", view.pending_argument.display));
  box.appendChild(el("p", undefined, "How confident are you that this argument is true?"));
  box.appendChild(
    confidenceButtons(view.confidence_scale, busy || view.phase !== "awaiting_confidence", (v) =>
      handlers.onConfidence(v),
    ),
  );
  return box;
}

function counterChooser(
  view: SessionView,
  handlers: Handlers,
  busy: boolean,
  picked: string | null,
): HTMLElement {
  const box = el("section", "counter-chooser");
  box.appendChild(el("h2", undefined, "Pick your counterargument"));
  const list = el("div", "counter-list");
  for (const counter of view.offered_counters) {
    const item = el("label", "counter-option");
    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = "counter";
    radio.value = counter.id;
    radio.checked = picked === counter.id;
    radio.disabled = busy;
    radio.addEventListener("change", () => handlers.onPickCounter(counter.id));
    item.appendChild(radio);
    item.appendChild(el("span", undefined, counter.display));
    list.appendChild(item);
  }
  box.appendChild(list);
  box.appendChild(el("p", undefined, "...and how confident are you in it?"));
  box.appendChild(
    confidenceButtons(view.confidence_scale, busy || picked === null, (v) => {
      if (picked !== null) handlers.onCounter(picked, v);
    }),
  );
  return box;
}

function rankingBoard(
  title: string,
  items: { id: string; label: string }[],
  draft: string[],
  busy: boolean,
  submitLabel: string,
  onMove: (index: number, delta: number) => void,
  onDrag: (from: number, to: number) => void,
  onSubmit: (order: string[]) => void,
): HTMLElement {
  const box = el("section", "ranking-board");
  box.appendChild(el("h2", undefined, title));
  box.appendChild(
    el("p", "muted", "Drag to reorder (or use the arrow buttons), best at the top."),
  );
  const list = el("ol", "ranking-list");
  const labels = new Map(items.map((i) => [i.id, i.label]));
  draft.forEach((id, index) => {
    const item = el("li", "ranking-item");
    item.draggable = !busy;
    item.dataset.id = id;
    item.addEventListener("dragstart", (ev) => {
      ev.dataTransfer?.setData("text/plain", String(index));
    });
    item.addEventListener("dragover", (ev) => ev.preventDefault());
    item.addEventListener("drop", (ev) => {
      ev.preventDefault();
      const from = Number(ev.dataTransfer?.getData("text/plain"));
      if (!Number.isNaN(from)) onDrag(from, index);
    });
    item.appendChild(el("span", "rank-no", String(index + 1)));
    item.appendChild(el("span", "rank-label", labels.get(id) ?? id));
    const up = el("button", "rank-move", "↑");
    up.disabled = busy || index === 0;
    up.setAttribute("aria-label", `move ${labels.get(id) ?? id} up`);
    up.addEventListener("click", () => onMove(index, -1));
    const down = el("button", "rank-move", "↓");
    down.disabled = busy || index === draft.length - 1;
    down.setAttribute("aria-label", `move ${labels.get(id) ?? id} down`);
    down.addEventListener("click", () => onMove(index, +1));
    item.appendChild(up);
    item.appendChild(down);
    list.appendChild(item);
  });
  box.appendChild(list);
  const submit = el("button", "submit-ranking", submitLabel);
  const complete =
    draft.length === items.length && new Set(draft).size === items.length;
  submit.disabled = busy || !complete;
  submit.addEventListener("click", () => onSubmit([...draft]));
  box.appendChild(submit);
  return box;
}

function statusStrip(view: SessionView): HTMLElement {
  const box = el("div", "status-strip");
  box.appendChild(el("span", "status-item", `round ${view.round} of ${view.max_rounds}`));
  box.appendChild(el("span", "status-item phase", `phase: ${view.phase}`));
  const params = el("span", "status-item live-params");
  params.textContent = `learned s = ${String(view.live_params.s)}, r = ${String(view.live_params.r)}`;
  params.dataset.s = String(view.live_params.s);
  params.dataset.r = String(view.live_params.r);
  box.appendChild(params);
  return box;
}

export interface UiState {
  busy: boolean;
  error: string | null;
  pickedCounter: string | null;
  rankingDraft: string[];
  argumentDraft: string[];
  argumentRankingSent: boolean;
}

export function render(
  root: HTMLElement,
  view: SessionView,
  state: UiState,
  handlers: Handlers,
): void {
  root.textContent = "";
  root.appendChild(statusStrip(view));

  if (state.error) {
    const banner = el("div", "error-banner");
    banner.appendChild(el("span", undefined, state.error));
    const retry = el("button", "retry", "Retry");
    retry.addEventListener("click", () => handlers.onRetry());
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  const main = el("div", "columns");
  const left = el("div", "column-left");
  left.appendChild(transcript(view));

  if (view.phase === "awaiting_confidence") {
    left.appendChild(agentCard(view, handlers, state.busy));
  } else if (view.phase === "awaiting_counter") {
    left.appendChild(counterChooser(view, handlers, state.busy, state.pickedCounter));
  } else if (view.phase === "awaiting_ranking") {
    left.appendChild(
      rankingBoard(
        "Rank the four perspectives",
        view.candidates.map((c) => ({ id: c.id, label: c.label })),
        state.rankingDraft,
        state.busy,
        "Submit ranking",
        handlers.onMoveRank,
        handlers.onDragRank,
        handlers.onRanking,
      ),
    );
  } else if (view.phase === "ended") {
    const endBox = el("section", "ended-box");
    endBox.appendChild(el("h2", undefined, "Session ended"));
    endBox.appendChild(el("p", undefined, `Reason: ${view.ended_reason ?? "unknown"}`));
    left.appendChild(endBox);
    if (!state.argumentRankingSent && view.transcript.length > 0) {
      left.appendChild(
        rankingBoard(
          "Finally, rank the arguments you saw",
          view.transcript.map((e) => ({ id: e.argument, label: e.display })),
          state.argumentDraft,
          state.busy,
          "Submit argument ranking",
          handlers.onMoveRank,
          handlers.onDragRank,
          handlers.onArgumentRanking,
        ),
      );
    } else if (state.argumentRankingSent) {
      left.appendChild(el("p", "muted", "Argument ranking recorded. Thanks!"));
    }
  }

  if (view.phase !== "ended") {
    const endButton = el("button", "end-session", "End the dialogue (we agree)");
    endButton.disabled = state.busy;
    endButton.addEventListener("click", () => handlers.onEnd("agreement_reached"));
    left.appendChild(endButton);
  }

  const right = el("div", "column-right");
  right.appendChild(probabilityBars(view.candidates));
  main.appendChild(left);
  main.appendChild(right);
  root.appendChild(main);
}
