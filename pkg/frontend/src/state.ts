/** Review-session store: the queue snapshot, the cursor, and the one label
 * draft in flight. At most one submission is outstanding at any time; a 409
 * rolls the optimistic removal back. */

import { LabelDraft, QueueItem, RootCause, StateResponse } from "./schema.js";

export function emptyDraft(reviewer: string): LabelDraft {
  return { flaky: false, causes: [], reviewer, note: "" };
}

export class ReviewSession {
  items: QueueItem[] = [];
  cursor = 0;
  iteration = 0;
  serverState: StateResponse | null = null;
  draft: LabelDraft;
  submitting = false;
  lastError = "";

  constructor(readonly reviewer: string) {
    this.draft = emptyDraft(reviewer);
  }

  loadQueue(iteration: number, items: QueueItem[]): void {
    this.iteration = iteration;
    this.items = [...items];
    this.cursor = Math.min(this.cursor, Math.max(0, this.items.length - 1));
    this.draft = emptyDraft(this.reviewer);
  }

  get current(): QueueItem | null {
    return this.items[this.cursor] ?? null;
  }

  next(): void {
    if (this.cursor < this.items.length - 1) this.cursor++;
  }

  previous(): void {
    if (this.cursor > 0) this.cursor--;
  }

  toggleFlaky(): void {
    this.draft.flaky = !this.draft.flaky;
    if (!this.draft.flaky) this.draft.causes = [];
  }

  toggleCause(cause: RootCause): void {
    const index = this.draft.causes.indexOf(cause);
    if (index >= 0) this.draft.causes.splice(index, 1);
    else this.draft.causes.push(cause);
  }

  /** Drop the current item optimistically; returns an undo closure for 409s. */
  removeCurrent(): () => void {
    const index = this.cursor;
    const item = this.items[index];
    this.items.splice(index, 1);
    if (this.cursor >= this.items.length) this.cursor = Math.max(0, this.items.length - 1);
    this.draft = emptyDraft(this.reviewer);
    return () => {
      this.items.splice(index, 0, item);
      this.cursor = index;
    };
  }

  /** Banner text like "iteration 1: 15 confirmed". */
  banner(): string {
    const state = this.serverState;
    if (!state) return `iteration ${this.iteration}`;
    const confirmed =
      state.confirmed_by_iteration.length > 0
        ? state.confirmed_by_iteration[state.confirmed_by_iteration.length - 1]
        : 0;
    const fixedPoint = state.fixed_point ? " (fixed point)" : "";
    return `iteration ${state.iteration}: ${confirmed} confirmed${fixedPoint}`;
  }
}
