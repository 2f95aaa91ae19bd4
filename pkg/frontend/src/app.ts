/** Controller: wires the service client, session store, views, and keys.
 *
 * Review flow: queue list -> detail -> label form -> submit -> next item.
 * Submission is optimistic (the item leaves the list immediately); a 409 rolls
 * it back and surfaces the conflict.
 */

import { ApiError, TriageClient } from "./api.js";
import { buildLabelPayload, ROOT_CAUSES } from "./schema.js";
import { ReviewSession } from "./state.js";
import { FormHandlers, renderBanner, renderDetail, renderQueueList } from "./view.js";

export class TriageApp {
  constructor(
    private readonly client: TriageClient,
    private readonly session: ReviewSession,
    private readonly roots: {
      banner: HTMLElement;
      queue: HTMLElement;
      detail: HTMLElement;
    },
  ) {}

  async start(): Promise<void> {
    await this.refresh();
    document.addEventListener("keydown", (event) => this.onKey(event));
  }

  async refresh(): Promise<void> {
    const [state, queue] = await Promise.all([
      this.client.getState(),
      this.client.getQueue(),
    ]);
    this.session.serverState = state;
    this.session.loadQueue(queue.iteration, queue.items);
    this.render();
  }

  render(): void {
    renderBanner(this.roots.banner, this.session);
    renderQueueList(this.roots.queue, this.session, (index) => {
      this.session.cursor = index;
      this.render();
    });
    renderDetail(this.roots.detail, this.session, this.handlers());
  }

  handlers(): FormHandlers {
    return {
      onToggleFlaky: () => {
        this.session.toggleFlaky();
        this.render();
      },
      onToggleCause: (cause) => {
        this.session.toggleCause(cause);
        this.render();
      },
      onNote: (note) => {
        this.session.draft.note = note;
      },
      onSubmit: () => void this.submit(),
      onSkip: () => {
        this.session.next();
        this.render();
      },
      onIterate: () => void this.iterate(),
    };
  }

  async submit(): Promise<void> {
    const item = this.session.current;
    if (item === null || this.session.submitting) return;
    let payload;
    try {
      payload = buildLabelPayload(item.case_id, this.session.draft);
    } catch (error) {
      this.session.lastError = error instanceof Error ? error.message : String(error);
      this.render();
      return;
    }
    this.session.submitting = true;
    this.session.lastError = "";
    const undo = this.session.removeCurrent();
    this.render();
    try {
      await this.client.postLabel(payload);
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        // Double submission or an already-labeled case: take it back.
        undo();
        this.session.lastError = `conflict: ${error.detail}`;
      } else {
        undo();
        this.session.lastError =
          error instanceof Error ? `submit failed, retry: ${error.message}` : "submit failed";
      }
    } finally {
      this.session.submitting = false;
      this.render();
    }
  }

  async iterate(): Promise<void> {
    try {
      this.session.serverState = await this.client.iterate();
      await this.refresh();
    } catch (error) {
      this.session.lastError =
        error instanceof Error ? `iterate failed: ${error.message}` : "iterate failed";
      this.render();
    }
  }

  onKey(event: KeyboardEvent): void {
    if (event.target instanceof HTMLTextAreaElement) return;
    switch (event.key) {
      case "j":
        this.session.next();
        break;
      case "k":
        this.session.previous();
        break;
      case "f":
        this.session.toggleFlaky();
        break;
      case "c":
        this.session.draft.flaky = true;
        if (!this.session.draft.causes.length) {
          this.session.draft.causes = [ROOT_CAUSES[0]];
        }
        void this.submit();
        return;
      case "r":
        this.session.draft.flaky = false;
        this.session.draft.causes = [];
        void this.submit();
        return;
      case "i":
        void this.iterate();
        return;
      default:
        return;
    }
    this.render();
  }
}
