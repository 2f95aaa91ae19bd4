/** DOM rendering. No framework: build elements, replace containers. */

import { diffRows } from "./diff.js";
import { QueueItem, ROOT_CAUSES } from "./schema.js";
import { ReviewSession } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function renderBanner(container: HTMLElement, session: ReviewSession): void {
  container.textContent = session.banner();
}

export function renderQueueList(
  container: HTMLElement,
  session: ReviewSession,
  onSelect: (index: number) => void,
): void {
  container.replaceChildren();
  session.items.forEach((item, index) => {
    const row = el("li", index === session.cursor ? "queue-row selected" : "queue-row");
    row.appendChild(el("span", "queue-score", item.score.toFixed(4)));
    row.appendChild(el("span", "queue-id", item.case_id));
    row.appendChild(el("span", "queue-title", item.title));
    row.addEventListener("click", () => onSelect(index));
    container.appendChild(row);
  });
  if (!session.items.length) {
    container.appendChild(el("li", "queue-empty", "queue is empty"));
  }
}

function renderReport(item: QueueItem): HTMLElement {
  const wrapper = el("section", "report");
  const [description, comments] = splitReport(item.report_text);
  const pre = el("pre", "report-body");
  pre.textContent = description;
  wrapper.appendChild(pre);
  if (comments !== null) {
    const details = el("details", "report-comments");
    details.appendChild(el("summary", "", "Comments"));
    const commentsPre = el("pre", "report-body");
    commentsPre.textContent = comments;
    details.appendChild(commentsPre);
    wrapper.appendChild(details);
  }
  return wrapper;
}

/** The full report renders with its comment thread collapsible. */
export function splitReport(reportText: string): [string, string | null] {
  const marker = "\n\n## Comments";
  const index = reportText.indexOf(marker);
  if (index < 0) return [reportText, null];
  return [reportText.slice(0, index), reportText.slice(index + 2)];
}

function renderDiff(item: QueueItem): HTMLElement {
  const wrapper = el("section", "diff");
  if (!item.diff.length) {
    wrapper.appendChild(el("p", "diff-empty", "no linked code change"));
    return wrapper;
  }
  for (const file of item.diff) {
    wrapper.appendChild(el("h3", "diff-path", file.path));
    const table = el("table", "diff-table");
    for (const row of diffRows(file)) {
      const tr = el("tr", `diff-row ${row.kind}`);
      tr.appendChild(el("td", "line-no", row.beforeNumber?.toString() ?? ""));
      tr.appendChild(el("td", "code before", row.beforeText ?? ""));
      tr.appendChild(el("td", "line-no", row.afterNumber?.toString() ?? ""));
      tr.appendChild(el("td", "code after", row.afterText ?? ""));
      table.appendChild(tr);
    }
    wrapper.appendChild(table);
  }
  return wrapper;
}

export interface FormHandlers {
  onToggleFlaky: () => void;
  onToggleCause: (cause: (typeof ROOT_CAUSES)[number]) => void;
  onNote: (note: string) => void;
  onSubmit: () => void;
  onSkip: () => void;
  onIterate: () => void;
}

function renderForm(session: ReviewSession, handlers: FormHandlers): HTMLElement {
  const form = el("section", "label-form");

  const toggle = el("button", session.draft.flaky ? "flaky-toggle on" : "flaky-toggle");
  toggle.textContent = session.draft.flaky ? "FLAKY" : "NON-FLAKY";
  toggle.addEventListener("click", handlers.onToggleFlaky);
  form.appendChild(toggle);

  const causes = el("div", "causes");
  for (const cause of ROOT_CAUSES) {
    const chip = el(
      "button",
      session.draft.causes.includes(cause) ? "cause-chip on" : "cause-chip",
      cause,
    );
    chip.disabled = !session.draft.flaky;
    chip.addEventListener("click", () => handlers.onToggleCause(cause));
    causes.appendChild(chip);
  }
  form.appendChild(causes);

  const note = el("textarea", "note");
  note.placeholder = "reviewer note";
  note.value = session.draft.note;
  note.addEventListener("input", () => handlers.onNote(note.value));
  form.appendChild(note);

  const actions = el("div", "actions");
  const submit = el("button", "submit", session.draft.flaky ? "Confirm (c)" : "Reject (r)");
  submit.disabled = session.submitting || session.current === null;
  submit.addEventListener("click", handlers.onSubmit);
  actions.appendChild(submit);

  const skip = el("button", "skip", "Next (j)");
  skip.addEventListener("click", handlers.onSkip);
  actions.appendChild(skip);

  const iterate = el("button", "iterate", "Re-rank (i)");
  iterate.addEventListener("click", handlers.onIterate);
  actions.appendChild(iterate);
  form.appendChild(actions);

  if (session.lastError) {
    form.appendChild(el("p", "error", session.lastError));
  }
  return form;
}

export function renderDetail(
  container: HTMLElement,
  session: ReviewSession,
  handlers: FormHandlers,
): void {
  container.replaceChildren();
  const item = session.current;
  if (item === null) {
    container.appendChild(el("p", "detail-empty", "nothing to review"));
    container.appendChild(renderForm(session, handlers));
    return;
  }
  const header = el("header", "detail-header");
  header.appendChild(el("h2", "", item.title || item.case_id));
  header.appendChild(
    el(
      "p",
      "detail-meta",
      `${item.case_id} — score ${item.score.toFixed(4)} vs ${item.nearest_seed_id}`,
    ),
  );
  container.appendChild(header);
  container.appendChild(renderReport(item));
  container.appendChild(renderDiff(item));
  container.appendChild(renderForm(session, handlers));
}
