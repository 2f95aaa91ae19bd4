import { describe, expect, it } from "vitest";

import { QueueItem } from "../src/schema.js";
import { ReviewSession } from "../src/state.js";

function item(caseId: string, score = 0.9): QueueItem {
  return {
    case_id: caseId,
    title: `title for ${caseId}`,
    score,
    nearest_seed_id: "seed",
    report_text: "# t\n\nbody",
    diff: [],
    suggested_root_causes: [],
  };
}

describe("ReviewSession", () => {
  it("navigates the queue within bounds", () => {
    const session = new ReviewSession("r1");
    session.loadQueue(0, [item("a"), item("b")]);
    expect(session.current?.case_id).toBe("a");
    session.next();
    expect(session.current?.case_id).toBe("b");
    session.next();
    expect(session.current?.case_id).toBe("b");
    session.previous();
    expect(session.current?.case_id).toBe("a");
  });

  it("clears causes when toggling back to non-flaky", () => {
    const session = new ReviewSession("r1");
    session.loadQueue(0, [item("a")]);
    session.toggleFlaky();
    session.toggleCause("Network");
    expect(session.draft.causes).toEqual(["Network"]);
    session.toggleFlaky();
    expect(session.draft.flaky).toBe(false);
    expect(session.draft.causes).toEqual([]);
  });

  it("optimistic removal is undoable for the 409 path", () => {
    const session = new ReviewSession("r1");
    session.loadQueue(0, [item("a"), item("b"), item("c")]);
    session.cursor = 1;
    const undo = session.removeCurrent();
    expect(session.items.map((queued) => queued.case_id)).toEqual(["a", "c"]);
    undo();
    expect(session.items.map((queued) => queued.case_id)).toEqual(["a", "b", "c"]);
    expect(session.cursor).toBe(1);
  });

  it("banner reflects the latest iteration's confirmations", () => {
    const session = new ReviewSession("r1");
    session.serverState = {
      iteration: 1,
      seed_count: 61,
      confirmed_by_iteration: [15],
      confirmed_total: 15,
      rejected_total: 2,
      queue_length: 9,
      pending_label_count: 0,
      fixed_point: false,
    };
    expect(session.banner()).toBe("iteration 1: 15 confirmed");
  });

  it("banner marks the fixed point", () => {
    const session = new ReviewSession("r1");
    session.serverState = {
      iteration: 3,
      seed_count: 71,
      confirmed_by_iteration: [15, 10, 0],
      confirmed_total: 25,
      rejected_total: 30,
      queue_length: 0,
      pending_label_count: 0,
      fixed_point: true,
    };
    expect(session.banner()).toBe("iteration 3: 0 confirmed (fixed point)");
  });
});
