import { describe, expect, it } from "vitest";

import {
  buildLabelPayload,
  LabelRequestSchema,
  QueueResponseSchema,
  ROOT_CAUSES,
  StateResponseSchema,
} from "../src/schema.js";

const QUEUE_PAYLOAD = {
  iteration: 1,
  items: [
    {
      case_id: "Acme/qsim#7",
      title: "flaky test",
      score: 0.9231,
      nearest_seed_id: "Acme/qsim#2",
      report_text: "# flaky test\n\nbody\n\n## Comments\n[1] a at t:\nhello",
      diff: [
        {
          path: "test_x.py",
          before: "a\nb\n",
          after: "a\nc\n",
          changed_line_ranges_before: [[2, 2]],
        },
      ],
      suggested_root_causes: [],
    },
  ],
};

describe("response schemas", () => {
  it("accepts a queue payload shaped like the service response", () => {
    const parsed = QueueResponseSchema.parse(QUEUE_PAYLOAD);
    expect(parsed.items[0].case_id).toBe("Acme/qsim#7");
    // Rendered values must be byte-equal to what the service sent.
    expect(parsed.items[0].report_text).toBe(QUEUE_PAYLOAD.items[0].report_text);
    expect(parsed.items[0].score).toBe(0.9231);
  });

  it("rejects out-of-range scores", () => {
    const bad = structuredClone(QUEUE_PAYLOAD);
    bad.items[0].score = 1.5;
    expect(() => QueueResponseSchema.parse(bad)).toThrow();
  });

  it("accepts the state payload", () => {
    const parsed = StateResponseSchema.parse({
      iteration: 2,
      seed_count: 48,
      confirmed_by_iteration: [15, 10],
      confirmed_total: 25,
      rejected_total: 4,
      queue_length: 12,
      pending_label_count: 0,
      fixed_point: false,
    });
    expect(parsed.confirmed_by_iteration).toEqual([15, 10]);
  });
});

describe("label payload construction", () => {
  it("builds a confirm payload with causes", () => {
    const payload = buildLabelPayload("Acme/qsim#7", {
      flaky: true,
      causes: ["Randomness (PRNG)"],
      reviewer: "r1",
      note: "",
    });
    expect(payload.decision).toBe("confirm");
    expect(LabelRequestSchema.parse(payload)).toEqual(payload);
  });

  it("drops causes on reject", () => {
    const payload = buildLabelPayload("Acme/qsim#7", {
      flaky: false,
      causes: ["Network"],
      reviewer: "r1",
      note: "",
    });
    expect(payload.decision).toBe("reject");
    expect(payload.root_causes).toEqual([]);
  });

  it("refuses to build a confirm without causes", () => {
    expect(() =>
      buildLabelPayload("Acme/qsim#7", {
        flaky: true,
        causes: [],
        reviewer: "r1",
        note: "",
      }),
    ).toThrow();
  });

  it("exposes exactly the nine canonical causes", () => {
    expect(ROOT_CAUSES).toHaveLength(9);
    expect(ROOT_CAUSES[0]).toBe("Randomness (PRNG)");
    expect(ROOT_CAUSES[8]).toBe("Others");
  });
});
