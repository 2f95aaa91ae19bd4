/**
 * Client-side mirrors of the triage service payloads.
 *
 * The zod schemas are the contract: the UI validates every response it renders
 * and every label payload it sends, so it can never produce a request the
 * service schema rejects. Contract fixtures under ../contract are checked by
 * both this package's tests and the service's own test suite.
 */

import { z } from "zod";

export const ROOT_CAUSES = [
  "Randomness (PRNG)",
  "Floating Point Operations",
  "Software Environment",
  "Multi-threading",
  "Visualization",
  "Unhandled Exceptions",
  "Network",
  "Unordered Collection",
  "Others",
] as const;

export type RootCause = (typeof ROOT_CAUSES)[number];

export const DiffFileSchema = z.object({
  path: z.string(),
  before: z.string().nullable(),
  after: z.string().nullable(),
  changed_line_ranges_before: z.array(z.tuple([z.number().int(), z.number().int()])),
});

export const QueueItemSchema = z.object({
  case_id: z.string().min(1),
  title: z.string(),
  score: z.number().min(-1).max(1),
  nearest_seed_id: z.string(),
  report_text: z.string(),
  diff: z.array(DiffFileSchema),
  suggested_root_causes: z.array(z.string()),
});

export const QueueResponseSchema = z.object({
  iteration: z.number().int().nonnegative(),
  items: z.array(QueueItemSchema),
});

export const StateResponseSchema = z.object({
  iteration: z.number().int().nonnegative(),
  seed_count: z.number().int().nonnegative(),
  confirmed_by_iteration: z.array(z.number().int().nonnegative()),
  confirmed_total: z.number().int().nonnegative(),
  rejected_total: z.number().int().nonnegative(),
  queue_length: z.number().int().nonnegative(),
  pending_label_count: z.number().int().nonnegative(),
  fixed_point: z.boolean(),
});

export const LabelRequestSchema = z
  .object({
    case_id: z.string().min(1),
    decision: z.enum(["confirm", "reject"]),
    root_causes: z.array(z.enum(ROOT_CAUSES)),
    reviewer: z.string(),
    note: z.string(),
  })
  .refine(
    (value) => value.decision === "reject" || value.root_causes.length > 0,
    { message: "a confirmation needs at least one root cause" },
  );

export const LabelResponseSchema = z.object({
  iteration: z.number().int().nonnegative(),
  case_id: z.string(),
  decision: z.string(),
  pending_label_count: z.number().int().nonnegative(),
});

export type DiffFile = z.infer<typeof DiffFileSchema>;
export type QueueItem = z.infer<typeof QueueItemSchema>;
export type QueueResponse = z.infer<typeof QueueResponseSchema>;
export type StateResponse = z.infer<typeof StateResponseSchema>;
export type LabelRequest = z.infer<typeof LabelRequestSchema>;
export type LabelResponse = z.infer<typeof LabelResponseSchema>;

export interface LabelDraft {
  flaky: boolean;
  causes: RootCause[];
  reviewer: string;
  note: string;
}

/** Build the wire payload for a review decision; throws if it would violate
 * the service contract. */
export function buildLabelPayload(caseId: string, draft: LabelDraft): LabelRequest {
  return LabelRequestSchema.parse({
    case_id: caseId,
    decision: draft.flaky ? "confirm" : "reject",
    root_causes: draft.flaky ? draft.causes : [],
    reviewer: draft.reviewer,
    note: draft.note,
  });
}
