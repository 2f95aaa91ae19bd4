import { describe, expect, it } from "vitest";

import { ApiError, FetchLike, TriageClient } from "../src/api.js";

function stubFetch(
  routes: Record<string, { status: number; body: unknown }>,
): { impl: FetchLike; calls: Array<{ url: string; init?: RequestInit }> } {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const impl: FetchLike = async (url, init) => {
    calls.push({ url, init });
    const route = routes[url];
    if (!route) throw new Error(`unstubbed url ${url}`);
    return new Response(JSON.stringify(route.body), {
      status: route.status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { impl, calls };
}

const STATE = {
  iteration: 0,
  seed_count: 2,
  confirmed_by_iteration: [],
  confirmed_total: 0,
  rejected_total: 0,
  queue_length: 1,
  pending_label_count: 0,
  fixed_point: false,
};

describe("TriageClient", () => {
  it("parses and validates the state response", async () => {
    const { impl } = stubFetch({ "/state": { status: 200, body: STATE } });
    const client = new TriageClient("", impl);
    const state = await client.getState();
    expect(state.seed_count).toBe(2);
  });

  it("raises ApiError with the conflict flag on 409", async () => {
    const { impl } = stubFetch({
      "/labels": { status: 409, body: { detail: "already labeled" } },
    });
    const client = new TriageClient("", impl);
    try {
      await client.postLabel({
        case_id: "x",
        decision: "reject",
        root_causes: [],
        reviewer: "",
        note: "",
      });
      expect.unreachable("postLabel should throw on 409");
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).isConflict).toBe(true);
      expect((error as ApiError).detail).toBe("already labeled");
    }
  });

  it("sends the label payload as JSON", async () => {
    const { impl, calls } = stubFetch({
      "/labels": {
        status: 200,
        body: { iteration: 0, case_id: "x", decision: "reject", pending_label_count: 1 },
      },
    });
    const client = new TriageClient("", impl);
    await client.postLabel({
      case_id: "x",
      decision: "reject",
      root_causes: [],
      reviewer: "r1",
      note: "",
    });
    const body = JSON.parse(String(calls[0].init?.body));
    expect(body).toEqual({
      case_id: "x",
      decision: "reject",
      root_causes: [],
      reviewer: "r1",
      note: "",
    });
  });

  it("rejects responses that violate the schema", async () => {
    const { impl } = stubFetch({
      "/queue": { status: 200, body: { iteration: -1, items: [] } },
    });
    const client = new TriageClient("", impl);
    await expect(client.getQueue()).rejects.toThrow();
  });
});
