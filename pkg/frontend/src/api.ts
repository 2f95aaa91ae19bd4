/** Typed client for the triage service. Every response is schema-validated
 * before anything renders it; displayed values are therefore byte-equal to
 * what the service sent. */

import {
  LabelRequest,
  LabelResponse,
  LabelResponseSchema,
  QueueResponse,
  QueueResponseSchema,
  StateResponse,
  StateResponseSchema,
} from "./schema.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class TriageClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(response.status, String(detail));
    }
    return JSON.parse(text);
  }

  async getQueue(): Promise<QueueResponse> {
    return QueueResponseSchema.parse(await this.request("/queue"));
  }

  async getState(): Promise<StateResponse> {
    return StateResponseSchema.parse(await this.request("/state"));
  }

  async postLabel(payload: LabelRequest): Promise<LabelResponse> {
    const body = JSON.stringify(payload);
    const raw = await this.request("/labels", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body,
    });
    return LabelResponseSchema.parse(raw);
  }

  async iterate(): Promise<StateResponse> {
    return StateResponseSchema.parse(await this.request("/iterate", { method: "POST" }));
  }
}
