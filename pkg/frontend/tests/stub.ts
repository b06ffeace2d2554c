// Stubbed fetch recording every request, with canned turn responses.

import type { TurnResponse } from "../src/types.js";

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export function turnResponse(overrides: Partial<TurnResponse> = {}): TurnResponse {
  return {
    session_id: "s-123",
    message: "Hello! **What shall we discuss?**",
    phase: { kind: "topic_selection", topic_id: null },
    offered_topics: [
      { id: "academic-life", title: "Academic life", sensitive: false },
      { id: "financial-aid", title: "Financial aid", sensitive: false },
    ],
    elaboration_requested: false,
    ...overrides,
  };
}

export class StubApi {
  requests: RecordedRequest[] = [];
  private queue: Array<{ status: number; body: unknown } | "network-error"> = [];
  private pending: Array<(response: Response) => void> = [];
  holdResponses = false;

  respondWith(body: unknown, status = 200): void {
    this.queue.push({ status, body });
  }

  failNextWithNetworkError(): void {
    this.queue.push("network-error");
  }

  /** Resolve one held request (in-flight lockout tests). */
  release(): void {
    const next = this.pending.shift();
    if (next) next(this.nextResponse());
  }

  private nextResponse(): Response {
    const planned = this.queue.shift() ?? { status: 200, body: turnResponse() };
    if (planned === "network-error") throw new TypeError("network down");
    return new Response(JSON.stringify(planned.body), {
      status: planned.status,
      headers: { "content-type": "application/json" },
    });
  }

  fetch = (url: string, init?: RequestInit): Promise<Response> => {
    this.requests.push({
      url,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    if (this.holdResponses) {
      return new Promise((resolve) => this.pending.push(resolve));
    }
    try {
      return Promise.resolve(this.nextResponse());
    } catch (error) {
      return Promise.reject(error);
    }
  };
}
