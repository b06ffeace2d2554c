// Thin client over the survey service endpoints. fetch is injectable so
// component tests can stub the network completely.

import type { FeedbackPayload, TopicChip, TurnResponse } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    headers: Record<string, string> = {},
  ): Promise<T> {
    if (body !== undefined) {
      headers = { ...headers, "content-type": "application/json" };
    }
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(
        response.status,
        (payload as { error?: string }).error ?? "HttpError",
        (payload as { message?: string }).message ?? `request failed (${response.status})`,
      );
    }
    return payload as T;
  }

  createSession(role: string, details: Record<string, string>): Promise<TurnResponse> {
    return this.request("POST", "/api/sessions", { role, details });
  }

  postMessage(sessionId: string, text: string): Promise<TurnResponse> {
    return this.request("POST", `/api/sessions/${sessionId}/messages`, { text });
  }

  listTopics(sessionId: string): Promise<{ topics: TopicChip[] }> {
    return this.request("GET", `/api/sessions/${sessionId}/topics`);
  }

  chooseTopic(sessionId: string, topicId: string): Promise<TurnResponse> {
    return this.request("POST", `/api/sessions/${sessionId}/topic`, { topic_id: topicId });
  }

  switchTopic(sessionId: string): Promise<TurnResponse> {
    return this.request("POST", `/api/sessions/${sessionId}/switch-topic`);
  }

  submitFeedback(sessionId: string, survey: FeedbackPayload): Promise<TurnResponse> {
    return this.request("POST", `/api/sessions/${sessionId}/feedback`, survey);
  }

  adminReport(token: string): Promise<Record<string, unknown>> {
    return this.request("GET", "/api/admin/report", undefined, {
      authorization: `Bearer ${token}`,
    });
  }
}
