// Action-to-endpoint mapping and in-flight lockout, against the stubbed API.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ChatController, RANDOM_TOPIC_ID } from "../src/state.js";
import { StubApi, turnResponse } from "./stub.js";

let stub: StubApi;
let controller: ChatController;

beforeEach(() => {
  stub = new StubApi();
  controller = new ChatController(new ApiClient("", stub.fetch));
});

async function startSession(): Promise<void> {
  stub.respondWith(
    turnResponse({
      message: "Welcome! What name should I use?",
      phase: { kind: "name_capture", topic_id: null },
      offered_topics: [],
    }),
  );
  await controller.submitAction({ kind: "role-click", role: "alumni" });
  stub.requests.length = 0;
}

describe("action-to-endpoint mapping", () => {
  it("role-click with no required details posts /api/sessions", async () => {
    await controller.submitAction({ kind: "role-click", role: "alumni" });
    expect(stub.requests).toHaveLength(1);
    expect(stub.requests[0].method).toBe("POST");
    expect(stub.requests[0].url).toBe("/api/sessions");
    expect(stub.requests[0].body).toEqual({ role: "alumni", details: {} });
  });

  it("detail-clicks accumulate and the completing click posts /api/sessions", async () => {
    await controller.submitAction({ kind: "role-click", role: "student" });
    expect(stub.requests).toHaveLength(0); // details still missing

    await controller.submitAction({
      kind: "detail-click",
      field: "degree_level",
      value: "undergraduate",
    });
    expect(stub.requests).toHaveLength(0);

    await controller.submitAction({
      kind: "detail-click",
      field: "international",
      value: "false",
    });
    expect(stub.requests).toHaveLength(1);
    expect(stub.requests[0].url).toBe("/api/sessions");
    expect(stub.requests[0].body).toEqual({
      role: "student",
      details: { degree_level: "undergraduate", international: "false" },
    });
  });

  it("text posts to the session messages endpoint", async () => {
    await startSession();
    await controller.submitAction({ kind: "text", text: "call me Ada" });
    expect(stub.requests[0].method).toBe("POST");
    expect(stub.requests[0].url).toBe("/api/sessions/s-123/messages");
    expect(stub.requests[0].body).toEqual({ text: "call me Ada" });
  });

  it("topic chip posts the topic id", async () => {
    await startSession();
    await controller.submitAction({ kind: "topic-chip", topicId: "academic-life" });
    expect(stub.requests[0].url).toBe("/api/sessions/s-123/topic");
    expect(stub.requests[0].body).toEqual({ topic_id: "academic-life" });
  });

  it("the pick-one-for-me chip posts topic_id random", async () => {
    await startSession();
    await controller.submitAction({ kind: "topic-chip", topicId: RANDOM_TOPIC_ID });
    expect(stub.requests[0].body).toEqual({ topic_id: "random" });
  });

  it("switch-topic posts to the switch endpoint during discussion", async () => {
    await startSession();
    stub.respondWith(
      turnResponse({
        phase: { kind: "topic_discussion", topic_id: "academic-life" },
        offered_topics: [],
      }),
    );
    await controller.submitAction({ kind: "topic-chip", topicId: "academic-life" });
    stub.requests.length = 0;

    await controller.submitAction({ kind: "switch-topic" });
    expect(stub.requests).toHaveLength(1);
    expect(stub.requests[0].method).toBe("POST");
    expect(stub.requests[0].url).toBe("/api/sessions/s-123/switch-topic");
  });

  it("feedback form posts the full survey", async () => {
    await startSession();
    const survey = {
      satisfaction: "somewhat_satisfied",
      reuse_likelihood: "very_likely",
      comprehension: "very_well",
      preference: "chatbot",
      comment: "nice chat",
    };
    await controller.submitAction({ kind: "feedback-form", survey });
    expect(stub.requests[0].url).toBe("/api/sessions/s-123/feedback");
    expect(stub.requests[0].body).toEqual(survey);
  });
});

describe("in-flight lockout", () => {
  it("ignores actions while a request is pending", async () => {
    await startSession();
    stub.holdResponses = true;

    const pending = controller.submitAction({ kind: "text", text: "first" });
    expect(controller.state.inFlight).toBe(true);
    expect(controller.state.inputEnabled).toBe(false);

    await controller.submitAction({ kind: "text", text: "second" });
    await controller.submitAction({ kind: "switch-topic" });
    await controller.submitAction({ kind: "topic-chip", topicId: "academic-life" });
    expect(stub.requests).toHaveLength(1); // only the first went out

    stub.holdResponses = false;
    stub.release();
    await pending;
    expect(controller.state.inFlight).toBe(false);
    expect(controller.state.inputEnabled).toBe(true);
  });

  it("switch-topic outside discussion makes no request", async () => {
    await startSession();
    await controller.submitAction({ kind: "switch-topic" });
    expect(stub.requests).toHaveLength(0);
  });
});

describe("network failure", () => {
  it("shows a retry banner and leaves the conversation unchanged", async () => {
    await startSession();
    const messagesBefore = controller.state.messages.length;
    const phaseBefore = controller.state.phase;

    stub.failNextWithNetworkError();
    await controller.submitAction({ kind: "text", text: "does this arrive?" });

    expect(controller.state.errorBanner).toBeTruthy();
    expect(controller.state.messages.length).toBe(messagesBefore);
    expect(controller.state.phase).toEqual(phaseBefore);
    expect(controller.state.inFlight).toBe(false);

    // the retry succeeds and clears the banner
    stub.respondWith(turnResponse());
    await controller.submitAction({ kind: "text", text: "does this arrive?" });
    expect(controller.state.errorBanner).toBeNull();
    expect(controller.state.messages.length).toBe(messagesBefore + 2);
  });

  it("surfaces service error bodies in the banner", async () => {
    await startSession();
    stub.respondWith({ error: "SessionBusy", message: "turn in flight" }, 409);
    await controller.submitAction({ kind: "text", text: "hi" });
    expect(controller.state.errorBanner).toContain("turn in flight");
  });
});
