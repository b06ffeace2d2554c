// Chat view state and the action dispatcher.
//
// One request in flight at a time: while waiting on the service the input is
// disabled and further actions are ignored (the buttons are disabled in the
// DOM too, this is the belt to that suspenders). A network failure surfaces
// an inline retry banner and leaves the conversation state untouched.

import { ApiClient } from "./api.js";
import { renderAssistantHtml, renderParticipantHtml } from "./markup.js";
import type { Action, PhaseInfo, RenderedMessage, TopicChip, TurnResponse } from "./types.js";

export const RANDOM_TOPIC_ID = "random";

// Detail fields each role must supply before the session can start.
export const ROLE_REQUIRED_DETAILS: Record<string, string[]> = {
  student: ["degree_level", "international"],
  faculty: ["track_or_rank"],
  staff: ["working_area"],
  alumni: [],
};

export interface ChatViewState {
  sessionId: string | null;
  messages: RenderedMessage[];
  phase: PhaseInfo | null;
  topicChips: TopicChip[];
  inputEnabled: boolean;
  switchTopicVisible: boolean;
  feedbackFormVisible: boolean;
  pendingRole: string | null;
  pendingDetails: Record<string, string>;
  inFlight: boolean;
  errorBanner: string | null;
}

export function initialState(): ChatViewState {
  return {
    sessionId: null,
    messages: [],
    phase: null,
    topicChips: [],
    inputEnabled: false,
    switchTopicVisible: false,
    feedbackFormVisible: false,
    pendingRole: null,
    pendingDetails: {},
    inFlight: false,
    errorBanner: null,
  };
}

export class ChatController {
  state: ChatViewState = initialState();

  constructor(
    private client: ApiClient,
    private onChange: (state: ChatViewState) => void = () => {},
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  /** Dispatch one UI action; ignored while a request is in flight. */
  async submitAction(action: Action): Promise<void> {
    if (this.state.inFlight) return;
    this.state.errorBanner = null;

    switch (action.kind) {
      case "role-click": {
        this.state.pendingRole = action.role;
        this.state.pendingDetails = {};
        if ((ROLE_REQUIRED_DETAILS[action.role] ?? []).length === 0) {
          await this.run(() => this.client.createSession(action.role, {}));
        } else {
          this.emit();
        }
        return;
      }
      case "detail-click": {
        const role = this.state.pendingRole;
        if (!role) return;
        this.state.pendingDetails[action.field] = action.value;
        const required = ROLE_REQUIRED_DETAILS[role] ?? [];
        if (required.every((field) => field in this.state.pendingDetails)) {
          await this.run(() =>
            this.client.createSession(role, { ...this.state.pendingDetails }),
          );
        } else {
          this.emit();
        }
        return;
      }
      case "text": {
        const sessionId = this.state.sessionId;
        const text = action.text.trim();
        if (!sessionId || !text) return;
        await this.run(
          () => this.client.postMessage(sessionId, text),
          { author: "participant", html: renderParticipantHtml(text) },
        );
        return;
      }
      case "topic-chip": {
        const sessionId = this.state.sessionId;
        if (!sessionId) return;
        await this.run(() => this.client.chooseTopic(sessionId, action.topicId));
        return;
      }
      case "switch-topic": {
        const sessionId = this.state.sessionId;
        if (!sessionId || !this.state.switchTopicVisible) return;
        await this.run(() => this.client.switchTopic(sessionId));
        return;
      }
      case "feedback-form": {
        const sessionId = this.state.sessionId;
        if (!sessionId) return;
        await this.run(() => this.client.submitFeedback(sessionId, action.survey));
        return;
      }
    }
  }

  private async run(
    call: () => Promise<TurnResponse>,
    participantMessage?: RenderedMessage,
  ): Promise<void> {
    this.state.inFlight = true;
    this.state.inputEnabled = false;
    this.emit();
    try {
      const response = await call();
      if (participantMessage) this.state.messages.push(participantMessage);
      this.applyTurn(response);
    } catch (error) {
      // conversation state unchanged; offer a retry
      this.state.errorBanner =
        error instanceof Error ? error.message : "request failed; please retry";
    } finally {
      this.state.inFlight = false;
      this.state.inputEnabled = this.state.phase?.kind !== "closed" && this.state.phase !== null;
      this.emit();
    }
  }

  private applyTurn(response: TurnResponse): void {
    this.state.sessionId = response.session_id;
    this.state.phase = response.phase;
    this.state.messages.push({
      author: "assistant",
      html: renderAssistantHtml(response.message),
    });
    this.state.topicChips = response.offered_topics;
    this.state.switchTopicVisible = response.phase.kind === "topic_discussion";
    this.state.feedbackFormVisible = response.phase.kind === "feedback_prompt";
  }
}
