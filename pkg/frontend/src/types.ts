// Shapes shared with the survey service API.

export interface PhaseInfo {
  kind:
    | "name_capture"
    | "topic_selection"
    | "topic_discussion"
    | "feedback_prompt"
    | "closed";
  topic_id: string | null;
}

export interface TopicChip {
  id: string;
  title: string;
  sensitive: boolean;
}

export interface TurnResponse {
  session_id: string;
  message: string;
  phase: PhaseInfo;
  offered_topics: TopicChip[];
  elaboration_requested: boolean;
}

export interface FeedbackPayload {
  satisfaction: string;
  reuse_likelihood: string;
  comprehension: string;
  preference: string;
  comment: string | null;
}

export interface RenderedMessage {
  author: "assistant" | "participant";
  html: string;
}

export type Action =
  | { kind: "role-click"; role: string }
  | { kind: "detail-click"; field: string; value: string }
  | { kind: "text"; text: string }
  | { kind: "topic-chip"; topicId: string }
  | { kind: "switch-topic" }
  | { kind: "feedback-form"; survey: FeedbackPayload };
