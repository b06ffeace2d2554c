// Feedback form definition: every survey field with its choices, so the
// form and the payload builder cannot drift apart.

import type { FeedbackPayload } from "./types.js";

export interface ChoiceField {
  name: "satisfaction" | "reuse_likelihood" | "comprehension" | "preference";
  label: string;
  options: { value: string; label: string }[];
}

export const FEEDBACK_CHOICE_FIELDS: ChoiceField[] = [
  {
    name: "satisfaction",
    label: "Overall, how satisfied were you with this conversation?",
    options: [
      { value: "extremely_dissatisfied", label: "Extremely dissatisfied" },
      { value: "somewhat_dissatisfied", label: "Somewhat dissatisfied" },
      { value: "neutral", label: "Neutral" },
      { value: "somewhat_satisfied", label: "Somewhat satisfied" },
      { value: "extremely_satisfied", label: "Extremely satisfied" },
    ],
  },
  {
    name: "reuse_likelihood",
    label: "How likely are you to use this survey chat again?",
    options: [
      { value: "not_at_all_likely", label: "Not at all likely" },
      { value: "slightly_likely", label: "Slightly likely" },
      { value: "moderately_likely", label: "Moderately likely" },
      { value: "very_likely", label: "Very likely" },
      { value: "extremely_likely", label: "Extremely likely" },
    ],
  },
  {
    name: "comprehension",
    label: "How well did the assistant understand what you wrote?",
    options: [
      { value: "not_at_all_well", label: "Not at all well" },
      { value: "slightly_well", label: "Slightly well" },
      { value: "moderately_well", label: "Moderately well" },
      { value: "very_well", label: "Very well" },
      { value: "extremely_well", label: "Extremely well" },
    ],
  },
  {
    name: "preference",
    label: "Which would you prefer next time?",
    options: [
      { value: "chatbot", label: "This chat" },
      { value: "traditional", label: "A traditional questionnaire" },
      { value: "neither", label: "No preference" },
    ],
  },
];

export const FEEDBACK_COMMENT_FIELD = {
  name: "comment" as const,
  label: "Anything else you want to share? (optional)",
};

// Every field of the survey payload, used by the completeness check and the
// form renderer.
export const FEEDBACK_FIELD_NAMES = [
  ...FEEDBACK_CHOICE_FIELDS.map((field) => field.name),
  FEEDBACK_COMMENT_FIELD.name,
];

export function buildFeedbackPayload(
  choices: Record<string, string>,
  comment: string,
): FeedbackPayload {
  for (const field of FEEDBACK_CHOICE_FIELDS) {
    const value = choices[field.name];
    if (!value || !field.options.some((option) => option.value === value)) {
      throw new Error(`feedback field ${field.name} needs a selection`);
    }
  }
  return {
    satisfaction: choices.satisfaction,
    reuse_likelihood: choices.reuse_likelihood,
    comprehension: choices.comprehension,
    preference: choices.preference,
    comment: comment.trim() ? comment.trim() : null,
  };
}
