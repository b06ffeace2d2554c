// Feedback form completeness: every survey field present with full scales.

import { describe, expect, it } from "vitest";

import {
  FEEDBACK_CHOICE_FIELDS,
  FEEDBACK_COMMENT_FIELD,
  FEEDBACK_FIELD_NAMES,
  buildFeedbackPayload,
} from "../src/feedback.js";

const SURVEY_FIELDS = [
  "satisfaction",
  "reuse_likelihood",
  "comprehension",
  "preference",
  "comment",
];

describe("feedback form definition", () => {
  it("covers every survey field", () => {
    expect([...FEEDBACK_FIELD_NAMES].sort()).toEqual([...SURVEY_FIELDS].sort());
  });

  it("uses five-level scales for the likert questions", () => {
    for (const name of ["satisfaction", "reuse_likelihood", "comprehension"]) {
      const field = FEEDBACK_CHOICE_FIELDS.find((f) => f.name === name);
      expect(field?.options).toHaveLength(5);
    }
  });

  it("offers the three preference options", () => {
    const field = FEEDBACK_CHOICE_FIELDS.find((f) => f.name === "preference");
    expect(field?.options.map((o) => o.value)).toEqual([
      "chatbot",
      "traditional",
      "neither",
    ]);
  });

  it("keeps the comment optional", () => {
    expect(FEEDBACK_COMMENT_FIELD.name).toBe("comment");
  });
});

describe("buildFeedbackPayload", () => {
  const choices = {
    satisfaction: "somewhat_satisfied",
    reuse_likelihood: "moderately_likely",
    comprehension: "extremely_well",
    preference: "chatbot",
  };

  it("builds the wire payload", () => {
    expect(buildFeedbackPayload(choices, "  great chat  ")).toEqual({
      ...choices,
      comment: "great chat",
    });
  });

  it("maps an empty comment to null", () => {
    expect(buildFeedbackPayload(choices, "   ").comment).toBeNull();
  });

  it("rejects a missing selection", () => {
    const { preference: _dropped, ...incomplete } = choices;
    expect(() => buildFeedbackPayload(incomplete, "")).toThrow(/preference/);
  });

  it("rejects values outside the scale", () => {
    expect(() =>
      buildFeedbackPayload({ ...choices, satisfaction: "meh" }, ""),
    ).toThrow(/satisfaction/);
  });
});
