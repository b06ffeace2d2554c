// Browser glue: renders the chat view from ChatViewState and wires DOM
// events to controller actions. All logic lives in the imported modules so
// the component tests can run without a DOM.

import { ApiClient } from "./api.js";
import {
  FEEDBACK_CHOICE_FIELDS,
  FEEDBACK_COMMENT_FIELD,
  buildFeedbackPayload,
} from "./feedback.js";
import {
  ChatController,
  RANDOM_TOPIC_ID,
  ROLE_REQUIRED_DETAILS,
  type ChatViewState,
} from "./state.js";

const DETAIL_CHOICES: Record<string, { field: string; options: string[] }[]> = {
  student: [
    { field: "degree_level", options: ["undergraduate", "masters", "doctoral"] },
    { field: "international", options: ["true", "false"] },
  ],
  faculty: [
    { field: "track_or_rank", options: ["tenure-track", "non-tenure-track", "adjunct"] },
  ],
  staff: [
    {
      field: "working_area",
      options: ["Library", "Facilities", "IT Services", "Advising", "Dining"],
    },
  ],
  alumni: [
    {
      field: "graduation_decade",
      options: ["before-1990", "1990s", "2000s", "2010s", "2020s"],
    },
  ],
};

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const controller = new ChatController(new ApiClient(""), render);

function button(label: string, onClick: () => void, className = "chip"): HTMLButtonElement {
  const element = document.createElement("button");
  element.textContent = label;
  element.className = className;
  element.addEventListener("click", onClick);
  return element;
}

function renderRolePicker(state: ChatViewState, container: HTMLElement): void {
  const prompt = document.createElement("p");
  prompt.textContent = state.pendingRole
    ? `A little more about you (${state.pendingRole}):`
    : "Welcome! To find the right survey for you, what's your role on campus?";
  container.appendChild(prompt);

  if (!state.pendingRole) {
    for (const role of Object.keys(ROLE_REQUIRED_DETAILS)) {
      container.appendChild(
        button(role, () => void controller.submitAction({ kind: "role-click", role })),
      );
    }
    return;
  }

  for (const group of DETAIL_CHOICES[state.pendingRole] ?? []) {
    if (group.field in state.pendingDetails) continue;
    const label = document.createElement("div");
    label.className = "detail-label";
    label.textContent = group.field.replace(/_/g, " ");
    container.appendChild(label);
    for (const value of group.options) {
      container.appendChild(
        button(value, () =>
          void controller.submitAction({
            kind: "detail-click",
            field: group.field,
            value,
          }),
        ),
      );
    }
  }
}

function renderFeedbackForm(container: HTMLElement): void {
  const form = document.createElement("form");
  form.className = "feedback-form";
  for (const field of FEEDBACK_CHOICE_FIELDS) {
    const fieldset = document.createElement("fieldset");
    const legend = document.createElement("legend");
    legend.textContent = field.label;
    fieldset.appendChild(legend);
    for (const option of field.options) {
      const label = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = field.name;
      radio.value = option.value;
      label.append(radio, ` ${option.label}`);
      fieldset.appendChild(label);
    }
    form.appendChild(fieldset);
  }
  const comment = document.createElement("textarea");
  comment.name = FEEDBACK_COMMENT_FIELD.name;
  comment.placeholder = FEEDBACK_COMMENT_FIELD.label;
  form.appendChild(comment);
  const submit = button("Send feedback", () => {}, "primary");
  submit.type = "submit";
  form.appendChild(submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const choices: Record<string, string> = {};
    for (const field of FEEDBACK_CHOICE_FIELDS) {
      const value = data.get(field.name);
      if (typeof value === "string") choices[field.name] = value;
    }
    try {
      const survey = buildFeedbackPayload(choices, String(data.get("comment") ?? ""));
      void controller.submitAction({ kind: "feedback-form", survey });
    } catch (error) {
      alert(error instanceof Error ? error.message : String(error));
    }
  });
  container.appendChild(form);
}

function render(state: ChatViewState): void {
  if (!root) return;
  root.replaceChildren();

  const history = document.createElement("div");
  history.className = "history";
  for (const message of state.messages) {
    const bubble = document.createElement("div");
    bubble.className = `bubble ${message.author}`;
    bubble.innerHTML = message.html; // html is escaped upstream
    history.appendChild(bubble);
  }
  root.appendChild(history);

  if (state.errorBanner) {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = `${state.errorBanner} — your last action was not applied; try again.`;
    root.appendChild(banner);
  }

  const controls = document.createElement("div");
  controls.className = "controls";

  if (!state.sessionId) {
    renderRolePicker(state, controls);
  } else {
    if (state.topicChips.length > 0) {
      for (const chip of state.topicChips) {
        controls.appendChild(
          button(chip.title, () =>
            void controller.submitAction({ kind: "topic-chip", topicId: chip.id }),
          ),
        );
      }
      controls.appendChild(
        button("Pick one for me", () =>
          void controller.submitAction({ kind: "topic-chip", topicId: RANDOM_TOPIC_ID }),
        ),
      );
    }
    if (state.switchTopicVisible) {
      const switchButton = button(
        "Switch topic",
        () => void controller.submitAction({ kind: "switch-topic" }),
        "secondary",
      );
      switchButton.disabled = state.inFlight;
      controls.appendChild(switchButton);
    }
    if (state.feedbackFormVisible) {
      renderFeedbackForm(controls);
    }

    const row = document.createElement("div");
    row.className = "input-row";
    const input = document.createElement("input");
    input.type = "text";
    input.placeholder = state.inputEnabled ? "Type your answer…" : "…";
    input.disabled = !state.inputEnabled || state.inFlight;
    const send = button(
      "Send",
      () => {
        const text = input.value;
        input.value = "";
        void controller.submitAction({ kind: "text", text });
      },
      "primary",
    );
    send.disabled = !state.inputEnabled || state.inFlight;
    input.addEventListener("keydown", (event) => {
      if (event.key === "Enter" && !send.disabled) send.click();
    });
    row.append(input, send);
    root.appendChild(controls);
    root.appendChild(row);
    history.scrollTop = history.scrollHeight;
    if (state.inputEnabled) input.focus();
    return;
  }

  root.appendChild(controls);
}

render(controller.state);
