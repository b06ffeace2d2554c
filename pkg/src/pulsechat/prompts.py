"""Provider-facing prompt composition.

All text the assistant sends to the language model, and the deterministic
fragments shown to participants, come from a versioned template file with
named slots ({{slot}}). Slot names are validated when the file loads, so a
typo in an operator-edited template fails at startup instead of mid-session.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .survey import SurveyTemplate, Topic, UserProfile

DEFAULT_PROMPTS_PATH = Path(__file__).parent / "data" / "prompts.json"

MAX_SYSTEM_PROMPT_CHARS = 4000

_SLOT_PATTERN = re.compile(r"\{\{([a-z_.]+)\}\}")

# Allowed slot names per template key; anything else is a load-time error.
_TEMPLATE_SLOTS: dict[str, frozenset[str]] = {
    "system": frozenset(
        {"role", "details", "name_line", "context_line", "survey_topics", "progress"}
    ),
    "opening": frozenset(),
    "greeting_named": frozenset({"name"}),
    "greeting_generic": frozenset(),
    "topic_offer": frozenset({"topic_menu"}),
    "reoffer": frozenset({"topic_menu"}),
    "main_question": frozenset({"main_question", "guidance_example"}),
    "support_line": frozenset({"support_resources"}),
    "wrap_up": frozenset(),
    "closing_thanks": frozenset(),
    "directive_greeting": frozenset(),
    "directive_followup": frozenset({"topic_title"}),
    "directive_empathy": frozenset({"topic_title"}),
    "directive_sensitive": frozenset({"topic_title", "support_resources"}),
}

# The greeting directive asks the provider to wrap the extracted name in this
# sentinel so free-form replies stay machine-readable.
NAME_SENTINEL_PATTERN = re.compile(r"<<NAME:\s*(.*?)>>", re.DOTALL)
NAME_DECLINED_MARKER = "NONE"


class DirectiveKind(Enum):
    EMPATHY = "empathy"
    FOLLOW_UP = "follow_up"
    SENSITIVE = "sensitive"
    GREETING = "greeting"


class PromptError(Exception):
    """Prompt template file problem (unknown key, bad slot, oversize output)."""


class DirectiveTopicMismatch(PromptError):
    def __init__(self, topic_id: str):
        super().__init__(
            f"sensitive directive requires a sensitive topic, got {topic_id!r}"
        )


@dataclass(frozen=True)
class ComposedPrompt:
    system_text: str
    directive_text: str | None = None


@dataclass(frozen=True)
class PromptPack:
    """Loaded, slot-validated prompt templates."""

    version: int
    templates: dict[str, str]

    def render(self, key: str, **context: str) -> str:
        template = self.templates[key]

        def substitute(match: re.Match[str]) -> str:
            slot = match.group(1)
            if slot not in context:
                raise PromptError(f"template {key!r}: no value for slot {slot!r}")
            return context[slot]

        return _SLOT_PATTERN.sub(substitute, template)


def load_prompt_pack(path: str | Path = DEFAULT_PROMPTS_PATH) -> PromptPack:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    templates = document.get("templates")
    if not isinstance(templates, dict):
        raise PromptError(f"{path}: expected a 'templates' object")
    missing = set(_TEMPLATE_SLOTS) - set(templates)
    if missing:
        raise PromptError(f"{path}: missing templates: {', '.join(sorted(missing))}")
    for key, text in templates.items():
        allowed = _TEMPLATE_SLOTS.get(key)
        if allowed is None:
            raise PromptError(f"{path}: unknown template key {key!r}")
        for slot in _SLOT_PATTERN.findall(text):
            if slot not in allowed:
                raise PromptError(
                    f"{path}: template {key!r} references unknown slot {slot!r}"
                )
    return PromptPack(version=int(document.get("version", 1)), templates=dict(templates))


_default_pack: PromptPack | None = None


def default_prompt_pack() -> PromptPack:
    global _default_pack
    if _default_pack is None:
        _default_pack = load_prompt_pack()
    return _default_pack


def strip_control_characters(text: str) -> str:
    """UI-safety pass over provider output; keeps newlines and tabs."""
    return "".join(ch for ch in text if ch in "\n\t" or ord(ch) >= 32)


def compose_system_prompt(
    profile: UserProfile,
    template: SurveyTemplate,
    progress: dict[str, str],
    pack: PromptPack | None = None,
) -> ComposedPrompt:
    """Build the per-request system prompt embedding the user profile.

    ``progress`` maps topic id to its current status value; conversation
    history is never embedded here (it travels separately in the request),
    which keeps the system prompt bounded.
    """
    pack = pack or default_prompt_pack()
    if profile.preferred_name:
        name_line = f"Preferred name: {profile.preferred_name}"
    else:
        name_line = (
            "Preferred name: not given; use a friendly, generic greeting "
            '(for example "Hey there!")'
        )
    context_line = (
        f"Context notes: {profile.context_notes}" if profile.context_notes else "Context notes: none"
    )
    survey_topics = "\n".join(
        f"- {topic.title}{' (sensitive)' if topic.sensitive else ''}"
        for topic in template.topics
    )
    progress_text = (
        "; ".join(f"{tid}: {status}" for tid, status in progress.items())
        if progress
        else "not started"
    )
    system_text = pack.render(
        "system",
        role=profile.role.value,
        details=profile.details_summary(),
        name_line=name_line,
        context_line=context_line,
        survey_topics=survey_topics,
        progress=progress_text,
    )
    if len(system_text) > MAX_SYSTEM_PROMPT_CHARS:
        raise PromptError(
            f"system prompt is {len(system_text)} chars "
            f"(limit {MAX_SYSTEM_PROMPT_CHARS}); trim the template or registry text"
        )
    return ComposedPrompt(system_text=system_text)


def render_main_question(topic: Topic, pack: PromptPack | None = None) -> str:
    """One bold main question followed by its guidance example."""
    pack = pack or default_prompt_pack()
    return pack.render(
        "main_question",
        main_question=topic.main_question,
        guidance_example=topic.guidance_example,
    )


def render_directive(
    kind: DirectiveKind, topic: Topic | None = None, pack: PromptPack | None = None
) -> str:
    """Per-turn steering text appended to the provider request."""
    pack = pack or default_prompt_pack()
    if kind is DirectiveKind.GREETING:
        return pack.render("directive_greeting")
    if topic is None:
        raise PromptError(f"directive {kind.value} requires a topic")
    if kind is DirectiveKind.FOLLOW_UP:
        return pack.render("directive_followup", topic_title=topic.title)
    if kind is DirectiveKind.EMPATHY:
        return pack.render("directive_empathy", topic_title=topic.title)
    if not topic.sensitive:
        raise DirectiveTopicMismatch(topic.id)
    return pack.render(
        "directive_sensitive",
        topic_title=topic.title,
        support_resources=topic.support_resources or "",
    )


def extract_preferred_name(reply: str) -> str | None:
    """Pull the sentinel-wrapped name out of a greeting-directive reply.

    Returns None when the provider signalled a decline, produced no sentinel,
    or produced an unusable value; the conversation then falls back to the
    generic greeting.
    """
    match = NAME_SENTINEL_PATTERN.search(reply)
    if not match:
        return None
    name = match.group(1).strip()
    if not name or name.upper() == NAME_DECLINED_MARKER or len(name) > 64:
        return None
    return name
