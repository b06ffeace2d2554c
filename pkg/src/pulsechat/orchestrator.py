"""The session state machine.

Drives the conversation phases (name capture, topic selection, topic
discussion, feedback, closed), enforces the once-per-topic elaboration
budget, computes switch-topic offer sets, and mediates between participant
input, the prompt composer, and the reply provider.

Transitions are pure: each operation takes a session value plus injected
randomness and reply source and returns a :class:`Transition` holding the new
session value, the participant-facing :class:`TurnResult`, and the event
drafts to persist. The new session is produced by folding those same events,
which is what makes log replay reproduce live state field-for-field.

Only locally composed turns carry the bold main question; provider-generated
text (elaboration prompts, empathetic acknowledgments) is free-form.
"""

from __future__ import annotations

import random
import secrets
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, NamedTuple

from .analytics import FeedbackSurvey
from .gateway import GenerationParams, GenerationRequest, ReplySource
from .prompts import (
    DirectiveKind,
    PromptPack,
    compose_system_prompt,
    default_prompt_pack,
    extract_preferred_name,
    render_directive,
    render_main_question,
    strip_control_characters,
)
from .storage import EventDraft, EventKind
from .survey import RANDOM_CHOICE, SurveyTemplate, Topic, UserProfile

DEFAULT_ELABORATION_WORD_THRESHOLD = 15
DISTRESS_COMPOUND_THRESHOLD = -0.4
DEFAULT_OPT_OUT_PHRASES = (
    "i'd rather not",
    "i’d rather not",
    "rather not say",
    "skip this",
    "prefer not to",
    "don't want to talk",
    "don’t want to talk",
    "no more questions",
)


class OrchestrationError(Exception):
    pass


class SessionClosed(OrchestrationError):
    def __init__(self, session_id: str):
        super().__init__(f"session {session_id} is closed")


class EmptyInput(OrchestrationError):
    def __init__(self):
        super().__init__("input is empty after trimming")


class InvalidPhase(OrchestrationError):
    def __init__(self, operation: str, phase: Phase):
        super().__init__(f"{operation} is not valid during phase {phase.describe()}")


class TopicUnavailable(OrchestrationError):
    def __init__(self, topic_id: str):
        self.topic_id = topic_id
        super().__init__(f"topic {topic_id!r} is not available")


class NoTopicsRemain(OrchestrationError):
    def __init__(self):
        super().__init__("no topics remain to choose from")


class Author(Enum):
    ASSISTANT = "assistant"
    PARTICIPANT = "participant"


class PhaseKind(Enum):
    NAME_CAPTURE = "name_capture"
    TOPIC_SELECTION = "topic_selection"
    TOPIC_DISCUSSION = "topic_discussion"
    FEEDBACK_PROMPT = "feedback_prompt"
    CLOSED = "closed"


@dataclass(frozen=True)
class Phase:
    kind: PhaseKind
    topic_id: str | None = None

    def __post_init__(self) -> None:
        if (self.kind is PhaseKind.TOPIC_DISCUSSION) != (self.topic_id is not None):
            raise ValueError("topic_id is carried by topic-discussion phases exactly")

    def describe(self) -> str:
        if self.topic_id is not None:
            return f"{self.kind.value}({self.topic_id})"
        return self.kind.value


NAME_CAPTURE = Phase(PhaseKind.NAME_CAPTURE)
TOPIC_SELECTION = Phase(PhaseKind.TOPIC_SELECTION)
FEEDBACK_PROMPT = Phase(PhaseKind.FEEDBACK_PROMPT)
CLOSED = Phase(PhaseKind.CLOSED)


def topic_discussion(topic_id: str) -> Phase:
    return Phase(PhaseKind.TOPIC_DISCUSSION, topic_id)


class TopicStatus(Enum):
    UNVISITED = "unvisited"
    ACTIVE = "active"
    COMPLETED = "completed"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class TopicState:
    topic_id: str
    status: TopicStatus = TopicStatus.UNVISITED
    elaboration_requests_sent: int = 0
    user_turns: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.elaboration_requests_sent <= 1:
            raise ValueError("elaboration budget is 0..1")


@dataclass(frozen=True)
class Message:
    author: Author
    text: str
    topic_id: str | None
    timestamp: int

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("message text must be nonempty")


@dataclass(frozen=True)
class Session:
    id: str
    profile: UserProfile
    template_id: str
    phase: Phase
    topic_states: dict[str, TopicState]
    history: tuple[Message, ...]
    rng_seed: int
    rng_draws: int = 0


@dataclass(frozen=True)
class TurnResult:
    assistant_text: str
    new_phase: Phase
    offered_topics: tuple[Topic, ...] = ()
    elaboration_requested: bool = False

    def __post_init__(self) -> None:
        offering = self.new_phase.kind is PhaseKind.TOPIC_SELECTION
        if offering != bool(self.offered_topics):
            raise ValueError("offered_topics must be nonempty exactly when offering topics")


class Transition(NamedTuple):
    session: Session
    result: TurnResult
    events: list[EventDraft]


@dataclass(frozen=True)
class OrchestrationContext:
    """Per-template bundle of the orchestrator's injected dependencies."""

    template: SurveyTemplate
    pack: PromptPack = field(default_factory=default_prompt_pack)
    compound_scorer: Callable[[str], float] = lambda _text: 0.0
    elaboration_word_threshold: int = DEFAULT_ELABORATION_WORD_THRESHOLD
    opt_out_phrases: tuple[str, ...] = DEFAULT_OPT_OUT_PHRASES
    generation_params: GenerationParams = field(default_factory=GenerationParams)


def needs_elaboration(
    topic_state: TopicState,
    user_text: str,
    *,
    sensitive: bool,
    distress_signal: bool,
    word_threshold: int = DEFAULT_ELABORATION_WORD_THRESHOLD,
) -> bool:
    """Single follow-up policy: short answer, budget unspent, no distress.

    On sensitive topics a distress signal suppresses the follow-up entirely;
    the participant decides whether to continue.
    """
    if topic_state.elaboration_requests_sent >= 1:
        return False
    if len(user_text.split()) >= word_threshold:
        return False
    return not (sensitive and distress_signal)


def detect_distress(
    ctx: OrchestrationContext, user_text: str
) -> bool:
    """Distress heuristic: strongly negative turn or an explicit opt-out."""
    lowered = user_text.casefold()
    if any(phrase in lowered for phrase in ctx.opt_out_phrases):
        return True
    return ctx.compound_scorer(user_text) <= DISTRESS_COMPOUND_THRESHOLD


# ---------------------------------------------------------------------------
# Event folding (evolve)
# ---------------------------------------------------------------------------


def _create_session(
    template: SurveyTemplate, created: dict, profile_payload: dict
) -> Session:
    profile = UserProfile.from_dict(profile_payload["profile"])
    return Session(
        id=created["session_id"],
        profile=profile,
        template_id=created["template_id"],
        phase=NAME_CAPTURE,
        topic_states={tid: TopicState(tid) for tid in template.topic_ids()},
        history=(),
        rng_seed=int(created["rng_seed"]),
    )


def apply_event(
    template: SurveyTemplate, session: Session, kind: EventKind, payload: dict
) -> Session:
    """Pure state transition for one non-creation event."""
    if session.phase.kind is PhaseKind.CLOSED:
        raise ValueError("no events may follow closed")

    if kind is EventKind.NAME_SET:
        name = payload.get("name")
        profile = session.profile.with_preferred_name(name) if name else session.profile
        return replace(session, profile=profile, phase=TOPIC_SELECTION)

    if kind is EventKind.TOPIC_CHOSEN:
        topic_id = payload["topic_id"]
        state = session.topic_states.get(topic_id)
        if state is None or state.status is not TopicStatus.UNVISITED:
            raise ValueError(f"topic {topic_id!r} cannot become active")
        if any(s.status is TopicStatus.ACTIVE for s in session.topic_states.values()):
            raise ValueError("another topic is already active")
        states = dict(session.topic_states)
        states[topic_id] = replace(state, status=TopicStatus.ACTIVE)
        return replace(
            session,
            topic_states=states,
            phase=topic_discussion(topic_id),
            rng_draws=session.rng_draws + (1 if payload.get("via_random") else 0),
        )

    if kind is EventKind.TOPIC_SWITCHED:
        topic_id = payload["topic_id"]
        disposition = payload["disposition"]
        status = TopicStatus.COMPLETED if disposition == "completed" else TopicStatus.SKIPPED
        states = dict(session.topic_states)
        states[topic_id] = replace(states[topic_id], status=status)
        any_unvisited = any(
            s.status is TopicStatus.UNVISITED for s in states.values()
        )
        return replace(
            session,
            topic_states=states,
            phase=TOPIC_SELECTION if any_unvisited else FEEDBACK_PROMPT,
        )

    if kind in (EventKind.PARTICIPANT_MESSAGE, EventKind.ASSISTANT_MESSAGE):
        author = (
            Author.PARTICIPANT
            if kind is EventKind.PARTICIPANT_MESSAGE
            else Author.ASSISTANT
        )
        message = Message(
            author=author,
            text=payload["text"],
            topic_id=payload.get("topic_id"),
            timestamp=len(session.history),
        )
        session = replace(session, history=session.history + (message,))
        if (
            author is Author.PARTICIPANT
            and session.phase.kind is PhaseKind.TOPIC_DISCUSSION
            and session.phase.topic_id == payload.get("topic_id")
        ):
            states = dict(session.topic_states)
            state = states[session.phase.topic_id]
            states[session.phase.topic_id] = replace(state, user_turns=state.user_turns + 1)
            session = replace(session, topic_states=states)
        return session

    if kind is EventKind.ELABORATION_ISSUED:
        topic_id = payload["topic_id"]
        states = dict(session.topic_states)
        state = states[topic_id]
        states[topic_id] = replace(
            state, elaboration_requests_sent=state.elaboration_requests_sent + 1
        )
        return replace(session, topic_states=states)

    if kind is EventKind.FEEDBACK_SUBMITTED:
        return session  # surveys live in the log, not in session state

    if kind is EventKind.CLOSED:
        return replace(session, phase=CLOSED)

    raise ValueError(f"unexpected event kind {kind.value!r} mid-session")


def fold_session(template: SurveyTemplate, items: Iterable[EventDraft]) -> Session:
    """Fold a full event history (starting at creation) into a session."""
    session: Session | None = None
    created: dict | None = None
    for kind, payload in items:
        if kind is EventKind.CREATED:
            if created is not None or session is not None:
                raise ValueError("duplicate creation")
            created = payload
        elif kind is EventKind.ROLE_DETAILS_SET:
            if created is None or session is not None:
                raise ValueError("role details before creation")
            session = _create_session(template, created, payload)
        else:
            if session is None:
                raise ValueError(f"event {kind.value!r} before session exists")
            session = apply_event(template, session, kind, payload)
    if session is None:
        raise ValueError("event history does not build a session")
    return session


def _extend(
    template: SurveyTemplate, session: Session, events: list[EventDraft]
) -> Session:
    for kind, payload in events:
        session = apply_event(template, session, kind, payload)
    return session


# ---------------------------------------------------------------------------
# Transitions (decide)
# ---------------------------------------------------------------------------


def start_session(
    ctx: OrchestrationContext,
    profile: UserProfile,
    seed: int,
    session_id: str | None = None,
) -> Transition:
    """Open a session: self-introduction plus the name request, nothing else."""
    session_id = session_id or secrets.token_urlsafe(12)
    opening = ctx.pack.render("opening")
    events: list[EventDraft] = [
        (
            EventKind.CREATED,
            {
                "session_id": session_id,
                "template_id": ctx.template.id,
                "rng_seed": seed,
            },
        ),
        (EventKind.ROLE_DETAILS_SET, {"profile": profile.as_dict()}),
        (EventKind.ASSISTANT_MESSAGE, {"text": opening, "topic_id": None}),
    ]
    session = fold_session(ctx.template, events)
    result = TurnResult(assistant_text=opening, new_phase=session.phase)
    return Transition(session, result, events)


def available_topics(ctx: OrchestrationContext, session: Session) -> list[Topic]:
    """Topics not yet discussed or skipped, in template order."""
    return [
        topic
        for topic in ctx.template.topics
        if session.topic_states[topic.id].status is TopicStatus.UNVISITED
    ]


def advance_turn(
    ctx: OrchestrationContext, session: Session, user_text: str, gateway: ReplySource
) -> Transition:
    """Feed one participant message through the phase machine."""
    _ensure_open(session)
    text = user_text.strip()
    if not text:
        raise EmptyInput()
    phase = session.phase.kind
    if phase is PhaseKind.NAME_CAPTURE:
        return _advance_name_capture(ctx, session, text, gateway)
    if phase is PhaseKind.TOPIC_SELECTION:
        return _advance_topic_selection(ctx, session, text)
    if phase is PhaseKind.TOPIC_DISCUSSION:
        return _advance_discussion(ctx, session, text, gateway)
    return _advance_feedback_prompt(ctx, session, text)


def select_topic(ctx: OrchestrationContext, session: Session, choice: str) -> Transition:
    """Make a topic active, by id or uniformly at random over what remains."""
    _ensure_open(session)
    if session.phase.kind is not PhaseKind.TOPIC_SELECTION:
        raise InvalidPhase("select_topic", session.phase)
    topic, via_random = _pick_topic(ctx, session, choice)
    return _enter_topic(ctx, session, topic, via_random, prior_events=[])


def request_topic_switch(ctx: OrchestrationContext, session: Session) -> Transition:
    """Abandon the active topic and re-offer only what was never visited."""
    _ensure_open(session)
    if session.phase.kind is not PhaseKind.TOPIC_DISCUSSION:
        raise InvalidPhase("switch_topic", session.phase)
    current = session.phase.topic_id
    events: list[EventDraft] = [
        (EventKind.TOPIC_SWITCHED, {"topic_id": current, "disposition": "skipped"})
    ]
    switched = _extend(ctx.template, session, events)
    remaining = available_topics(ctx, switched)
    if remaining:
        text = ctx.pack.render("reoffer", topic_menu=_topic_menu(remaining))
    else:
        text = ctx.pack.render("wrap_up")
    events.append((EventKind.ASSISTANT_MESSAGE, {"text": text, "topic_id": None}))
    final = _extend(ctx.template, switched, events[1:])
    result = TurnResult(
        assistant_text=text, new_phase=final.phase, offered_topics=tuple(remaining)
    )
    return Transition(final, result, events)


def submit_feedback(
    ctx: OrchestrationContext, session: Session, survey: FeedbackSurvey
) -> Transition:
    """Record a structured feedback survey; closes sessions awaiting feedback."""
    _ensure_open(session)
    events: list[EventDraft] = [
        (EventKind.FEEDBACK_SUBMITTED, {"survey": survey.as_dict()})
    ]
    if session.phase.kind is PhaseKind.FEEDBACK_PROMPT:
        text = ctx.pack.render("closing_thanks")
        events.append((EventKind.ASSISTANT_MESSAGE, {"text": text, "topic_id": None}))
        events.append((EventKind.CLOSED, {}))
    else:
        text = "Thanks! Your feedback has been recorded; feel free to keep chatting."
    final = _extend(ctx.template, session, events)
    offered = (
        tuple(available_topics(ctx, final))
        if final.phase.kind is PhaseKind.TOPIC_SELECTION
        else ()
    )
    result = TurnResult(assistant_text=text, new_phase=final.phase, offered_topics=offered)
    return Transition(final, result, events)


# ---------------------------------------------------------------------------
# Phase handlers
# ---------------------------------------------------------------------------


def _advance_name_capture(
    ctx: OrchestrationContext, session: Session, text: str, gateway: ReplySource
) -> Transition:
    events: list[EventDraft] = [
        (EventKind.PARTICIPANT_MESSAGE, {"text": text, "topic_id": None})
    ]
    working = _extend(ctx.template, session, events)
    reply = gateway.generate(
        _request(ctx, working, render_directive(DirectiveKind.GREETING, pack=ctx.pack))
    )
    name = extract_preferred_name(strip_control_characters(reply))
    events.append((EventKind.NAME_SET, {"name": name}))
    if name:
        greeting = ctx.pack.render("greeting_named", name=name)
    else:
        greeting = ctx.pack.render("greeting_generic")
    offered = list(ctx.template.topics)
    text_out = greeting + "\n\n" + ctx.pack.render(
        "topic_offer", topic_menu=_topic_menu(offered)
    )
    events.append((EventKind.ASSISTANT_MESSAGE, {"text": text_out, "topic_id": None}))
    final = _extend(ctx.template, working, events[1:])
    result = TurnResult(
        assistant_text=text_out, new_phase=final.phase, offered_topics=tuple(offered)
    )
    return Transition(final, result, events)


def _advance_topic_selection(
    ctx: OrchestrationContext, session: Session, text: str
) -> Transition:
    """Typed input during topic selection: match a topic or gently re-offer."""
    events: list[EventDraft] = [
        (EventKind.PARTICIPANT_MESSAGE, {"text": text, "topic_id": None})
    ]
    working = _extend(ctx.template, session, events)
    choice = _match_topic_text(ctx, working, text)
    if choice is None:
        remaining = available_topics(ctx, working)
        text_out = ctx.pack.render("reoffer", topic_menu=_topic_menu(remaining))
        events.append((EventKind.ASSISTANT_MESSAGE, {"text": text_out, "topic_id": None}))
        final = _extend(ctx.template, working, events[1:])
        result = TurnResult(
            assistant_text=text_out,
            new_phase=final.phase,
            offered_topics=tuple(remaining),
        )
        return Transition(final, result, events)
    topic, via_random = _pick_topic(ctx, working, choice)
    return _enter_topic(ctx, working, topic, via_random, prior_events=events)


def _advance_discussion(
    ctx: OrchestrationContext, session: Session, text: str, gateway: ReplySource
) -> Transition:
    current = session.phase.topic_id
    topic = ctx.template.topic(current)
    events: list[EventDraft] = [
        (EventKind.PARTICIPANT_MESSAGE, {"text": text, "topic_id": current})
    ]
    working = _extend(ctx.template, session, events)
    state = working.topic_states[current]
    distress = detect_distress(ctx, text)

    if needs_elaboration(
        state,
        text,
        sensitive=topic.sensitive,
        distress_signal=distress,
        word_threshold=ctx.elaboration_word_threshold,
    ):
        directive = render_directive(DirectiveKind.FOLLOW_UP, topic, pack=ctx.pack)
        reply = strip_control_characters(gateway.generate(_request(ctx, working, directive)))
        tail: list[EventDraft] = [
            (EventKind.ELABORATION_ISSUED, {"topic_id": current}),
            (EventKind.ASSISTANT_MESSAGE, {"text": reply, "topic_id": current}),
        ]
        events.extend(tail)
        final = _extend(ctx.template, working, tail)
        result = TurnResult(
            assistant_text=reply, new_phase=final.phase, elaboration_requested=True
        )
        return Transition(final, result, events)

    kind = DirectiveKind.SENSITIVE if topic.sensitive else DirectiveKind.EMPATHY
    directive = render_directive(kind, topic, pack=ctx.pack)
    ack = strip_control_characters(gateway.generate(_request(ctx, working, directive)))
    tail = [(EventKind.TOPIC_SWITCHED, {"topic_id": current, "disposition": "completed"})]
    switched = _extend(ctx.template, working, tail)
    remaining = available_topics(ctx, switched)
    if remaining:
        text_out = ack + "\n\n" + ctx.pack.render(
            "topic_offer", topic_menu=_topic_menu(remaining)
        )
    else:
        text_out = ack + "\n\n" + ctx.pack.render("wrap_up")
    tail.append((EventKind.ASSISTANT_MESSAGE, {"text": text_out, "topic_id": current}))
    events.extend(tail)
    final = _extend(ctx.template, switched, tail[1:])
    result = TurnResult(
        assistant_text=text_out, new_phase=final.phase, offered_topics=tuple(remaining)
    )
    return Transition(final, result, events)


def _advance_feedback_prompt(
    ctx: OrchestrationContext, session: Session, text: str
) -> Transition:
    closing = ctx.pack.render("closing_thanks")
    events: list[EventDraft] = [
        (EventKind.PARTICIPANT_MESSAGE, {"text": text, "topic_id": None}),
        (EventKind.ASSISTANT_MESSAGE, {"text": closing, "topic_id": None}),
        (EventKind.CLOSED, {}),
    ]
    final = _extend(ctx.template, session, events)
    result = TurnResult(assistant_text=closing, new_phase=final.phase)
    return Transition(final, result, events)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _ensure_open(session: Session) -> None:
    if session.phase.kind is PhaseKind.CLOSED:
        raise SessionClosed(session.id)


def _request(
    ctx: OrchestrationContext, session: Session, directive: str
) -> GenerationRequest:
    composed = compose_system_prompt(
        session.profile,
        ctx.template,
        {tid: state.status.value for tid, state in session.topic_states.items()},
        pack=ctx.pack,
    )
    history = tuple((m.author.value, m.text) for m in session.history)
    return GenerationRequest(
        system_text=composed.system_text,
        history=history,
        directive_text=directive,
        params=ctx.generation_params,
    )


def _topic_menu(topics: Iterable[Topic]) -> str:
    return "\n".join(f"{i}. {topic.title}" for i, topic in enumerate(topics, start=1))


def _match_topic_text(
    ctx: OrchestrationContext, session: Session, text: str
) -> str | None:
    """Forgiving free-text match: id, title, menu number, or the random word."""
    folded = text.casefold().strip().rstrip(".!?")
    if folded in (RANDOM_CHOICE, "pick one for me", "surprise me", "you choose"):
        return RANDOM_CHOICE
    remaining = available_topics(ctx, session)
    for index, topic in enumerate(remaining, start=1):
        if folded in (topic.id.casefold(), topic.title.casefold(), str(index)):
            return topic.id
    return None


def _random_index(seed: int, draws: int, size: int) -> int:
    """The (draws+1)-th value of the seed's uniform stream, scaled to size.

    Each pick consumes exactly one stream value, so replaying a session's
    choices with the same seed reproduces the same topic sequence.
    """
    rng = random.Random(seed)
    value = 0.0
    for _ in range(draws + 1):
        value = rng.random()
    return int(value * size)


def _pick_topic(
    ctx: OrchestrationContext, session: Session, choice: str
) -> tuple[Topic, bool]:
    remaining = available_topics(ctx, session)
    if choice == RANDOM_CHOICE:
        if not remaining:
            raise NoTopicsRemain()
        index = _random_index(session.rng_seed, session.rng_draws, len(remaining))
        return remaining[index], True
    for topic in remaining:
        if topic.id == choice:
            return topic, False
    raise TopicUnavailable(choice)


def _enter_topic(
    ctx: OrchestrationContext,
    session: Session,
    topic: Topic,
    via_random: bool,
    prior_events: list[EventDraft],
) -> Transition:
    question = render_main_question(topic, pack=ctx.pack)
    if topic.sensitive:
        support = ctx.pack.render(
            "support_line", support_resources=topic.support_resources or ""
        )
        text_out = support + "\n\n" + question
    else:
        text_out = question
    tail: list[EventDraft] = [
        (EventKind.TOPIC_CHOSEN, {"topic_id": topic.id, "via_random": via_random}),
        (EventKind.ASSISTANT_MESSAGE, {"text": text_out, "topic_id": topic.id}),
    ]
    final = _extend(ctx.template, session, tail)
    result = TurnResult(assistant_text=text_out, new_phase=final.phase)
    return Transition(final, result, prior_events + tail)
