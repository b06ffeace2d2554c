"""Shared test machinery: deterministic session fuzzing and policy checks.

The fuzz driver plays whole conversations against the orchestrator with a
seeded RNG and a pre-generated reply script, asserting the conversation
policies after every transition. Both the policy property suite and the
replay determinism suite reuse it.
"""

from __future__ import annotations

import random
import re

from pulsechat import orchestrator, sentiment, survey
from pulsechat.gateway import ScriptedProvider
from pulsechat.orchestrator import (
    OrchestrationContext,
    PhaseKind,
    Session,
    SessionClosed,
    TopicStatus,
    Transition,
)
from pulsechat.prompts import PromptPack
from pulsechat.storage import EventLog

BOLD_SEGMENT = re.compile(r"\*\*[^*]+\*\*")

ALLOWED_EDGES = {
    (PhaseKind.NAME_CAPTURE, PhaseKind.TOPIC_SELECTION),
    (PhaseKind.TOPIC_SELECTION, PhaseKind.TOPIC_DISCUSSION),
    (PhaseKind.TOPIC_DISCUSSION, PhaseKind.TOPIC_SELECTION),
    (PhaseKind.TOPIC_DISCUSSION, PhaseKind.FEEDBACK_PROMPT),
    (PhaseKind.FEEDBACK_PROMPT, PhaseKind.CLOSED),
}

NAME_REPLIES = [
    "<<NAME: Alex>>",
    "<<NAME: NONE>>",
    "Sure thing. <<NAME: Sam Lee>>",
    "I would rather keep that private, thanks.",
]

BODY_REPLIES = [
    "Thanks so much for sharing that with me.",
    "Could you tell me a bit more about that?",
    "That sounds genuinely challenging, and I hear you.",
    "I really appreciate you telling me this. 😊",
]

DISCUSSION_TEXTS = [
    "it's fine.",
    "meh",
    "honestly it works well for me, I have classes I like and professors "
    "who support my goals every single week without fail.",
    "I'd rather not talk about this topic.",
    "this has been awful and unfair, I feel harassed and unsafe here.",
    "the tutoring center helped me a lot last spring",
]

SELECTION_TEXTS = [
    "hmm, not sure",
    "random",
    "1",
    "whatever you think is best",
]

FEEDBACK_COMMENTS = [
    "The chat felt safe and I liked picking topics myself.",
    "Responses were slow at times and the topic list felt narrow.",
    "pretty good overall",
]


class PolicyViolation(AssertionError):
    pass


def fixture_21_surveys():
    """The 21-response feedback fixture whose shares land on round figures.

    Satisfaction 6/11/2/1/1 (top first), reuse 4/4/5/5/3, comprehension
    7/9/3/1/1, preference 11/5/5. Comments alternate tone so the polarity
    partition and word clouds have material on both sides.
    """
    from pulsechat.analytics import (
        Comprehension,
        FeedbackSurvey,
        Preference,
        ReuseLikelihood,
        Satisfaction,
    )

    def expand(pairs):
        values = []
        for level, count in pairs:
            values.extend([level] * count)
        return values

    satisfaction = expand(
        [
            (Satisfaction.EXTREMELY_SATISFIED, 6),
            (Satisfaction.SOMEWHAT_SATISFIED, 11),
            (Satisfaction.NEUTRAL, 2),
            (Satisfaction.SOMEWHAT_DISSATISFIED, 1),
            (Satisfaction.EXTREMELY_DISSATISFIED, 1),
        ]
    )
    reuse = expand(
        [
            (ReuseLikelihood.EXTREMELY_LIKELY, 4),
            (ReuseLikelihood.VERY_LIKELY, 4),
            (ReuseLikelihood.MODERATELY_LIKELY, 5),
            (ReuseLikelihood.SLIGHTLY_LIKELY, 5),
            (ReuseLikelihood.NOT_AT_ALL_LIKELY, 3),
        ]
    )
    comprehension = expand(
        [
            (Comprehension.EXTREMELY_WELL, 7),
            (Comprehension.VERY_WELL, 9),
            (Comprehension.MODERATELY_WELL, 3),
            (Comprehension.SLIGHTLY_WELL, 1),
            (Comprehension.NOT_AT_ALL_WELL, 1),
        ]
    )
    preference = expand(
        [(Preference.CHATBOT, 11), (Preference.TRADITIONAL, 5), (Preference.NEITHER, 5)]
    )
    comments = [
        "the chat was helpful and friendly, I felt heard",
        "response time was slow and the topic list felt narrow",
    ]
    return [
        FeedbackSurvey(
            satisfaction=satisfaction[i],
            reuse_likelihood=reuse[i],
            comprehension=comprehension[i],
            preference=preference[i],
            comment=comments[i % 2],
        )
        for i in range(21)
    ]


def random_profile(rng: random.Random) -> survey.UserProfile:
    role = rng.choice(list(survey.Role))
    if role is survey.Role.STUDENT:
        details: survey.RoleDetails = survey.StudentDetails(
            degree_level=rng.choice(list(survey.DegreeLevel)),
            international=rng.random() < 0.5,
        )
    elif role is survey.Role.FACULTY:
        details = survey.FacultyDetails(track_or_rank=rng.choice(list(survey.FacultyTrack)))
    elif role is survey.Role.STAFF:
        details = survey.StaffDetails(
            working_area=rng.choice(["Library", "Facilities", "Advising Office"])
        )
    else:
        details = survey.AlumniDetails(
            graduation_decade=rng.choice(list(survey.GraduationDecade) + [None])
        )
    notes = rng.choice([None, "major: Psychology", "research focus: hydrology"])
    profile = survey.UserProfile(role=role, details=details)
    if notes:
        from dataclasses import replace

        profile = replace(profile, context_notes=notes)
    return profile


def random_survey(rng: random.Random):
    from pulsechat import analytics

    return analytics.FeedbackSurvey(
        satisfaction=rng.choice(list(analytics.Satisfaction)),
        reuse_likelihood=rng.choice(list(analytics.ReuseLikelihood)),
        comprehension=rng.choice(list(analytics.Comprehension)),
        preference=rng.choice(list(analytics.Preference)),
        comment=rng.choice(FEEDBACK_COMMENTS + [None]),
    )


def check_policies(
    ctx: OrchestrationContext,
    before: Session,
    transition: Transition,
    *,
    switch_requested: bool = False,
) -> None:
    """Assert the conversation policies hold across one transition."""
    after = transition.session
    result = transition.result

    # (a) elaboration budget never exceeds one per topic
    for state in after.topic_states.values():
        if not 0 <= state.elaboration_requests_sent <= 1:
            raise PolicyViolation(
                f"elaboration budget violated for {state.topic_id}: "
                f"{state.elaboration_requests_sent}"
            )

    # (b) only allowed phase-machine edges occur
    if before.phase != after.phase:
        edge = (before.phase.kind, after.phase.kind)
        if edge not in ALLOWED_EDGES:
            raise PolicyViolation(f"illegal phase edge {before.phase} -> {after.phase}")

    # (c) offer sets are exactly the unvisited topics
    if result.offered_topics:
        offered = {t.id for t in result.offered_topics}
        unvisited = {
            tid
            for tid, state in after.topic_states.items()
            if state.status is TopicStatus.UNVISITED
        }
        if offered != unvisited:
            raise PolicyViolation(f"offered {offered} != unvisited {unvisited}")
    if switch_requested and result.new_phase.kind is PhaseKind.TOPIC_SELECTION:
        if not result.offered_topics:
            raise PolicyViolation("switch into topic selection offered nothing")

    # visited/unvisited partition covers the template exactly
    statuses = set(after.topic_states) - set(ctx.template.topic_ids())
    if statuses or set(ctx.template.topic_ids()) - set(after.topic_states):
        raise PolicyViolation("topic states diverge from template topics")

    # (d) every turn entering topic discussion carries exactly one bold segment
    entered_discussion = (
        after.phase.kind is PhaseKind.TOPIC_DISCUSSION and before.phase != after.phase
    )
    if entered_discussion:
        bold = BOLD_SEGMENT.findall(result.assistant_text)
        if len(bold) != 1 or result.assistant_text.count("**") != 2:
            raise PolicyViolation(
                f"main-question turn has {len(bold)} bold segments: "
                f"{result.assistant_text[:80]!r}"
            )

    # at most one active topic
    active = [s for s in after.topic_states.values() if s.status is TopicStatus.ACTIVE]
    if len(active) > 1:
        raise PolicyViolation("more than one active topic")


def assert_closed_rejects(ctx: OrchestrationContext, session: Session) -> None:
    """(e) closed sessions reject every mutating operation."""
    provider = ScriptedProvider(["should never be consumed"])
    for attempt in (
        lambda: orchestrator.advance_turn(ctx, session, "hello again", provider),
        lambda: orchestrator.select_topic(ctx, session, survey.RANDOM_CHOICE),
        lambda: orchestrator.request_topic_switch(ctx, session),
    ):
        try:
            attempt()
        except SessionClosed:
            continue
        raise PolicyViolation("closed session accepted a mutating operation")
    if provider.cursor != 0:
        raise PolicyViolation("closed session consumed provider replies")


def run_fuzz_session(
    seed: int,
    registry: list[survey.SurveyTemplate],
    pack: PromptPack,
    lexicon: sentiment.SentimentLexicon,
    *,
    log: EventLog | None = None,
    max_transitions: int = 60,
) -> Session:
    """Play one seeded conversation, checking policies on every transition."""
    rng = random.Random(seed)
    profile = random_profile(rng)
    template = survey.resolve_template(profile, registry)
    ctx = OrchestrationContext(
        template=template,
        pack=pack,
        compound_scorer=lambda text: sentiment.score_text(text, lexicon).compound,
    )
    script = [rng.choice(NAME_REPLIES)] + [
        rng.choice(BODY_REPLIES) for _ in range(max_transitions)
    ]
    provider = ScriptedProvider(script)

    transition = orchestrator.start_session(
        ctx, profile, seed=rng.randrange(1_000_000), session_id=f"fuzz-{seed}"
    )
    if log is not None:
        log.append(transition.session.id, transition.events)
    session = transition.session

    for _ in range(max_transitions):
        if session.phase.kind is PhaseKind.CLOSED:
            break
        before = session
        switch_requested = False
        kind = session.phase.kind
        if kind is PhaseKind.NAME_CAPTURE:
            transition = orchestrator.advance_turn(
                ctx, session, rng.choice(["call me whatever", "Sam here!", "no name"]),
                provider,
            )
        elif kind is PhaseKind.TOPIC_SELECTION:
            roll = rng.random()
            remaining = orchestrator.available_topics(ctx, session)
            if roll < 0.6:
                transition = orchestrator.select_topic(
                    ctx, session, rng.choice(remaining).id
                )
            elif roll < 0.75:
                transition = orchestrator.select_topic(ctx, session, survey.RANDOM_CHOICE)
            else:
                transition = orchestrator.advance_turn(
                    ctx, session, rng.choice(SELECTION_TEXTS), provider
                )
        elif kind is PhaseKind.TOPIC_DISCUSSION:
            if rng.random() < 0.3:
                switch_requested = True
                transition = orchestrator.request_topic_switch(ctx, session)
            else:
                transition = orchestrator.advance_turn(
                    ctx, session, rng.choice(DISCUSSION_TEXTS), provider
                )
        else:  # feedback prompt
            if rng.random() < 0.3:
                transition = orchestrator.submit_feedback(ctx, session, random_survey(rng))
            else:
                transition = orchestrator.advance_turn(
                    ctx, session, rng.choice(FEEDBACK_COMMENTS), provider
                )
        check_policies(ctx, before, transition, switch_requested=switch_requested)
        if log is not None:
            log.append(transition.session.id, transition.events)
        session = transition.session

    if session.phase.kind is PhaseKind.CLOSED:
        assert_closed_rejects(ctx, session)
    return session
