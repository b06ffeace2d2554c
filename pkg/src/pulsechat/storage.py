"""Event-sourced persistence: append-only log, deterministic replay, exports.

One newline-delimited JSON file per data directory holds every session event;
an in-memory index is rebuilt at startup. Appends are flushed (and by default
fsynced) before the call returns, and a torn final line from a crash is
ignored on reload, so every fully-written event survives.

Anonymity: no account identifiers exist anywhere in the log. Session ids are
random tokens; self-chosen preferred names are stored with the transcript but
never included in the feedback export.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Iterable

if TYPE_CHECKING:
    from .orchestrator import Session
    from .sentiment import SentimentScores
    from .survey import SurveyTemplate

EVENTS_FILENAME = "events.ndjson"


class EventKind(Enum):
    CREATED = "created"
    ROLE_DETAILS_SET = "role_details_set"
    NAME_SET = "name_set"
    TOPIC_CHOSEN = "topic_chosen"
    TOPIC_SWITCHED = "topic_switched"
    PARTICIPANT_MESSAGE = "participant_message"
    ASSISTANT_MESSAGE = "assistant_message"
    ELABORATION_ISSUED = "elaboration_issued"
    FEEDBACK_SUBMITTED = "feedback_submitted"
    CLOSED = "closed"


# (kind, payload) pairs produced by orchestrator transitions before the log
# assigns sequence numbers and timestamps.
EventDraft = tuple[EventKind, dict]


class StorageError(Exception):
    pass


class SequenceConflict(StorageError):
    def __init__(self, session_id: str, seq: int, expected: int):
        self.seq = seq
        self.expected = expected
        super().__init__(
            f"session {session_id}: got seq {seq}, expected {expected} (stale writer?)"
        )


class StorageFull(StorageError):
    pass


class UnknownSession(StorageError):
    def __init__(self, session_id: str):
        super().__init__(f"unknown session: {session_id}")


class CorruptLog(StorageError):
    def __init__(self, seq: int, detail: str = ""):
        self.seq = seq
        super().__init__(f"corrupt log at seq {seq}" + (f": {detail}" if detail else ""))


class SessionAlreadyClosed(StorageError):
    def __init__(self, session_id: str):
        super().__init__(f"session {session_id} is closed; no further events accepted")


@dataclass(frozen=True)
class SessionEvent:
    session_id: str
    seq: int
    kind: EventKind
    payload: dict
    timestamp: str

    def to_record(self) -> dict:
        return {
            "session_id": self.session_id,
            "seq": self.seq,
            "kind": self.kind.value,
            "payload": self.payload,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_record(cls, record: dict) -> SessionEvent:
        return cls(
            session_id=record["session_id"],
            seq=int(record["seq"]),
            kind=EventKind(record["kind"]),
            payload=record["payload"],
            timestamp=record["timestamp"],
        )


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def canonical_record_line(record: dict) -> str:
    """Stable serialization so export -> import -> export is byte-identical."""
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


class EventLog:
    """Append-only event store over a single NDJSON file.

    The seq precondition gives optimistic concurrency: one writer per session
    without locks across processes. ``durable=False`` skips fsync for test
    speed; writes are still flushed.
    """

    def __init__(
        self,
        data_dir: str | Path,
        *,
        durable: bool = True,
        clock: Callable[[], str] = _utc_now_iso,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.path = self.data_dir / EVENTS_FILENAME
        self._durable = durable
        self._clock = clock
        self._events: dict[str, list[SessionEvent]] = {}
        self._order: list[SessionEvent] = []
        self._closed: set[str] = set()
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        blob = self.path.read_bytes()
        lines = blob.split(b"\n")
        # No trailing newline on the final chunk means a torn write; drop it.
        complete, tail = lines[:-1], lines[-1]
        if tail:
            pass
        for raw in complete:
            if not raw.strip():
                continue
            try:
                event = SessionEvent.from_record(json.loads(raw.decode("utf-8")))
            except (ValueError, KeyError) as exc:
                raise CorruptLog(-1, f"undecodable record: {exc}") from exc
            self._index(event)

    def _index(self, event: SessionEvent) -> None:
        self._events.setdefault(event.session_id, []).append(event)
        self._order.append(event)
        if event.kind is EventKind.CLOSED:
            self._closed.add(event.session_id)

    def next_seq(self, session_id: str) -> int:
        events = self._events.get(session_id)
        return 0 if not events else events[-1].seq + 1

    def append_event(self, event: SessionEvent) -> None:
        """Durably append one event; raises on seq races and closed sessions."""
        expected = self.next_seq(event.session_id)
        if event.seq != expected:
            raise SequenceConflict(event.session_id, event.seq, expected)
        if expected == 0 and event.kind is not EventKind.CREATED:
            raise CorruptLog(0, "first event of a session must be 'created'")
        if event.session_id in self._closed:
            raise SessionAlreadyClosed(event.session_id)
        line = canonical_record_line(event.to_record()) + "\n"
        try:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()
                if self._durable:
                    os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageFull(f"cannot append to {self.path}: {exc}") from exc
        self._index(event)

    def append(self, session_id: str, drafts: Iterable[EventDraft]) -> list[SessionEvent]:
        """Assign seq/timestamps to transition drafts and persist them."""
        appended = []
        for kind, payload in drafts:
            event = SessionEvent(
                session_id=session_id,
                seq=self.next_seq(session_id),
                kind=kind,
                payload=payload,
                timestamp=self._clock(),
            )
            self.append_event(event)
            appended.append(event)
        return appended

    def session_ids(self) -> list[str]:
        return list(self._events)

    def has_session(self, session_id: str) -> bool:
        return session_id in self._events

    def events_for(self, session_id: str) -> list[SessionEvent]:
        if session_id not in self._events:
            raise UnknownSession(session_id)
        return list(self._events[session_id])

    def all_events(self) -> list[SessionEvent]:
        return list(self._order)


def replay_session(
    log: EventLog, session_id: str, registry: list["SurveyTemplate"]
) -> "Session":
    """Rebuild the exact live session value by folding its event history."""
    from .orchestrator import fold_session  # local import avoids a module cycle

    events = log.events_for(session_id)
    for position, event in enumerate(events):
        if event.seq != position:
            raise CorruptLog(position, f"gap before seq {event.seq}")
    if events[0].kind is not EventKind.CREATED:
        raise CorruptLog(0, "session log does not start with 'created'")
    template_id = events[0].payload.get("template_id")
    template = next((t for t in registry if t.id == template_id), None)
    if template is None:
        raise CorruptLog(0, f"unknown template {template_id!r}")
    try:
        return fold_session(template, [(e.kind, e.payload) for e in events])
    except ValueError as exc:
        raise CorruptLog(-1, str(exc)) from exc


class ExportKind(Enum):
    TRANSCRIPTS = "transcripts"
    FEEDBACK = "feedback"
    SENTIMENT = "sentiment"


class ExportFormat(Enum):
    RECORD_LINES = "ndjson"
    CSV = "csv"


TRANSCRIPT_FIELDS = ("session_id", "author", "topic_id", "text", "timestamp")
FEEDBACK_FIELDS = (
    "session_id",
    "satisfaction",
    "reuse_likelihood",
    "comprehension",
    "preference",
    "comment",
    "timestamp",
)
SENTIMENT_FIELDS = (
    "session_id",
    "comment",
    "compound",
    "positive",
    "neutral",
    "negative",
    "timestamp",
)


def transcript_records(log: EventLog) -> list[dict]:
    records = []
    for event in log.all_events():
        if event.kind is EventKind.PARTICIPANT_MESSAGE:
            author = "participant"
        elif event.kind is EventKind.ASSISTANT_MESSAGE:
            author = "assistant"
        else:
            continue
        records.append(
            {
                "session_id": event.session_id,
                "author": author,
                "topic_id": event.payload.get("topic_id"),
                "text": event.payload.get("text", ""),
                "timestamp": event.timestamp,
            }
        )
    return records


def feedback_records(log: EventLog) -> list[dict]:
    records = []
    for event in log.all_events():
        if event.kind is not EventKind.FEEDBACK_SUBMITTED:
            continue
        survey = event.payload.get("survey", {})
        records.append(
            {
                "session_id": event.session_id,
                "satisfaction": survey.get("satisfaction"),
                "reuse_likelihood": survey.get("reuse_likelihood"),
                "comprehension": survey.get("comprehension"),
                "preference": survey.get("preference"),
                "comment": survey.get("comment") or "",
                "timestamp": event.timestamp,
            }
        )
    return records


def sentiment_records(
    log: EventLog, score_fn: Callable[[str], "SentimentScores"]
) -> list[dict]:
    records = []
    for record in feedback_records(log):
        comment = record["comment"]
        if not comment:
            continue
        scores = score_fn(comment)
        records.append(
            {
                "session_id": record["session_id"],
                "comment": comment,
                "compound": scores.compound,
                "positive": scores.positive,
                "neutral": scores.neutral,
                "negative": scores.negative,
                "timestamp": record["timestamp"],
            }
        )
    return records


def export(
    log: EventLog,
    what: ExportKind,
    fmt: ExportFormat,
    *,
    score_fn: Callable[[str], "SentimentScores"] | None = None,
) -> bytes:
    """Serialize one data family; RecordLines output round-trips losslessly."""
    if what is ExportKind.TRANSCRIPTS:
        records, fields = transcript_records(log), TRANSCRIPT_FIELDS
    elif what is ExportKind.FEEDBACK:
        records, fields = feedback_records(log), FEEDBACK_FIELDS
    else:
        if score_fn is None:
            raise ValueError("sentiment export requires a score_fn")
        records, fields = sentiment_records(log, score_fn), SENTIMENT_FIELDS

    if fmt is ExportFormat.RECORD_LINES:
        return "".join(canonical_record_line(r) + "\n" for r in records).encode("utf-8")

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({k: ("" if record[k] is None else record[k]) for k in fields})
    return buffer.getvalue().encode("utf-8")


def import_records(data: bytes) -> list[dict]:
    """Parse RecordLines bytes back into records (round-trip counterpart)."""
    records = []
    for line in data.decode("utf-8").splitlines():
        if line.strip():
            records.append(json.loads(line))
    return records


def export_file_name(what: ExportKind, fmt: ExportFormat, now: datetime | None = None) -> str:
    stamp = (now or datetime.now(timezone.utc)).strftime("%Y%m%dT%H%M%SZ")
    return f"{what.value}-{stamp}.{fmt.value}"
