"""Survey domain model: roles, profiles, topics, and template routing.

A participant picks a role and a few role details through quick-click UI
buttons; those get validated into a :class:`UserProfile`, and the profile is
routed to exactly one :class:`SurveyTemplate` from the loaded registry.
Applicability is declarative data (role match plus optional detail
constraints), which keeps the one-template-per-profile invariant checkable by
enumeration.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable

DEFAULT_REGISTRY_PATH = Path(__file__).parent / "data" / "templates.json"

MAX_NAME_LENGTH = 64
MAX_CONTEXT_NOTES_LENGTH = 500
MAX_WORKING_AREA_LENGTH = 120

# Reserved by the topic-selection API for the random pick.
RANDOM_CHOICE = "random"


class Role(Enum):
    STUDENT = "student"
    FACULTY = "faculty"
    STAFF = "staff"
    ALUMNI = "alumni"


class DegreeLevel(Enum):
    UNDERGRADUATE = "undergraduate"
    MASTERS = "masters"
    DOCTORAL = "doctoral"


class FacultyTrack(Enum):
    TENURE_TRACK = "tenure-track"
    NON_TENURE_TRACK = "non-tenure-track"
    ADJUNCT = "adjunct"


class GraduationDecade(Enum):
    BEFORE_1990 = "before-1990"
    NINETIES = "1990s"
    TWO_THOUSANDS = "2000s"
    TWENTY_TENS = "2010s"
    TWENTY_TWENTIES = "2020s"


class ProfileValidationError(Exception):
    """Base class for quick-click payload validation failures."""


class MissingField(ProfileValidationError):
    def __init__(self, field_name: str):
        self.field_name = field_name
        super().__init__(f"missing required field: {field_name}")


class VariantMismatch(ProfileValidationError):
    def __init__(self, role: Role, field_name: str):
        self.role = role
        self.field_name = field_name
        super().__init__(f"field {field_name!r} does not belong to role {role.value!r}")


class EmptyValue(ProfileValidationError):
    def __init__(self, field_name: str):
        self.field_name = field_name
        super().__init__(f"field {field_name!r} must not be empty")


class InvalidValue(ProfileValidationError):
    def __init__(self, field_name: str, value: str, allowed: Iterable[str] = ()):
        self.field_name = field_name
        self.value = value
        detail = f"invalid value {value!r} for field {field_name!r}"
        allowed = list(allowed)
        if allowed:
            detail += f" (expected one of: {', '.join(allowed)})"
        super().__init__(detail)


class RegistryError(Exception):
    """Template registry configuration problem (not a user error)."""


class NoTemplate(RegistryError):
    def __init__(self, profile: UserProfile):
        super().__init__(f"no template matches profile with role {profile.role.value!r}")


class AmbiguousTemplate(RegistryError):
    def __init__(self, profile: UserProfile, template_ids: list[str]):
        super().__init__(
            f"profile with role {profile.role.value!r} matches several templates: "
            + ", ".join(template_ids)
        )


@dataclass(frozen=True)
class StudentDetails:
    degree_level: DegreeLevel
    international: bool


@dataclass(frozen=True)
class FacultyDetails:
    track_or_rank: FacultyTrack


@dataclass(frozen=True)
class StaffDetails:
    working_area: str


@dataclass(frozen=True)
class AlumniDetails:
    graduation_decade: GraduationDecade | None = None


RoleDetails = StudentDetails | FacultyDetails | StaffDetails | AlumniDetails

_DETAILS_CLASS_FOR_ROLE: dict[Role, type] = {
    Role.STUDENT: StudentDetails,
    Role.FACULTY: FacultyDetails,
    Role.STAFF: StaffDetails,
    Role.ALUMNI: AlumniDetails,
}


@dataclass(frozen=True)
class UserProfile:
    """Validated role selection; the personalization substrate for prompts.

    Immutable after session start except ``preferred_name``, which the name
    capture phase sets exactly once.
    """

    role: Role
    details: RoleDetails
    preferred_name: str | None = None
    context_notes: str | None = None

    def __post_init__(self) -> None:
        expected = _DETAILS_CLASS_FOR_ROLE[self.role]
        if not isinstance(self.details, expected):
            raise VariantMismatch(self.role, type(self.details).__name__)
        if self.preferred_name is not None:
            name = self.preferred_name.strip()
            if not name:
                raise EmptyValue("preferred_name")
            if len(name) > MAX_NAME_LENGTH:
                raise InvalidValue("preferred_name", name)
            object.__setattr__(self, "preferred_name", name)
        if self.context_notes is not None and len(self.context_notes) > MAX_CONTEXT_NOTES_LENGTH:
            raise InvalidValue("context_notes", self.context_notes[:40] + "...")

    def with_preferred_name(self, name: str) -> UserProfile:
        return replace(self, preferred_name=name)

    def details_summary(self) -> str:
        """Short human-readable rendering of the detail variant."""
        d = self.details
        if isinstance(d, StudentDetails):
            origin = "international" if d.international else "domestic"
            return f"{d.degree_level.value} student, {origin}"
        if isinstance(d, FacultyDetails):
            return f"faculty, {d.track_or_rank.value}"
        if isinstance(d, StaffDetails):
            return f"staff, working area: {d.working_area}"
        if d.graduation_decade is None:
            return "alumni"
        return f"alumni, graduated {d.graduation_decade.value}"

    def as_dict(self) -> dict:
        payload: dict = {"role": self.role.value}
        d = self.details
        if isinstance(d, StudentDetails):
            payload["details"] = {
                "degree_level": d.degree_level.value,
                "international": d.international,
            }
        elif isinstance(d, FacultyDetails):
            payload["details"] = {"track_or_rank": d.track_or_rank.value}
        elif isinstance(d, StaffDetails):
            payload["details"] = {"working_area": d.working_area}
        else:
            payload["details"] = {
                "graduation_decade": d.graduation_decade.value if d.graduation_decade else None
            }
        if self.preferred_name is not None:
            payload["preferred_name"] = self.preferred_name
        if self.context_notes is not None:
            payload["context_notes"] = self.context_notes
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> UserProfile:
        role = parse_role(payload.get("role", ""))
        raw = dict(payload.get("details", {}))
        profile = validate_role_details(role, raw)
        name = payload.get("preferred_name")
        if name is not None:
            profile = profile.with_preferred_name(name)
        notes = payload.get("context_notes")
        if notes is not None:
            profile = replace(profile, context_notes=notes)
        return profile


@dataclass(frozen=True)
class Topic:
    id: str
    title: str
    main_question: str
    guidance_example: str
    sensitive: bool = False
    support_resources: str | None = None

    def __post_init__(self) -> None:
        if not self.main_question.strip():
            raise RegistryError(f"topic {self.id!r}: main_question must be nonempty")
        if not self.guidance_example.strip():
            raise RegistryError(f"topic {self.id!r}: guidance_example must be nonempty")


@dataclass(frozen=True)
class Applicability:
    """Declarative template predicate: role match plus detail constraints.

    ``constraints`` maps a detail field name to the set of allowed values
    (enum values as strings, booleans as ``true``/``false``).
    """

    role: Role
    constraints: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def matches(self, profile: UserProfile) -> bool:
        if profile.role is not self.role:
            return False
        detail_values = _detail_field_values(profile.details)
        for field_name, allowed in self.constraints.items():
            if detail_values.get(field_name) not in allowed:
                return False
        return True


@dataclass(frozen=True)
class SurveyTemplate:
    id: str
    applicability: Applicability
    topics: tuple[Topic, ...]

    def __post_init__(self) -> None:
        if len(self.topics) < 3:
            raise RegistryError(f"template {self.id!r}: needs at least 3 topics")
        seen: set[str] = set()
        for topic in self.topics:
            if topic.id in seen:
                raise RegistryError(f"template {self.id!r}: duplicate topic id {topic.id!r}")
            if topic.id == RANDOM_CHOICE:
                raise RegistryError(f"template {self.id!r}: topic id {RANDOM_CHOICE!r} is reserved")
            seen.add(topic.id)

    def topic(self, topic_id: str) -> Topic:
        for topic in self.topics:
            if topic.id == topic_id:
                return topic
        raise KeyError(topic_id)

    def topic_ids(self) -> tuple[str, ...]:
        return tuple(topic.id for topic in self.topics)


def parse_role(raw: str) -> Role:
    try:
        return Role(str(raw).strip().lower())
    except ValueError:
        raise InvalidValue("role", str(raw), [r.value for r in Role]) from None


def _parse_enum(enum_cls, field_name: str, raw: str):
    try:
        return enum_cls(str(raw).strip().lower())
    except ValueError:
        raise InvalidValue(field_name, str(raw), [m.value for m in enum_cls]) from None


def _parse_bool(field_name: str, raw) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("true", "yes", "1"):
        return True
    if text in ("false", "no", "0"):
        return False
    raise InvalidValue(field_name, str(raw), ["true", "false"])


_REQUIRED_FIELDS: dict[Role, tuple[str, ...]] = {
    Role.STUDENT: ("degree_level", "international"),
    Role.FACULTY: ("track_or_rank",),
    Role.STAFF: ("working_area",),
    Role.ALUMNI: (),
}

_OPTIONAL_FIELDS: dict[Role, tuple[str, ...]] = {
    Role.STUDENT: (),
    Role.FACULTY: (),
    Role.STAFF: (),
    Role.ALUMNI: ("graduation_decade",),
}


def validate_role_details(role: Role, raw_details: dict) -> UserProfile:
    """Validate a quick-click detail payload into a profile (no name yet).

    Unknown keys are rejected as variant mismatches; string values are
    trimmed; whitespace-only required values raise :class:`EmptyValue`.
    """
    allowed = set(_REQUIRED_FIELDS[role]) | set(_OPTIONAL_FIELDS[role])
    for key in raw_details:
        if key not in allowed:
            raise VariantMismatch(role, key)
    for key in _REQUIRED_FIELDS[role]:
        if key not in raw_details:
            raise MissingField(key)
        if isinstance(raw_details[key], str) and not raw_details[key].strip():
            raise EmptyValue(key)

    if role is Role.STUDENT:
        details: RoleDetails = StudentDetails(
            degree_level=_parse_enum(DegreeLevel, "degree_level", raw_details["degree_level"]),
            international=_parse_bool("international", raw_details["international"]),
        )
    elif role is Role.FACULTY:
        details = FacultyDetails(
            track_or_rank=_parse_enum(FacultyTrack, "track_or_rank", raw_details["track_or_rank"])
        )
    elif role is Role.STAFF:
        area = str(raw_details["working_area"]).strip()
        if not area:
            raise EmptyValue("working_area")
        if len(area) > MAX_WORKING_AREA_LENGTH:
            raise InvalidValue("working_area", area[:40] + "...")
        details = StaffDetails(working_area=area)
    else:
        decade = raw_details.get("graduation_decade")
        details = AlumniDetails(
            graduation_decade=(
                _parse_enum(GraduationDecade, "graduation_decade", decade)
                if decade not in (None, "")
                else None
            )
        )
    return UserProfile(role=role, details=details)


def resolve_template(profile: UserProfile, registry: list[SurveyTemplate]) -> SurveyTemplate:
    """Route a validated profile to the unique applicable template."""
    matches = [t for t in registry if t.applicability.matches(profile)]
    if not matches:
        raise NoTemplate(profile)
    if len(matches) > 1:
        raise AmbiguousTemplate(profile, [t.id for t in matches])
    return matches[0]


def _detail_field_values(details: RoleDetails) -> dict[str, str]:
    if isinstance(details, StudentDetails):
        return {
            "degree_level": details.degree_level.value,
            "international": "true" if details.international else "false",
        }
    if isinstance(details, FacultyDetails):
        return {"track_or_rank": details.track_or_rank.value}
    if isinstance(details, StaffDetails):
        return {"working_area": details.working_area}
    return {
        "graduation_decade": (
            details.graduation_decade.value if details.graduation_decade else "none"
        )
    }


def enumerate_detail_combinations(
    working_area_samples: Iterable[str] = ("Library", "Facilities", "IT Services"),
) -> list[UserProfile]:
    """Every finite role/detail combination, with sampled staff areas.

    Used by the registry coverage check: each returned profile must resolve
    to exactly one template.
    """
    profiles: list[UserProfile] = []
    for level, international in itertools.product(DegreeLevel, (False, True)):
        profiles.append(
            UserProfile(Role.STUDENT, StudentDetails(level, international))
        )
    for track in FacultyTrack:
        profiles.append(UserProfile(Role.FACULTY, FacultyDetails(track)))
    for area in working_area_samples:
        profiles.append(UserProfile(Role.STAFF, StaffDetails(area)))
    for decade in list(GraduationDecade) + [None]:
        profiles.append(UserProfile(Role.ALUMNI, AlumniDetails(decade)))
    return profiles


def check_registry_coverage(
    registry: list[SurveyTemplate],
    working_area_samples: Iterable[str] = ("Library", "Facilities", "IT Services"),
) -> None:
    """Raise :class:`RegistryError` unless every combination matches once."""
    for profile in enumerate_detail_combinations(working_area_samples):
        resolve_template(profile, registry)
    for template in registry:
        for topic in template.topics:
            if topic.sensitive and not (topic.support_resources or "").strip():
                raise RegistryError(
                    f"template {template.id!r}: sensitive topic {topic.id!r} "
                    "needs support_resources"
                )
            for field_name in ("title", "main_question", "guidance_example"):
                if "*" in getattr(topic, field_name):
                    raise RegistryError(
                        f"template {template.id!r}: topic {topic.id!r}: "
                        f"{field_name} must not contain '*' (bolding is applied "
                        "at render time)"
                    )


def load_registry(path: str | Path = DEFAULT_REGISTRY_PATH) -> list[SurveyTemplate]:
    """Load and structurally validate a registry file.

    Coverage is checked separately via :func:`check_registry_coverage` so
    callers can report configuration errors distinctly from parse errors.
    """
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RegistryError(f"registry {path}: invalid JSON: {exc}") from exc
    if not isinstance(document, dict) or "templates" not in document:
        raise RegistryError(f"registry {path}: expected an object with a 'templates' list")

    templates: list[SurveyTemplate] = []
    seen_ids: set[str] = set()
    for entry in document["templates"]:
        template_id = entry.get("id")
        if not template_id:
            raise RegistryError(f"registry {path}: template without an id")
        if template_id in seen_ids:
            raise RegistryError(f"registry {path}: duplicate template id {template_id!r}")
        seen_ids.add(template_id)
        raw_applicability = entry.get("applicability", {})
        role = parse_role(raw_applicability.get("role", ""))
        constraints = {
            key: tuple(str(v).lower() for v in values)
            for key, values in raw_applicability.get("details", {}).items()
        }
        topics = tuple(
            Topic(
                id=raw["id"],
                title=raw["title"],
                main_question=raw["main_question"],
                guidance_example=raw["guidance_example"],
                sensitive=bool(raw.get("sensitive", False)),
                support_resources=raw.get("support_resources"),
            )
            for raw in entry.get("topics", [])
        )
        templates.append(
            SurveyTemplate(
                id=template_id,
                applicability=Applicability(role=role, constraints=constraints),
                topics=topics,
            )
        )
    return templates
