"""Feedback aggregation and reporting.

Turns collected feedback surveys and sentiment scores into the platform's
reporting artifacts: Likert distributions with cumulative shares, the
preference breakdown, descriptive sentiment statistics (rendered table plus
CSV), ranked word frequencies for cloud rendering, and histogram bin counts.

Everything here is a pure batch function over its inputs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .sentiment import SentimentScores

DEFAULT_STOPWORDS_PATH = Path(__file__).parent / "data" / "stopwords.txt"

MIN_TOKEN_LENGTH = 3
MAX_COMMENT_LENGTH = 5000

# Conventional polarity thresholds on the compound score.
POSITIVE_COMPOUND_THRESHOLD = 0.05
NEGATIVE_COMPOUND_THRESHOLD = -0.05

_WORD_PATTERN = re.compile(r"[a-z]+")

SENTIMENT_CHANNELS = ("compound", "positive", "neutral", "negative")


class AnalyticsError(Exception):
    pass


class EmptyInput(AnalyticsError):
    def __init__(self, what: str = "input"):
        super().__init__(f"{what} is empty; nothing to aggregate")


class BadRange(AnalyticsError):
    def __init__(self, detail: str):
        super().__init__(detail)


class Satisfaction(Enum):
    EXTREMELY_DISSATISFIED = "extremely_dissatisfied"
    SOMEWHAT_DISSATISFIED = "somewhat_dissatisfied"
    NEUTRAL = "neutral"
    SOMEWHAT_SATISFIED = "somewhat_satisfied"
    EXTREMELY_SATISFIED = "extremely_satisfied"


class ReuseLikelihood(Enum):
    NOT_AT_ALL_LIKELY = "not_at_all_likely"
    SLIGHTLY_LIKELY = "slightly_likely"
    MODERATELY_LIKELY = "moderately_likely"
    VERY_LIKELY = "very_likely"
    EXTREMELY_LIKELY = "extremely_likely"


class Comprehension(Enum):
    NOT_AT_ALL_WELL = "not_at_all_well"
    SLIGHTLY_WELL = "slightly_well"
    MODERATELY_WELL = "moderately_well"
    VERY_WELL = "very_well"
    EXTREMELY_WELL = "extremely_well"


class Preference(Enum):
    CHATBOT = "chatbot"
    TRADITIONAL = "traditional"
    NEITHER = "neither"


@dataclass(frozen=True)
class FeedbackSurvey:
    """Post-conversation questionnaire: three 5-level Likert items, a
    preference pick, and an optional open comment."""

    satisfaction: Satisfaction
    reuse_likelihood: ReuseLikelihood
    comprehension: Comprehension
    preference: Preference
    comment: str | None = None

    def __post_init__(self) -> None:
        if self.comment is not None and len(self.comment) > MAX_COMMENT_LENGTH:
            raise ValueError(f"comment exceeds {MAX_COMMENT_LENGTH} characters")

    def as_dict(self) -> dict:
        return {
            "satisfaction": self.satisfaction.value,
            "reuse_likelihood": self.reuse_likelihood.value,
            "comprehension": self.comprehension.value,
            "preference": self.preference.value,
            "comment": self.comment,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> FeedbackSurvey:
        return cls(
            satisfaction=Satisfaction(payload["satisfaction"]),
            reuse_likelihood=ReuseLikelihood(payload["reuse_likelihood"]),
            comprehension=Comprehension(payload["comprehension"]),
            preference=Preference(payload["preference"]),
            comment=payload.get("comment"),
        )


def _percentage(count: int, total: int) -> float:
    return round(100.0 * count / total, 1)


def _likert_distribution(values: list, levels: type[Enum]) -> dict:
    ordered = list(levels)
    counts = {level.value: 0 for level in ordered}
    for value in values:
        counts[value.value] += 1
    n = len(values)
    percentages = {level.value: _percentage(counts[level.value], n) for level in ordered}
    at_least = {}
    for index, level in enumerate(ordered):
        cumulative = sum(counts[l.value] for l in ordered[index:])
        at_least[level.value] = _percentage(cumulative, n)
    return {"counts": counts, "percentages": percentages, "at_least": at_least}


def aggregate_feedback(surveys: Sequence[FeedbackSurvey]) -> dict:
    """Counts, per-level percentages, cumulative at-least shares, preference.

    Percentages are 100*count/n rounded to one decimal; ``at_least[L]`` is the
    share of answers at level L or higher on the scale.
    """
    if not surveys:
        raise EmptyInput("survey list")
    n = len(surveys)
    preference_counts = {p.value: 0 for p in Preference}
    for survey in surveys:
        preference_counts[survey.preference.value] += 1
    return {
        "n": n,
        "questions": {
            "satisfaction": _likert_distribution(
                [s.satisfaction for s in surveys], Satisfaction
            ),
            "reuse_likelihood": _likert_distribution(
                [s.reuse_likelihood for s in surveys], ReuseLikelihood
            ),
            "comprehension": _likert_distribution(
                [s.comprehension for s in surveys], Comprehension
            ),
        },
        "preference": {
            "counts": preference_counts,
            "percentages": {
                key: _percentage(count, n) for key, count in preference_counts.items()
            },
        },
    }


@dataclass(frozen=True)
class ChannelStats:
    mean: float
    sd: float
    min: float
    max: float

    def __post_init__(self) -> None:
        # float-summation slack: the mean of n identical values can land one
        # ulp outside [min, max]
        slack = 1e-9 * max(1.0, abs(self.mean))
        if not (self.min - slack <= self.mean <= self.max + slack):
            raise ValueError("mean must lie between min and max")
        if self.sd < 0:
            raise ValueError("sd must be nonnegative")


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    channels: dict[str, ChannelStats]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "channels": {
                name: {"mean": c.mean, "sd": c.sd, "min": c.min, "max": c.max}
                for name, c in self.channels.items()
            },
        }


def _channel_stats(values: list[float], sample_sd: bool) -> ChannelStats:
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        sd = 0.0
    else:
        divisor = (n - 1) if sample_sd else n
        sd = math.sqrt(sum((v - mean) ** 2 for v in values) / divisor)
    return ChannelStats(mean=mean, sd=sd, min=min(values), max=max(values))


def descriptive_stats(
    scores: Sequence[SentimentScores], *, sample_sd: bool = True
) -> DescriptiveStats:
    """Mean/SD/min/max per sentiment channel at full precision.

    SD is the sample standard deviation by default (population on request);
    a singleton input gets SD 0 on every channel.
    """
    if not scores:
        raise EmptyInput("score list")
    by_channel = {
        "compound": [s.compound for s in scores],
        "positive": [s.positive for s in scores],
        "neutral": [s.neutral for s in scores],
        "negative": [s.negative for s in scores],
    }
    return DescriptiveStats(
        n=len(scores),
        channels={name: _channel_stats(vals, sample_sd) for name, vals in by_channel.items()},
    )


def render_stats_table(stats: DescriptiveStats, decimals: int = 2) -> str:
    """Fixed-layout text table of the per-channel statistics.

    Channels across, Mean/SD/Min/Max down, followed by the report count and
    the average compound score.
    """
    channels = [name.capitalize() for name in SENTIMENT_CHANNELS]
    header = f"{'':<6}" + "".join(f"{name:>10}" for name in channels)
    lines = [header]
    for row_label, attr in (("Mean", "mean"), ("SD", "sd"), ("Min", "min"), ("Max", "max")):
        cells = "".join(
            f"{getattr(stats.channels[name], attr):>10.{decimals}f}"
            for name in SENTIMENT_CHANNELS
        )
        lines.append(f"{row_label:<6}" + cells)
    lines.append(f"Number of reports: {stats.n}")
    compound_mean = stats.channels["compound"].mean
    lines.append(f"Average Compound Score: {compound_mean:.{decimals}f}")
    return "\n".join(lines)


def stats_csv(stats: DescriptiveStats, decimals: int = 2) -> str:
    """CSV rendering with header Channel,Mean,SD,Min,Max."""
    lines = ["Channel,Mean,SD,Min,Max"]
    for name in SENTIMENT_CHANNELS:
        c = stats.channels[name]
        lines.append(
            f"{name.capitalize()},{c.mean:.{decimals}f},{c.sd:.{decimals}f},"
            f"{c.min:.{decimals}f},{c.max:.{decimals}f}"
        )
    return "\n".join(lines) + "\n"


def load_stopwords(path: str | Path = DEFAULT_STOPWORDS_PATH) -> frozenset[str]:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


@dataclass(frozen=True)
class WordFrequencyReport:
    """Ranked (token, count) pairs plus which texts fed each polarity side."""

    entries: tuple[tuple[str, int], ...]
    positive_texts: tuple[str, ...] = ()
    negative_texts: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"entries": [[token, count] for token, count in self.entries]}


def word_frequencies(
    texts: Iterable[str], stopwords: frozenset[str]
) -> WordFrequencyReport:
    """Lowercase letter-run tokens, stopword-free, length >= 3, ranked.

    No stemming: "help" and "helped" count separately. Ties in count break
    lexicographically so output order is total.
    """
    counts: dict[str, int] = {}
    for text in texts:
        for token in _WORD_PATTERN.findall(text.lower()):
            if len(token) >= MIN_TOKEN_LENGTH and token not in stopwords:
                counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return WordFrequencyReport(entries=tuple(ranked))


def partition_by_polarity(
    comments: Iterable[str], score_fn: Callable[[str], SentimentScores]
) -> tuple[list[str], list[str]]:
    """Split comments into positive/negative sets by compound thresholds.

    Comments inside the neutral band are excluded from both sides.
    """
    positive, negative = [], []
    for comment in comments:
        compound = score_fn(comment).compound
        if compound > POSITIVE_COMPOUND_THRESHOLD:
            positive.append(comment)
        elif compound < NEGATIVE_COMPOUND_THRESHOLD:
            negative.append(comment)
    return positive, negative


def polarity_word_report(
    comments: Iterable[str],
    score_fn: Callable[[str], SentimentScores],
    stopwords: frozenset[str],
) -> dict[str, WordFrequencyReport]:
    positive, negative = partition_by_polarity(comments, score_fn)
    return {
        "positive": WordFrequencyReport(
            entries=word_frequencies(positive, stopwords).entries,
            positive_texts=tuple(positive),
        ),
        "negative": WordFrequencyReport(
            entries=word_frequencies(negative, stopwords).entries,
            negative_texts=tuple(negative),
        ),
    }


def sentiment_histogram(
    values: Sequence[float], bin_width: float, value_range: tuple[float, float]
) -> list[int]:
    """Half-open bins over [lo, hi), the last bin closed at hi.

    Out-of-range values are ignored; in-range counts are conserved. Bin
    boundaries tolerate float representation error (a value meant to sit on a
    boundary lands in the upper bin).
    """
    lo, hi = value_range
    if bin_width <= 0:
        raise BadRange(f"bin_width must be positive, got {bin_width}")
    if not lo < hi:
        raise BadRange(f"range must satisfy lo < hi, got [{lo}, {hi}]")
    bin_count = math.ceil((hi - lo) / bin_width - 1e-9)
    bins = [0] * bin_count
    for value in values:
        if value < lo or value > hi:
            continue
        index = math.floor((value - lo) / bin_width + 1e-9)
        bins[min(index, bin_count - 1)] += 1
    return bins


DEFAULT_HISTOGRAM_SPECS: dict[str, tuple[float, tuple[float, float]]] = {
    "compound": (0.1, (-1.0, 1.0)),
    "positive": (0.05, (0.0, 1.0)),
    "neutral": (0.05, (0.0, 1.0)),
    "negative": (0.05, (0.0, 1.0)),
}


def build_report(
    surveys: Sequence[FeedbackSurvey],
    score_fn: Callable[[str], SentimentScores],
    stopwords: frozenset[str],
    *,
    histogram_specs: dict[str, tuple[float, tuple[float, float]]] | None = None,
) -> dict:
    """Assemble the full structured report document.

    Field names are fixed: distributions, stats, word_frequencies, histograms.
    With zero surveys the distribution/stats sections are null.
    """
    specs = histogram_specs or DEFAULT_HISTOGRAM_SPECS
    comments = [s.comment for s in surveys if s.comment]
    scores = [score_fn(c) for c in comments]

    report: dict = {
        "n": len(surveys),
        "distributions": aggregate_feedback(surveys) if surveys else None,
        "stats": None,
        "word_frequencies": {"positive": [], "negative": []},
        "histograms": None,
    }
    if scores:
        stats = descriptive_stats(scores)
        report["stats"] = stats.as_dict()
        report["stats_table"] = render_stats_table(stats)
        channel_values = {
            "compound": [s.compound for s in scores],
            "positive": [s.positive for s in scores],
            "neutral": [s.neutral for s in scores],
            "negative": [s.negative for s in scores],
        }
        report["histograms"] = {
            name: {
                "bin_width": specs[name][0],
                "range": list(specs[name][1]),
                "counts": sentiment_histogram(values, specs[name][0], specs[name][1]),
            }
            for name, values in channel_values.items()
        }
    clouds = polarity_word_report(comments, score_fn, stopwords)
    report["word_frequencies"] = {
        side: clouds[side].as_dict()["entries"] for side in ("positive", "negative")
    }
    return report
