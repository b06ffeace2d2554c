"""Rule-based sentiment scoring compatible with the VADER algorithm.

Implements the published VADER heuristics (Hutto & Gilbert 2014) natively, with
no third-party dependency: lexicon valence lookup, booster/dampener words,
negation flipping within a three-token window, ALL-CAPS emphasis, exclamation
and question-mark amplification, contrastive "but" reweighting, special-case
idiom overrides, and compound normalization x / sqrt(x^2 + alpha).

Differences from the reference implementation, on purpose:

* Channel values are returned at full precision instead of being rounded for
  display, so ``positive + neutral + negative == 1`` holds to float accuracy
  whenever the text has at least one token.
* No emoji-to-description translation pass. Emojis score like ordinary tokens
  when the loaded lexicon contains them and are neutral otherwise.
* "but" reweighting is positional (tokens before the first "but" are scaled by
  0.5, tokens after by 1.5) rather than value-lookup based.

Tokenization is byte-explicit over ASCII whitespace and punctuation classes,
so results do not depend on the process locale.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from pathlib import Path

# Empirically derived rule constants from the published VADER model.
BOOSTER_STEP = 0.293
CAPS_EMPHASIS = 0.733
NEGATION_FACTOR = -0.74
BUT_BEFORE_WEIGHT = 0.5
BUT_AFTER_WEIGHT = 1.5
EXCLAMATION_STEP = 0.292
MAX_EXCLAMATIONS = 4
QUESTION_MARK_STEP = 0.18
QUESTION_MARK_CAP = 0.96
NORMALIZATION_ALPHA = 15.0
NEVER_SO_FACTOR = 1.25

NEGATION_TOKENS = frozenset(
    [
        "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
        "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
        "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
        "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
        "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
        "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
        "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
        "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom",
        "despite",
    ]
)

BOOSTER_TOKENS: dict[str, float] = {
    "absolutely": BOOSTER_STEP, "amazingly": BOOSTER_STEP, "awfully": BOOSTER_STEP,
    "completely": BOOSTER_STEP, "considerable": BOOSTER_STEP,
    "considerably": BOOSTER_STEP, "decidedly": BOOSTER_STEP, "deeply": BOOSTER_STEP,
    "enormous": BOOSTER_STEP, "enormously": BOOSTER_STEP, "entirely": BOOSTER_STEP,
    "especially": BOOSTER_STEP, "exceptional": BOOSTER_STEP,
    "exceptionally": BOOSTER_STEP, "extreme": BOOSTER_STEP, "extremely": BOOSTER_STEP,
    "fabulously": BOOSTER_STEP, "fully": BOOSTER_STEP, "greatly": BOOSTER_STEP,
    "hella": BOOSTER_STEP, "highly": BOOSTER_STEP, "hugely": BOOSTER_STEP,
    "incredible": BOOSTER_STEP, "incredibly": BOOSTER_STEP, "intensely": BOOSTER_STEP,
    "major": BOOSTER_STEP, "majorly": BOOSTER_STEP, "more": BOOSTER_STEP,
    "most": BOOSTER_STEP, "particularly": BOOSTER_STEP, "purely": BOOSTER_STEP,
    "quite": BOOSTER_STEP, "really": BOOSTER_STEP, "remarkably": BOOSTER_STEP,
    "so": BOOSTER_STEP, "substantially": BOOSTER_STEP, "thoroughly": BOOSTER_STEP,
    "total": BOOSTER_STEP, "totally": BOOSTER_STEP, "tremendous": BOOSTER_STEP,
    "tremendously": BOOSTER_STEP, "uber": BOOSTER_STEP, "unbelievably": BOOSTER_STEP,
    "unusually": BOOSTER_STEP, "utter": BOOSTER_STEP, "utterly": BOOSTER_STEP,
    "very": BOOSTER_STEP,
    "almost": -BOOSTER_STEP, "barely": -BOOSTER_STEP, "hardly": -BOOSTER_STEP,
    "just enough": -BOOSTER_STEP, "kind of": -BOOSTER_STEP, "kinda": -BOOSTER_STEP,
    "kindof": -BOOSTER_STEP, "kind-of": -BOOSTER_STEP, "less": -BOOSTER_STEP,
    "little": -BOOSTER_STEP, "marginal": -BOOSTER_STEP, "marginally": -BOOSTER_STEP,
    "occasional": -BOOSTER_STEP, "occasionally": -BOOSTER_STEP,
    "partly": -BOOSTER_STEP, "scarce": -BOOSTER_STEP, "scarcely": -BOOSTER_STEP,
    "slight": -BOOSTER_STEP, "slightly": -BOOSTER_STEP, "somewhat": -BOOSTER_STEP,
    "sort of": -BOOSTER_STEP, "sorta": -BOOSTER_STEP, "sortof": -BOOSTER_STEP,
    "sort-of": -BOOSTER_STEP,
}

# Idiom overrides containing lexicon words; matching an entry replaces the
# current token valence outright.
SPECIAL_PHRASES: dict[str, float] = {
    "the shit": 3.0, "the bomb": 3.0, "bad ass": 1.5, "badass": 1.5,
    "bus stop": 0.0, "yeah right": -2.0, "kiss of death": -1.5,
    "to die for": 3.0, "beating heart": 3.1, "broken heart": -2.9,
}

DEFAULT_LEXICON_PATH = Path(__file__).parent / "data" / "sentiment_lexicon.txt"


@dataclass(frozen=True)
class SentimentScores:
    """Channel scores for one text.

    ``compound`` is the normalized overall polarity in [-1, 1]; the three
    proportion channels lie in [0, 1] and sum to 1 for any non-empty text.
    """

    compound: float
    positive: float
    neutral: float
    negative: float

    def as_dict(self) -> dict[str, float]:
        return {
            "compound": self.compound,
            "positive": self.positive,
            "neutral": self.neutral,
            "negative": self.negative,
        }


@dataclass(frozen=True)
class SentimentLexicon:
    """Token valences plus the modifier word lists used by the rules."""

    valences: dict[str, float]
    boosters: dict[str, float] = field(default_factory=lambda: dict(BOOSTER_TOKENS))
    negations: frozenset[str] = NEGATION_TOKENS

    def __post_init__(self) -> None:
        if not self.valences:
            raise ValueError("lexicon must contain at least one token")
        for token, valence in self.valences.items():
            if not math.isfinite(valence):
                raise ValueError(f"non-finite valence for token {token!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> SentimentLexicon:
        """Load a tab-separated token/valence file.

        Only the first two columns are read, so the original VADER lexicon
        file (token, mean valence, stddev, ratings) drops in unchanged.
        Blank lines and lines starting with ``#`` are skipped.
        """
        valences: dict[str, float] = {}
        raw = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected token<TAB>valence")
            valences[parts[0]] = float(parts[1])
        return cls(valences=valences)


def load_default_lexicon() -> SentimentLexicon:
    return SentimentLexicon.from_file(DEFAULT_LEXICON_PATH)


def _tokenize(text: str) -> list[str]:
    """Whitespace-split, then strip flanking ASCII punctuation per token.

    Tokens that would shrink to two or fewer characters keep their original
    form; that preserves emoticons such as ``:)``.
    """
    tokens = []
    for raw in text.split():
        stripped = raw.strip(string.punctuation)
        tokens.append(raw if len(stripped) <= 2 else stripped)
    return tokens


def _mixed_case(tokens: list[str]) -> bool:
    """True when some but not all tokens are ALL CAPS."""
    upper = sum(1 for tok in tokens if tok.isupper())
    return 0 < len(tokens) - upper < len(tokens)


def _is_negation(token: str, negations: frozenset[str]) -> bool:
    return token in negations or "n't" in token


def _booster_adjustment(
    token: str, valence: float, mixed_case: bool, boosters: dict[str, float]
) -> float:
    """Valence increment contributed by a preceding booster/dampener word."""
    lowered = token.lower()
    if lowered not in boosters:
        return 0.0
    step = boosters[lowered]
    if valence < 0:
        step = -step
    if token.isupper() and mixed_case:
        step += CAPS_EMPHASIS if valence > 0 else -CAPS_EMPHASIS
    return step


def _negation_adjustment(
    valence: float, lowered: list[str], distance: int, i: int, negations: frozenset[str]
) -> float:
    """Apply negation-window rules for the word ``distance + 1`` before i."""
    if distance == 0:
        if _is_negation(lowered[i - 1], negations):
            valence *= NEGATION_FACTOR
    elif distance == 1:
        if lowered[i - 2] == "never" and lowered[i - 1] in ("so", "this"):
            valence *= NEVER_SO_FACTOR
        elif lowered[i - 2] == "without" and lowered[i - 1] == "doubt":
            pass
        elif _is_negation(lowered[i - 2], negations):
            valence *= NEGATION_FACTOR
    elif distance == 2:
        if lowered[i - 3] == "never" and (
            lowered[i - 2] in ("so", "this") or lowered[i - 1] in ("so", "this")
        ):
            valence *= NEVER_SO_FACTOR
        elif lowered[i - 3] == "without" and (
            lowered[i - 2] == "doubt" or lowered[i - 1] == "doubt"
        ):
            pass
        elif _is_negation(lowered[i - 3], negations):
            valence *= NEGATION_FACTOR
    return valence


def _idiom_adjustment(
    valence: float, lowered: list[str], i: int, boosters: dict[str, float]
) -> float:
    """Override the valence when a known idiom surrounds position i.

    Mirrors the reference behavior: only reachable once three predecessors
    exist, checks backward windows first, then forward, then bigram boosters.
    """
    onezero = f"{lowered[i - 1]} {lowered[i]}"
    twoonezero = f"{lowered[i - 2]} {lowered[i - 1]} {lowered[i]}"
    twoone = f"{lowered[i - 2]} {lowered[i - 1]}"
    threetwoone = f"{lowered[i - 3]} {lowered[i - 2]} {lowered[i - 1]}"
    threetwo = f"{lowered[i - 3]} {lowered[i - 2]}"
    for phrase in (onezero, twoonezero, twoone, threetwoone, threetwo):
        if phrase in SPECIAL_PHRASES:
            valence = SPECIAL_PHRASES[phrase]
            break
    if len(lowered) - 1 > i:
        zeroone = f"{lowered[i]} {lowered[i + 1]}"
        if zeroone in SPECIAL_PHRASES:
            valence = SPECIAL_PHRASES[zeroone]
    if len(lowered) - 1 > i + 1:
        zeroonetwo = f"{lowered[i]} {lowered[i + 1]} {lowered[i + 2]}"
        if zeroonetwo in SPECIAL_PHRASES:
            valence = SPECIAL_PHRASES[zeroonetwo]
    for ngram in (threetwoone, threetwo, twoone):
        if ngram in boosters:
            valence += boosters[ngram]
    return valence


def _least_adjustment(
    valence: float, lowered: list[str], i: int, valences: dict[str, float]
) -> float:
    """Treat a preceding bare "least" as negation ("at least" exempt)."""
    if i > 1 and lowered[i - 1] not in valences and lowered[i - 1] == "least":
        if lowered[i - 2] != "at" and lowered[i - 2] != "very":
            valence *= NEGATION_FACTOR
    elif i > 0 and lowered[i - 1] not in valences and lowered[i - 1] == "least":
        valence *= NEGATION_FACTOR
    return valence


def _token_valence(
    tokens: list[str], lowered: list[str], i: int, mixed: bool, lexicon: SentimentLexicon
) -> float:
    valence = lexicon.valences[lowered[i]]

    # "no" negates an adjacent lexicon word instead of scoring on its own.
    if (
        lowered[i] == "no"
        and i != len(tokens) - 1
        and lowered[i + 1] in lexicon.valences
    ):
        valence = 0.0
    if (
        (i > 0 and lowered[i - 1] == "no")
        or (i > 1 and lowered[i - 2] == "no")
        or (i > 2 and lowered[i - 3] == "no" and lowered[i - 1] in ("or", "nor"))
    ):
        valence = lexicon.valences[lowered[i]] * NEGATION_FACTOR

    if tokens[i].isupper() and mixed:
        valence += CAPS_EMPHASIS if valence > 0 else -CAPS_EMPHASIS

    for distance in range(3):
        j = i - (distance + 1)
        if i > distance and lowered[j] not in lexicon.valences:
            step = _booster_adjustment(tokens[j], valence, mixed, lexicon.boosters)
            if step != 0.0 and distance == 1:
                step *= 0.95
            if step != 0.0 and distance == 2:
                step *= 0.9
            valence += step
            valence = _negation_adjustment(valence, lowered, distance, i, lexicon.negations)
            if distance == 2:
                valence = _idiom_adjustment(valence, lowered, i, lexicon.boosters)

    return _least_adjustment(valence, lowered, i, lexicon.valences)


def _token_valences(tokens: list[str], lexicon: SentimentLexicon) -> list[float]:
    lowered = [tok.lower() for tok in tokens]
    mixed = _mixed_case(tokens)
    valences: list[float] = []
    for i, lower_tok in enumerate(lowered):
        # Boosters and "kind of" modify neighbors; they never score themselves.
        if lower_tok in lexicon.boosters:
            valences.append(0.0)
            continue
        if lower_tok == "kind" and i < len(lowered) - 1 and lowered[i + 1] == "of":
            valences.append(0.0)
            continue
        if lower_tok not in lexicon.valences:
            valences.append(0.0)
            continue
        valences.append(_token_valence(tokens, lowered, i, mixed, lexicon))

    if "but" in lowered:
        pivot = lowered.index("but")
        valences = [
            v * (BUT_BEFORE_WEIGHT if k < pivot else BUT_AFTER_WEIGHT if k > pivot else 1.0)
            for k, v in enumerate(valences)
        ]
    return valences


def _punctuation_amplifier(text: str) -> float:
    exclamations = min(text.count("!"), MAX_EXCLAMATIONS)
    amplifier = exclamations * EXCLAMATION_STEP
    question_marks = text.count("?")
    if question_marks > 1:
        if question_marks <= 3:
            amplifier += question_marks * QUESTION_MARK_STEP
        else:
            amplifier += QUESTION_MARK_CAP
    return amplifier


def _normalize(score: float, alpha: float = NORMALIZATION_ALPHA) -> float:
    normalized = score / math.sqrt(score * score + alpha)
    return max(-1.0, min(1.0, normalized))


def score_text(text: str, lexicon: SentimentLexicon) -> SentimentScores:
    """Score one text; empty or token-free input scores all zeros."""
    valences = _token_valences(_tokenize(text), lexicon)
    if not valences:
        return SentimentScores(0.0, 0.0, 0.0, 0.0)

    total_valence = sum(valences)
    amplifier = _punctuation_amplifier(text)
    if total_valence > 0:
        total_valence += amplifier
    elif total_valence < 0:
        total_valence -= amplifier
    compound = _normalize(total_valence)

    # The +1/-1 shifts weigh sentiment-bearing tokens against neutral ones.
    positive_sum = sum(v + 1 for v in valences if v > 0)
    negative_sum = sum(v - 1 for v in valences if v < 0)
    neutral_count = sum(1 for v in valences if v == 0)
    if positive_sum > abs(negative_sum):
        positive_sum += amplifier
    elif positive_sum < abs(negative_sum):
        negative_sum -= amplifier

    total = positive_sum + abs(negative_sum) + neutral_count
    return SentimentScores(
        compound=compound,
        positive=abs(positive_sum / total),
        neutral=abs(neutral_count / total),
        negative=abs(negative_sum / total),
    )


def score_corpus(texts: list[str], lexicon: SentimentLexicon) -> list[SentimentScores]:
    """Elementwise :func:`score_text`, order preserved."""
    return [score_text(text, lexicon) for text in texts]
