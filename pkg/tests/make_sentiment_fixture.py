"""Regenerate tests/data/sentiment_oracle.json.

Runs the vendored reference analyzer (tests/vader_reference.py) over the
fixed 50-sentence corpus using the shipped lexicon file, and freezes both the
full-precision and display-rounded channel values. The production engine is
deliberately not imported here; the fixture must come from the reference
implementation alone.

Usage: python tests/make_sentiment_fixture.py
"""

from __future__ import annotations

import json
from pathlib import Path

from vader_reference import SentimentIntensityAnalyzer

HERE = Path(__file__).parent
LEXICON_PATH = HERE.parent / "src" / "pulsechat" / "data" / "sentiment_lexicon.txt"
FIXTURE_PATH = HERE / "data" / "sentiment_oracle.json"

# Fifty sentences exercising every scoring rule: plain polarity, negations,
# boosters and dampeners at all window distances, ALL-CAPS emphasis,
# exclamation and question-mark amplification, but-clauses, idiom overrides,
# "least" variants, "never so/this", emoticons, emojis, and realistic
# multi-clause campus feedback.
CORPUS: list[str] = [
    "The chatbot was very helpful!",
    "The advising office was friendly and supportive.",
    "Registration was a complete disaster this semester.",
    "I enjoyed the conversation and felt heard.",
    "Campus dining is terrible and overpriced.",
    "The library staff were kind and patient with me.",
    "My workload feels impossible this term.",
    "Office hours were useful and the examples were clear.",
    "The shuttle schedule is a mess.",
    "Orientation week made me feel welcome.",
    "The tutoring center is not helpful at all.",
    "I never felt supported by my advisor.",
    "The financial aid process wasn't confusing this year.",
    "There is no support for evening students.",
    "I finished the term without trouble.",
    "The mentors were really very helpful during finals.",
    "The dorms are kind of dirty.",
    "The new portal is sort of confusing to navigate.",
    "The gym is barely useful during peak hours.",
    "The career fair was an extremely valuable experience.",
    "The study rooms are AMAZING this year.",
    "I am SO tired of the parking situation.",
    "The professors here are GREAT, honestly.",
    "My roommate situation is BAD.",
    "The new lab equipment is wonderful!",
    "The wifi in the dorms is awful!!",
    "I love the campus gardens!!!!",
    "Why is the bursar office always closed?? Why??",
    "Is anyone reading these surveys??? This is frustrating???",
    "The food was good but the lines were terrible.",
    "The lecture was boring but the readings are excellent.",
    "I liked the seminar but hated the group project.",
    "Advising was slow but the staff stayed friendly.",
    "The new student center is the bomb.",
    "Scheduling classes at 8am is the kiss of death for attendance.",
    "The campus bakery makes pastries to die for.",
    "The intramural league has a bad ass championship trophy.",
    "This is the least helpful syllabus I have seen.",
    "At least the teaching assistants are friendly.",
    "The printers in the lab are not the least useful resource.",
    "The mentorship program has never been this good.",
    "I have never felt so welcome on campus.",
    "Sentiment about the cafeteria has never been good.",
    "The study group went well today :)",
    "Midterms left me drained :(",
    "The club fair was fun 🎉 and I met great people.",
    "Commuting in the snow is miserable 😞 and the lots are full.",
    "Overall the experience helped me feel connected, and the staff genuinely care about students.",
    "The response time was slow, the topic list felt narrow, and I wasted time repeating answers.",
    "I would recommend this survey chat to friends because it felt safe, respectful, and surprisingly fun.",
]


def main() -> None:
    analyzer = SentimentIntensityAnalyzer(LEXICON_PATH)
    rows = []
    for text in CORPUS:
        scores = analyzer.polarity_scores(text)
        rows.append(
            {
                "text": text,
                "compound": scores["compound_raw"],
                "positive": scores["pos_raw"],
                "neutral": scores["neu_raw"],
                "negative": scores["neg_raw"],
                "compound_display": scores["compound"],
                "positive_display": scores["pos"],
                "neutral_display": scores["neu"],
                "negative_display": scores["neg"],
            }
        )
    FIXTURE_PATH.parent.mkdir(parents=True, exist_ok=True)
    FIXTURE_PATH.write_text(
        json.dumps(rows, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(f"froze {len(rows)} oracle rows to {FIXTURE_PATH}")


if __name__ == "__main__":
    main()
