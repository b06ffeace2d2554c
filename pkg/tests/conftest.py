from __future__ import annotations

import pytest

from pulsechat import analytics, prompts, sentiment, survey


@pytest.fixture(scope="session")
def lexicon() -> sentiment.SentimentLexicon:
    return sentiment.load_default_lexicon()


@pytest.fixture(scope="session")
def stopwords() -> frozenset[str]:
    return analytics.load_stopwords()


@pytest.fixture(scope="session")
def registry() -> list[survey.SurveyTemplate]:
    return survey.load_registry()


@pytest.fixture(scope="session")
def pack() -> prompts.PromptPack:
    return prompts.load_prompt_pack()


@pytest.fixture(scope="session")
def student_template(registry) -> survey.SurveyTemplate:
    return next(t for t in registry if t.id == "student-undergrad")


@pytest.fixture
def undergrad_profile() -> survey.UserProfile:
    return survey.validate_role_details(
        survey.Role.STUDENT,
        {"degree_level": "undergraduate", "international": "true"},
    )
