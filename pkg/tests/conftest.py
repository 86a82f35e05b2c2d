"""Shared fixtures: the two-argument walkthrough, scenarios, cohorts."""

from __future__ import annotations

from pathlib import Path

import pytest

from persona.arguments import (
    AGENT,
    HUMAN,
    CandidateModel,
    DialogueEvent,
    ModelRanking,
    validate_argument,
    validate_trace,
)
from persona.beliefs import WeightingParams, probability_to_confidence
from persona.logic import Language, parse_formula
from persona.scenarios import load_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def formulas(lang, *texts):
    return [parse_formula(t, lang) for t in texts]


@pytest.fixture(scope="session")
def abc_lang():
    return Language(("a", "b", "c"))


@pytest.fixture(scope="session")
def walkthrough_args(abc_lang):
    """The two mutually attacking arguments of the eight-world walkthrough."""
    a1 = validate_argument(
        "A1", formulas(abc_lang, "b", "b -> a"), parse_formula("a", abc_lang), abc_lang
    )
    a2 = validate_argument(
        "A2", formulas(abc_lang, "!c", "!c -> !a"), parse_formula("!a", abc_lang), abc_lang
    )
    return a1, a2


@pytest.fixture(scope="session")
def walkthrough_trace(abc_lang, walkthrough_args):
    """One completed round: A1 rated 0.6, countered by A2 rated so that the
    de-weighted probability under (0.5, 1.5) is 0.9."""
    a1, a2 = walkthrough_args
    sigma2 = probability_to_confidence(0.9, WeightingParams(0.5, 1.5))
    return validate_trace(
        participant_id="walkthrough",
        language=abc_lang,
        argument_pool=[a1, a2],
        events=[
            DialogueEvent(1, AGENT, "A1", 0.6, None),
            DialogueEvent(2, HUMAN, "A2", sigma2, "A1"),
        ],
        candidate_models=[
            CandidateModel("m_pro", parse_formula("a", abc_lang)),
            CandidateModel("m_con", parse_formula("!a", abc_lang)),
        ],
        model_rankings=[ModelRanking(1, ("m_con", "m_pro"))],
        confidence_scale=None,
    )


@pytest.fixture(scope="session")
def ab_lang():
    return Language(("a", "b"))


@pytest.fixture(scope="session")
def four_world_args(ab_lang):
    """The four-world pair: a bare claim and its structured counter."""
    a1 = validate_argument(
        "A1", formulas(ab_lang, "a"), parse_formula("a", ab_lang), ab_lang
    )
    a2 = validate_argument(
        "A2", formulas(ab_lang, "b", "b -> !a"), parse_formula("!a", ab_lang), ab_lang
    )
    return a1, a2


@pytest.fixture(scope="session")
def four_world_trace(ab_lang, four_world_args):
    a1, a2 = four_world_args
    return validate_trace(
        participant_id="four-world",
        language=ab_lang,
        argument_pool=[a1, a2],
        events=[
            DialogueEvent(1, AGENT, "A1", 0.5, None),
            DialogueEvent(2, HUMAN, "A2", 0.6, "A1"),
        ],
        candidate_models=[
            CandidateModel("k1", parse_formula("a", ab_lang)),
            CandidateModel("k2", parse_formula("a | b", ab_lang)),
            CandidateModel("k3", parse_formula("!a", ab_lang)),
            CandidateModel("k4", parse_formula("!a & !b", ab_lang)),
        ],
        model_rankings=[ModelRanking(1, ("k2", "k3", "k1", "k4"))],
        final_argument_ranking=("A2", "A1"),
        confidence_scale=None,
    )


@pytest.fixture(scope="session")
def example_scenario():
    return load_scenario(SCENARIO_DIR / "example.json")


@pytest.fixture(scope="session")
def teambuilding_scenario():
    return load_scenario(SCENARIO_DIR / "teambuilding.json")


@pytest.fixture(scope="session")
def small_cohort(teambuilding_scenario):
    from persona.synthetic import generate_cohort

    return generate_cohort(teambuilding_scenario, 8, seed=7)
