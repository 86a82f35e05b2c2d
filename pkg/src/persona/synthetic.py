"""Synthetic dialogue participants for desk-scale experiment runs.

A synthetic human carries its own world distribution and a planted
weighting-parameter pair.  It rates every presented argument by pushing
the premise probability under its own belief through the weighting
curve and snapping to the confidence scale, then updates its belief
with the de-weighted *reported* value.  That makes the participant
exactly consistent with its planted parameters: replaying a noiseless
trace under them reproduces the internal belief trajectory, so grid
learning must include the planted pair among its maximizers.

Rankings are its internal candidate ranking, optionally shuffled by
random adjacent transpositions at a configurable rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arguments import DialogueTrace, STUDY_CONFIDENCE_SCALE, premise_conjunction
from .beliefs import (
    WeightingParams,
    confidence_to_probability,
    probability_of_formula,
    probability_to_confidence,
    rank_candidates,
    uniform_belief,
    update_belief,
)
from .learning import DEFAULT_GRID, ParamGrid
from .scenarios import AgentPolicy, Scenario
from .session import AWAITING_CONFIDENCE, AWAITING_COUNTER, AWAITING_RANKING, ENDED, Session

#: Lazy-shuffle steps per item when perturbing a ranking.
_SHUFFLE_STEPS_PER_ITEM = 4


@dataclass(frozen=True)
class SyntheticHumanConfig:
    true_params: WeightingParams
    noise: float = 0.0
    seed: int = 0
    rounds: int | None = None
    participant_id: str = "synthetic"

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError(f"noise rate {self.noise} outside [0, 1]")


def snap_to_scale(value: float, scale: tuple[float, ...]) -> float:
    """Nearest scale level; exact float ties keep the earlier level."""
    best = scale[0]
    for level in scale[1:]:
        if abs(level - value) < abs(best - value):
            best = level
    return best


def perturb_ranking(order: tuple[str, ...], noise: float, rng: np.random.Generator) -> tuple[str, ...]:
    """Randomly transpose adjacent entries; rate 0 is the identity."""
    items = list(order)
    if noise <= 0.0 or len(items) < 2:
        return tuple(items)
    for _ in range(_SHUFFLE_STEPS_PER_ITEM * len(items)):
        if rng.random() < noise:
            j = int(rng.integers(0, len(items)))
            if j < len(items) - 1:
                items[j], items[j + 1] = items[j + 1], items[j]
    return tuple(items)


class SyntheticHuman:
    """Belief-consistent responder with planted weighting parameters."""

    def __init__(self, scenario: Scenario, cfg: SyntheticHumanConfig):
        self.scenario = scenario
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.belief = uniform_belief(scenario.language)
        self.scale = scenario.confidence_scale or STUDY_CONFIDENCE_SCALE

    def _premise_probability(self, arg_id: str) -> float:
        arg = self.scenario.argument(arg_id)
        return probability_of_formula(self.belief, premise_conjunction(arg))

    def rate(self, arg_id: str) -> float:
        """Confidence in an argument: weight, then snap to the scale."""
        raw = probability_to_confidence(
            self._premise_probability(arg_id), self.cfg.true_params
        )
        sigma = snap_to_scale(raw, self.scale)
        self.belief = update_belief(
            self.belief,
            self.scenario.argument(arg_id),
            confidence_to_probability(sigma, self.cfg.true_params),
        )
        return sigma

    def choose_counter(self, offered: tuple[str, ...]) -> str:
        """The offered counter with the most probable premises."""
        best = offered[0]
        best_score = self._premise_probability(best)
        for arg_id in offered[1:]:
            score = self._premise_probability(arg_id)
            if score > best_score:
                best_score = score
                best = arg_id
        return best

    def rank_models(self) -> tuple[str, ...]:
        ranking = rank_candidates(
            self.belief, [c.formula for c in self.scenario.candidate_models]
        )
        ids = tuple(self.scenario.candidate_models[i].id for i in ranking.order)
        return perturb_ranking(ids, self.cfg.noise, self.rng)

    def rank_arguments(self, presented: tuple[str, ...]) -> tuple[str, ...]:
        scores = [self._premise_probability(a) for a in presented]
        order = sorted(range(len(presented)), key=lambda i: -scores[i])
        ids = tuple(presented[i] for i in order)
        return perturb_ranking(ids, self.cfg.noise, self.rng)


def generate_synthetic_trace(
    cfg: SyntheticHumanConfig,
    scenario: Scenario,
    policy: AgentPolicy | None = None,
    learn_live: bool = True,
    grid: ParamGrid = DEFAULT_GRID,
) -> DialogueTrace:
    """Run one full synthetic session and return its validated trace."""
    human = SyntheticHuman(scenario, cfg)
    session = Session(
        session_id=cfg.participant_id,
        scenario=scenario,
        policy=policy,
        learn_live=learn_live,
        grid=grid,
        max_rounds=cfg.rounds,
    )
    while session.phase != ENDED:
        if session.phase == AWAITING_CONFIDENCE:
            arg_id = session._pending_argument
            assert arg_id is not None
            session.submit_confidence(human.rate(arg_id))
        elif session.phase == AWAITING_COUNTER:
            choice = human.choose_counter(session.offered_counters)
            session.submit_counter(choice, human.rate(choice))
        elif session.phase == AWAITING_RANKING:
            session.submit_ranking(human.rank_models())
        else:  # pragma: no cover - the session never rests in agent_turn
            raise RuntimeError(f"unexpected phase {session.phase}")
    presented = tuple(ev.argument_id for ev in session.events)
    session.set_final_argument_ranking(human.rank_arguments(presented))
    return session.trace()


def generate_cohort(
    scenario: Scenario,
    n_participants: int,
    seed: int,
    noise: float = 0.0,
    true_params: WeightingParams | None = None,
    grid: ParamGrid = DEFAULT_GRID,
    policy: AgentPolicy | None = None,
    learn_live: bool = True,
    rounds: int | None = None,
) -> list[DialogueTrace]:
    """Generate a cohort; planted parameters drawn from the grid unless fixed.

    All randomness (planted parameters, per-participant seeds, ranking
    noise) flows from the single ``seed``.
    """
    root = np.random.default_rng(seed)
    pairs = grid.pairs()
    traces = []
    for i in range(n_participants):
        planted = (
            true_params
            if true_params is not None
            else pairs[int(root.integers(0, len(pairs)))]
        )
        cfg = SyntheticHumanConfig(
            true_params=planted,
            noise=noise,
            seed=int(root.integers(0, 2**63 - 1)),
            rounds=rounds,
            participant_id=f"p{i:03d}",
        )
        trace = generate_synthetic_trace(
            cfg, scenario, policy=policy, learn_live=learn_live, grid=grid
        )
        meta = dict(trace.metadata)
        meta["planted_params"] = {"s": planted.s, "r": planted.r}
        meta["noise"] = noise
        traces.append(
            DialogueTrace(
                participant_id=trace.participant_id,
                language=trace.language,
                argument_pool=trace.argument_pool,
                events=trace.events,
                candidate_models=trace.candidate_models,
                model_rankings=trace.model_rankings,
                final_argument_ranking=trace.final_argument_ranking,
                confidence_scale=trace.confidence_scale,
                metadata=meta,
            )
        )
    return traces
