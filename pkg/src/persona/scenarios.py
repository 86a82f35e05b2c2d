"""Dialogue scenarios: argument pools, candidate perspectives, agent policy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .arguments import (
    STUDY_CONFIDENCE_SCALE,
    Argument,
    AttackGraph,
    CandidateModel,
    build_attack_graph,
    premise_conjunction,
    validate_argument,
)
from .beliefs import BeliefState, probability_of_formula
from .logic import Language, format_formula, parse_formula

AGENT_ELIGIBLE = ("agent", "both")
HUMAN_ELIGIBLE = ("human", "both")

N_CANDIDATE_MODELS = 4
MAX_ROUNDS_LIMIT = 5


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class PoolEntry:
    argument: Argument
    eligible: str = "both"  # agent | human | both
    display: str = ""

    def display_text(self) -> str:
        if self.display:
            return self.display
        premises = ", ".join(format_formula(p) for p in self.argument.premises)
        return f"{premises}; therefore {format_formula(self.argument.claim)}"


@dataclass(frozen=True)
class Scenario:
    id: str
    language: Language
    pool: tuple[PoolEntry, ...]
    graph: AttackGraph
    candidate_models: tuple[CandidateModel, ...]
    opening_argument_id: str
    max_rounds: int = 5
    counter_choices_per_turn: int = 3
    confidence_scale: tuple[float, ...] | None = STUDY_CONFIDENCE_SCALE
    candidate_labels: Mapping[str, str] = field(default_factory=dict)

    def entry(self, arg_id: str) -> PoolEntry:
        for e in self.pool:
            if e.argument.id == arg_id:
                return e
        raise KeyError(arg_id)

    def argument(self, arg_id: str) -> Argument:
        return self.entry(arg_id).argument


def build_scenario(
    scenario_id: str,
    language: Language,
    pool: Sequence[PoolEntry],
    candidate_models: Sequence[CandidateModel],
    opening_argument_id: str,
    max_rounds: int = 5,
    counter_choices_per_turn: int = 3,
    confidence_scale: tuple[float, ...] | None = STUDY_CONFIDENCE_SCALE,
    candidate_labels: Mapping[str, str] | None = None,
) -> Scenario:
    graph = build_attack_graph([e.argument for e in pool], language)
    ids = [e.argument.id for e in pool]
    if opening_argument_id not in ids:
        raise ScenarioError(f"opening argument {opening_argument_id!r} not in the pool")
    for e in pool:
        if e.eligible not in ("agent", "human", "both"):
            raise ScenarioError(f"bad eligibility {e.eligible!r} for {e.argument.id!r}")
    opening = next(e for e in pool if e.argument.id == opening_argument_id)
    if opening.eligible not in AGENT_ELIGIBLE:
        raise ScenarioError("the opening argument must be agent-eligible")
    for e in pool:
        if e.argument.id == opening_argument_id:
            continue
        if not graph.neighbors(e.argument.id):
            raise ScenarioError(
                f"argument {e.argument.id!r} attacks nothing in the pool"
            )
    if len(candidate_models) != N_CANDIDATE_MODELS:
        raise ScenarioError(
            f"scenarios rank exactly {N_CANDIDATE_MODELS} candidate models, "
            f"got {len(candidate_models)}"
        )
    cand_ids = [c.id for c in candidate_models]
    if len(set(cand_ids)) != len(cand_ids):
        raise ScenarioError("duplicate candidate-model ids")
    if not 1 <= max_rounds <= MAX_ROUNDS_LIMIT:
        raise ScenarioError(f"max_rounds must be in [1, {MAX_ROUNDS_LIMIT}]")
    if counter_choices_per_turn < 1:
        raise ScenarioError("counter_choices_per_turn must be >= 1")
    if confidence_scale is not None:
        for v in confidence_scale:
            if not 0.0 < v < 1.0:
                raise ScenarioError(f"confidence level {v} outside (0, 1)")
    return Scenario(
        id=scenario_id,
        language=language,
        pool=tuple(pool),
        graph=graph,
        candidate_models=tuple(candidate_models),
        opening_argument_id=opening_argument_id,
        max_rounds=max_rounds,
        counter_choices_per_turn=counter_choices_per_turn,
        confidence_scale=confidence_scale,
        candidate_labels=dict(candidate_labels or {}),
    )


def scenario_from_dict(doc: Mapping) -> Scenario:
    lang = Language(tuple(doc["atoms"]))
    pool = []
    for entry in doc["argument_pool"]:
        arg = validate_argument(
            entry["id"],
            [parse_formula(p, lang) for p in entry["premises"]],
            parse_formula(entry["claim"], lang),
            lang,
        )
        pool.append(
            PoolEntry(arg, entry.get("eligible", "both"), entry.get("display", ""))
        )
    candidates = [
        CandidateModel(entry["id"], parse_formula(entry["formula"], lang))
        for entry in doc["candidate_models"]
    ]
    labels = {
        entry["id"]: entry["label"]
        for entry in doc["candidate_models"]
        if "label" in entry
    }
    if "confidence_scale" in doc:
        raw = doc["confidence_scale"]
        scale = None if raw is None else tuple(float(v) for v in raw)
    else:
        scale = STUDY_CONFIDENCE_SCALE
    return build_scenario(
        scenario_id=doc["id"],
        language=lang,
        pool=pool,
        candidate_models=candidates,
        opening_argument_id=doc["opening_argument_id"],
        max_rounds=doc.get("max_rounds", 5),
        counter_choices_per_turn=doc.get("counter_choices_per_turn", 3),
        confidence_scale=scale,
        candidate_labels=labels,
    )


def load_scenario(path: str | Path) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def load_scenario_dir(path: str | Path) -> dict[str, Scenario]:
    scenarios = {}
    for f in sorted(Path(path).glob("*.json")):
        scenario = load_scenario(f)
        if scenario.id in scenarios:
            raise ScenarioError(f"duplicate scenario id {scenario.id!r}")
        scenarios[scenario.id] = scenario
    return scenarios


# --- agent policy -----------------------------------------------------------

@dataclass(frozen=True)
class AgentPolicy:
    """How the agent picks its next argument; the default chases belief.

    ``greedy_believable`` plays the unused attacker of the human's last
    argument whose premises are most probable under the current belief
    (ties by pool order).  ``scripted`` walks a fixed id list.
    """

    kind: str = "greedy_believable"
    script: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("greedy_believable", "scripted"):
            raise ScenarioError(f"unknown policy kind {self.kind!r}")
        if self.kind == "scripted" and not self.script:
            raise ScenarioError("scripted policy needs a script")


def counter_choices(
    scenario: Scenario, used: Sequence[str], target_id: str
) -> tuple[str, ...]:
    """Human-eligible unused attackers of the target, in pool order."""
    out = []
    for e in scenario.pool:
        arg_id = e.argument.id
        if arg_id in used or e.eligible not in HUMAN_ELIGIBLE:
            continue
        if scenario.graph.attack_between(arg_id, target_id):
            out.append(arg_id)
        if len(out) == scenario.counter_choices_per_turn:
            break
    return tuple(out)


def greedy_agent_argument(
    scenario: Scenario,
    used: Sequence[str],
    target_id: str,
    belief: BeliefState,
) -> str | None:
    best_id: str | None = None
    best_score = -1.0
    for e in scenario.pool:
        arg_id = e.argument.id
        if arg_id in used or e.eligible not in AGENT_ELIGIBLE:
            continue
        if not scenario.graph.attack_between(arg_id, target_id):
            continue
        score = probability_of_formula(belief, premise_conjunction(e.argument))
        if score > best_score:
            best_score = score
            best_id = arg_id
    return best_id
