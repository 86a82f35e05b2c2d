"""Replaying dialogue traces through the different update methods."""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from .arguments import DialogueTrace, build_attack_graph, premise_table
from .beliefs import (
    BeliefState,
    WeightingParams,
    confidence_to_probability,
    rank_candidates,
    uniform_belief,
    update_with_mask,
)
from .baselines import hm1_update, hm2_update
from .ranking import Ranking

METHOD_NAMES = ("persona", "generic", "sbu", "hm1", "hm2", "ha")


def trace_masks(trace: DialogueTrace) -> dict[str, np.ndarray]:
    """Premise-satisfaction vectors per pool argument, computed once."""
    return {a.id: premise_table(a, trace.language) for a in trace.argument_pool}


def _require_confidence(trace: DialogueTrace, index: int) -> float:
    ev = trace.events[index]
    if ev.confidence is None:
        raise ValueError(
            f"trace {trace.participant_id!r}: event {ev.t} has no confidence value"
        )
    return ev.confidence


def replay_weighted(
    trace: DialogueTrace,
    params: WeightingParams,
    upto_event: int | None = None,
    masks: dict[str, np.ndarray] | None = None,
) -> BeliefState:
    """De-weight each stated confidence and apply the block update."""
    masks = masks if masks is not None else trace_masks(trace)
    events = trace.events if upto_event is None else trace.events[:upto_event]
    belief = uniform_belief(trace.language)
    for i, ev in enumerate(events):
        sigma = _require_confidence(trace, i)
        p = confidence_to_probability(sigma, params)
        belief = update_with_mask(belief, masks[ev.argument_id], p)
    return belief


def replay_direct(
    trace: DialogueTrace,
    upto_event: int | None = None,
    masks: dict[str, np.ndarray] | None = None,
) -> BeliefState:
    """Apply the block update with raw confidences (no weighting)."""
    masks = masks if masks is not None else trace_masks(trace)
    events = trace.events if upto_event is None else trace.events[:upto_event]
    belief = uniform_belief(trace.language)
    for i, ev in enumerate(events):
        sigma = _require_confidence(trace, i)
        belief = update_with_mask(belief, masks[ev.argument_id], sigma)
    return belief


def replay_redistribution(
    trace: DialogueTrace,
    structured: bool = False,
    upto_event: int | None = None,
) -> BeliefState:
    """Replay through the redistribution baseline (attack-aware if asked)."""
    graph = build_attack_graph(trace.argument_pool, trace.language)
    events = trace.events if upto_event is None else trace.events[:upto_event]
    belief = uniform_belief(trace.language)
    for ev in events:
        arg = trace.pool_by_id(ev.argument_id)
        if structured:
            belief = hm2_update(belief, arg, graph)
        else:
            belief = hm1_update(belief, arg)
    return belief


def replay_recorded(trace: DialogueTrace) -> BeliefState:
    """Replay a live-session trace with the parameters in force per event.

    Sessions re-learn their weighting parameters between rounds and log
    them under ``metadata.params_history``; using that log reproduces the
    session's float operations exactly.
    """
    history = trace.metadata.get("params_history")
    if history is None:
        raise ValueError("trace metadata carries no params_history")
    if len(history) != len(trace.events):
        raise ValueError("params_history length does not match the event count")
    masks = trace_masks(trace)
    belief = uniform_belief(trace.language)
    for i, ev in enumerate(trace.events):
        sigma = _require_confidence(trace, i)
        params = WeightingParams(float(history[i]["s"]), float(history[i]["r"]))
        p = confidence_to_probability(sigma, params)
        belief = update_with_mask(belief, masks[ev.argument_id], p)
    return belief


def replay_states(
    trace: DialogueTrace,
    method: str,
    params: WeightingParams | None = None,
) -> Iterator[tuple[int, BeliefState]]:
    """Yield (event index 1-based, belief after that event) per event."""
    if method in ("persona", "generic"):
        if params is None:
            raise ValueError(f"method {method!r} needs weighting parameters")
        for i in range(1, len(trace.events) + 1):
            yield i, replay_weighted(trace, params, upto_event=i)
    elif method == "sbu":
        for i in range(1, len(trace.events) + 1):
            yield i, replay_direct(trace, upto_event=i)
    elif method in ("hm1", "hm2"):
        for i in range(1, len(trace.events) + 1):
            yield i, replay_redistribution(trace, method == "hm2", upto_event=i)
    else:
        raise ValueError(f"unknown belief-replay method {method!r}")


def ranking_at_round(
    trace: DialogueTrace,
    k: int,
    method: str,
    params: WeightingParams | None = None,
    masks: dict[str, np.ndarray] | None = None,
) -> Ranking:
    """Candidate-model ranking after the events of rounds 1..k."""
    upto = 2 * k
    if method in ("persona", "generic"):
        if params is None:
            raise ValueError(f"method {method!r} needs weighting parameters")
        belief = replay_weighted(trace, params, upto_event=upto, masks=masks)
    elif method == "sbu":
        belief = replay_direct(trace, upto_event=upto, masks=masks)
    elif method in ("hm1", "hm2"):
        belief = replay_redistribution(trace, method == "hm2", upto_event=upto)
    else:
        raise ValueError(f"unknown belief-replay method {method!r}")
    return rank_candidates(belief, [c.formula for c in trace.candidate_models])
