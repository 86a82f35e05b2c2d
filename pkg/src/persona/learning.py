"""Grid search for per-participant (or pooled) weighting parameters.

The objective for a candidate parameter pair is the sum, over the
training rounds, of the Spearman correlation between the participant's
stated candidate ranking and the ranking replayed under those
parameters.  Ties between grid maximizers break deterministically
toward the smallest distortion, then the smallest crossover; the full
maximizer set is kept for analysis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .arguments import DialogueTrace
from .beliefs import WeightingParams
from .ranking import Ranking
from .replay import ranking_at_round, trace_masks
from .stats import ranking_correlation

logger = logging.getLogger(__name__)


class MissingRoundError(ValueError):
    pass


class NoRankingsError(ValueError):
    pass


@dataclass(frozen=True)
class ParamGrid:
    """Search grid: crossover in tenths, integer distortion exponents."""

    s_values: tuple[float, ...] = tuple(i / 10 for i in range(1, 10))
    r_values: tuple[float, ...] = tuple(float(i) for i in range(1, 9))

    def __post_init__(self):
        if len(self.s_values) * len(self.r_values) != 72:
            logger.info(
                "non-default parameter grid: %d s-values x %d r-values",
                len(self.s_values),
                len(self.r_values),
            )

    def pairs(self) -> tuple[WeightingParams, ...]:
        """All pairs, ordered so the first maximum wins the tie-break."""
        return tuple(
            WeightingParams(s, r) for r in self.r_values for s in self.s_values
        )


DEFAULT_GRID = ParamGrid()


@dataclass(frozen=True)
class LearnedParams:
    participant_id: str
    k: int
    params: WeightingParams
    objective: float
    maximizers: tuple[WeightingParams, ...]
    skipped_rounds: int = 0

    def to_dict(self) -> dict:
        return {
            "participant": self.participant_id,
            "k": self.k,
            "s": self.params.s,
            "r": self.params.r,
            "objective": self.objective,
            "maximizers": [{"s": p.s, "r": p.r} for p in self.maximizers],
            "skipped_rounds": self.skipped_rounds,
        }


def observed_ranking(trace: DialogueTrace, k: int) -> Optional[Ranking]:
    """The participant's stated ranking at round ``k`` as item indices."""
    stated = trace.ranking_for_round(k)
    if stated is None:
        return None
    ids = trace.candidate_ids()
    return Ranking.from_order([ids.index(c) for c in stated.order])


def computed_ranking(
    trace: DialogueTrace, upto_round: int, params: WeightingParams
) -> Ranking:
    """Replay rounds 1..k under ``params`` and rank the candidate models."""
    if upto_round > trace.completed_rounds:
        raise MissingRoundError(
            f"round {upto_round} not completed (trace has {trace.completed_rounds})"
        )
    if upto_round == 0:
        return Ranking((tuple(range(len(trace.candidate_models))),))
    return ranking_at_round(trace, upto_round, "persona", params)


def round_correlation(
    trace: DialogueTrace,
    k: int,
    params: WeightingParams,
    masks=None,
) -> Optional[float]:
    """rho between stated and replayed rankings at round ``k``; None if undefined."""
    stated = observed_ranking(trace, k)
    if stated is None:
        return None
    replayed = ranking_at_round(trace, k, "persona", params, masks=masks)
    return ranking_correlation(stated, replayed)


def _grid_search(
    traces: Sequence[DialogueTrace],
    k: int,
    grid: ParamGrid,
    participant_id: str,
) -> LearnedParams:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scored_rounds = [
        (trace, t)
        for trace in traces
        for t in range(1, k + 1)
        if t <= trace.completed_rounds and trace.ranking_for_round(t) is not None
    ]
    if not scored_rounds:
        raise NoRankingsError(
            f"{participant_id!r}: no stated rankings in rounds 1..{k}"
        )
    # rounds without a stated ranking (or never played) are skipped, not errors
    structurally_missing = k * len(traces) - len(scored_rounds)

    mask_cache = {id(trace): trace_masks(trace) for trace in traces}
    best: float | None = None
    best_skipped = 0
    maximizers: list[WeightingParams] = []
    for params in grid.pairs():
        objective = 0.0
        skipped = 0
        for trace, t in scored_rounds:
            rho = round_correlation(trace, t, params, masks=mask_cache[id(trace)])
            if rho is None:
                skipped += 1
            else:
                objective += rho
        if best is None or objective > best:
            best = objective
            best_skipped = skipped
            maximizers = [params]
        elif objective == best:
            maximizers.append(params)

    return LearnedParams(
        participant_id=participant_id,
        k=k,
        params=maximizers[0],
        objective=best,
        maximizers=tuple(maximizers),
        skipped_rounds=structurally_missing + best_skipped,
    )


def learn_params(
    traces: DialogueTrace | Sequence[DialogueTrace],
    k: int,
    grid: ParamGrid = DEFAULT_GRID,
) -> LearnedParams:
    """Learn one participant's parameters from their first ``k`` rounds."""
    if isinstance(traces, DialogueTrace):
        traces = [traces]
    if not traces:
        raise NoRankingsError("no traces given")
    participants = {t.participant_id for t in traces}
    if len(participants) > 1:
        raise ValueError(f"traces belong to multiple participants: {sorted(participants)}")
    return _grid_search(traces, k, grid, traces[0].participant_id)


def learn_params_pooled(
    traces: Sequence[DialogueTrace],
    k: int,
    grid: ParamGrid = DEFAULT_GRID,
) -> LearnedParams:
    """Learn one shared parameter pair over every participant's rounds."""
    if not traces:
        raise NoRankingsError("empty dataset")
    return _grid_search(traces, k, grid, "pooled")


def evaluate_round(
    trace: DialogueTrace, learned: LearnedParams, k_prime: int
) -> Optional[float]:
    """Correlation at a held-out round using the learned parameters."""
    if k_prime <= learned.k:
        raise ValueError(f"evaluation round {k_prime} must exceed the training rounds {learned.k}")
    if k_prime > trace.completed_rounds:
        raise MissingRoundError(f"trace has no round {k_prime}")
    if trace.ranking_for_round(k_prime) is None:
        raise MissingRoundError(f"no stated ranking for round {k_prime}")
    return round_correlation(trace, k_prime, learned.params)
