"""Live dialogue sessions running the interaction protocol.

One round: the agent presents an argument, the human rates confidence
in it, picks one of the offered counterarguments with a confidence,
then ranks the candidate models.  Belief updates apply immediately;
after each ranking the weighting parameters are re-learned from the
rounds so far and the agent selects its next move.  Sessions persist
as ``persona-trace/v1`` files plus an append-only event log.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .arguments import (
    AGENT,
    HUMAN,
    DialogueEvent,
    DialogueTrace,
    ModelRanking,
    dump_trace,
    validate_trace,
)
from .beliefs import (
    BeliefState,
    IDENTITY_PARAMS,
    WeightingParams,
    confidence_to_probability,
    probability_of_formula,
    uniform_belief,
    update_belief,
)
from .learning import DEFAULT_GRID, NoRankingsError, ParamGrid, learn_params
from .scenarios import (
    AgentPolicy,
    Scenario,
    counter_choices,
    greedy_agent_argument,
)

AWAITING_CONFIDENCE = "awaiting_confidence"
AWAITING_COUNTER = "awaiting_counter"
AWAITING_RANKING = "awaiting_ranking"
AGENT_TURN = "agent_turn"  # transient: the agent moves synchronously
ENDED = "ended"


class SessionError(ValueError):
    def __init__(self, code: str, message: str, phase: str = ""):
        super().__init__(message)
        self.code = code
        self.phase = phase


class PhaseError(SessionError):
    def __init__(self, expected: str, actual: str):
        super().__init__(
            "wrong_phase",
            f"operation requires phase {expected!r} but the session is in {actual!r}",
            actual,
        )


class Session:
    """State machine for one dialogue; not thread-safe on its own."""

    def __init__(
        self,
        session_id: str,
        scenario: Scenario,
        policy: AgentPolicy | None = None,
        initial_params: WeightingParams = IDENTITY_PARAMS,
        learn_live: bool = True,
        grid: ParamGrid = DEFAULT_GRID,
        max_rounds: int | None = None,
        participant_id: str | None = None,
    ):
        self.id = session_id
        self.scenario = scenario
        self.policy = policy or AgentPolicy()
        self.participant_id = participant_id or session_id
        self.initial_params = initial_params
        self.live_params = initial_params
        self.learn_live = learn_live
        self.grid = grid
        self.max_rounds = max_rounds if max_rounds is not None else scenario.max_rounds
        if not 1 <= self.max_rounds <= scenario.max_rounds:
            raise SessionError("bad_config", "max_rounds outside the scenario limit")

        self.belief = uniform_belief(scenario.language)
        self.events: list[DialogueEvent] = []
        self.params_history: list[WeightingParams] = []
        self.rankings: list[tuple[int, tuple[str, ...]]] = []
        self.final_argument_ranking: tuple[str, ...] = ()
        self.round = 1
        self.ended_reason: str | None = None
        self.event_log: list[dict] = []
        self._script_pos = 0
        self._pending_argument: str | None = None
        self._pending_attacks: str | None = None
        self.offered_counters: tuple[str, ...] = ()
        self.phase = AGENT_TURN
        self._trace_cache: DialogueTrace | None = None

        self._log("created", scenario=scenario.id, policy=self.policy.kind)
        self._agent_move(opening=True)

    # -- internals ----------------------------------------------------------

    def _log(self, kind: str, **payload) -> None:
        self.event_log.append(
            {
                "seq": len(self.event_log),
                "kind": kind,
                "phase": self.phase,
                "belief": [float(p) for p in self.belief.probs],
                **payload,
            }
        )

    def _used_ids(self) -> list[str]:
        used = [ev.argument_id for ev in self.events]
        if self._pending_argument is not None:
            used.append(self._pending_argument)
        return used

    def _require_phase(self, expected: str) -> None:
        if self.phase != expected:
            raise PhaseError(expected, self.phase)

    def _check_confidence(self, value: float) -> None:
        scale = self.scenario.confidence_scale
        if scale is not None:
            if value not in scale:
                raise SessionError(
                    "confidence_off_scale",
                    f"confidence {value} is not one of {list(scale)}",
                    self.phase,
                )
        elif not 0.0 < value < 1.0:
            raise SessionError(
                "confidence_out_of_range",
                f"confidence {value} outside (0, 1)",
                self.phase,
            )

    def _next_script_argument(self) -> str | None:
        if self._script_pos >= len(self.policy.script):
            return None
        arg_id = self.policy.script[self._script_pos]
        self._script_pos += 1
        try:
            entry = self.scenario.entry(arg_id)
        except KeyError:
            raise SessionError("bad_script", f"scripted argument {arg_id!r} not in the pool")
        if entry.eligible == "human":
            raise SessionError("bad_script", f"scripted argument {arg_id!r} is human-only")
        if arg_id in self._used_ids():
            raise SessionError("bad_script", f"scripted argument {arg_id!r} already used")
        return arg_id

    def _attack_target(self, arg_id: str, opening: bool) -> str | None:
        if opening:
            return None
        for ev in reversed(self.events):
            if self.scenario.graph.attack_between(arg_id, ev.argument_id):
                return ev.argument_id
        raise SessionError(
            "bad_script", f"argument {arg_id!r} attacks no earlier event"
        )

    def _agent_move(self, opening: bool = False) -> None:
        if opening:
            arg_id: str | None = (
                self._next_script_argument()
                if self.policy.kind == "scripted"
                else self.scenario.opening_argument_id
            )
            if arg_id is None:
                raise SessionError("bad_script", "scripted policy has no opening move")
        elif self.policy.kind == "scripted":
            arg_id = self._next_script_argument()
        else:
            target = self.events[-1].argument_id
            arg_id = greedy_agent_argument(
                self.scenario, self._used_ids(), target, self.belief
            )
        if arg_id is None:
            self._end("pool_exhausted")
            return
        self._pending_argument = arg_id
        self._pending_attacks = self._attack_target(arg_id, opening)
        self.phase = AWAITING_CONFIDENCE
        self._log("agent_argument", argument=arg_id)

    def _apply_event(self, speaker: str, arg_id: str, confidence: float, attacked: str | None) -> None:
        p = confidence_to_probability(confidence, self.live_params)
        self.belief = update_belief(self.belief, self.scenario.argument(arg_id), p)
        self.events.append(
            DialogueEvent(
                t=len(self.events) + 1,
                speaker=speaker,
                argument_id=arg_id,
                confidence=confidence,
                attacks=attacked,
            )
        )
        self.params_history.append(self.live_params)

    def _partial_trace_parts(self) -> DialogueTrace:
        # Unvalidated container for live learning over completed rounds.
        return DialogueTrace(
            participant_id=self.participant_id,
            language=self.scenario.language,
            argument_pool=tuple(e.argument for e in self.scenario.pool),
            events=tuple(self.events),
            candidate_models=self.scenario.candidate_models,
            model_rankings=tuple(ModelRanking(r, o) for r, o in self.rankings),
            confidence_scale=self.scenario.confidence_scale,
        )

    def _relearn(self) -> None:
        if not self.learn_live or not self.rankings:
            return
        try:
            learned = learn_params(
                self._partial_trace_parts(), k=len(self.rankings), grid=self.grid
            )
        except NoRankingsError:
            return
        self.live_params = learned.params
        self._log("params_learned", s=learned.params.s, r=learned.params.r)

    def _end(self, reason: str) -> None:
        self.phase = ENDED
        self.ended_reason = reason
        self._pending_argument = None
        self._pending_attacks = None
        self.offered_counters = ()
        self._trace_cache = None
        self._log("ended", reason=reason)

    # -- operations ---------------------------------------------------------

    def submit_confidence(self, value: float) -> None:
        self._require_phase(AWAITING_CONFIDENCE)
        self._check_confidence(value)
        arg_id = self._pending_argument
        assert arg_id is not None
        self._apply_event(AGENT, arg_id, value, self._pending_attacks)
        self._pending_argument = None
        self._pending_attacks = None
        self._log("confidence", argument=arg_id, value=value)
        self.offered_counters = counter_choices(
            self.scenario, self._used_ids(), arg_id
        )
        if not self.offered_counters:
            self._end("pool_exhausted")
            return
        self.phase = AWAITING_COUNTER

    def submit_counter(self, choice_id: str, confidence: float) -> None:
        self._require_phase(AWAITING_COUNTER)
        if choice_id not in self.offered_counters:
            used = {ev.argument_id for ev in self.events}
            if choice_id in used:
                raise SessionError(
                    "argument_repeated",
                    f"argument {choice_id!r} was already presented",
                    self.phase,
                )
            raise SessionError(
                "choice_not_offered",
                f"argument {choice_id!r} is not among the offered counters",
                self.phase,
            )
        self._check_confidence(confidence)
        attacked = self.events[-1].argument_id
        self._apply_event(HUMAN, choice_id, confidence, attacked)
        self.offered_counters = ()
        self._log("counter", argument=choice_id, value=confidence)
        self.phase = AWAITING_RANKING

    def submit_ranking(self, order: Sequence[str]) -> None:
        self._require_phase(AWAITING_RANKING)
        cand_ids = [c.id for c in self.scenario.candidate_models]
        if sorted(order) != sorted(cand_ids):
            raise SessionError(
                "invalid_ranking",
                "ranking must be a permutation of the candidate-model ids",
                self.phase,
            )
        self.rankings.append((self.round, tuple(order)))
        self._log("ranking", order=list(order))
        self._relearn()
        if self.round >= self.max_rounds:
            self._end("max_rounds")
            return
        self.round += 1
        self.phase = AGENT_TURN
        self._agent_move()

    def end(self, reason: str = "ended_by_human") -> DialogueTrace | None:
        if self.phase == ENDED:
            raise SessionError("already_ended", "the session already ended", self.phase)
        self._end(reason)
        return self.trace() if self.has_trace() else None

    def has_trace(self) -> bool:
        """A persistable trace needs at least one rated exchange."""
        return len(self.events) >= 2

    def set_final_argument_ranking(self, order: Sequence[str]) -> None:
        """Attach the post-dialogue ranking of presented arguments."""
        presented = [ev.argument_id for ev in self.events]
        if len(set(order)) != len(order) or any(a not in presented for a in order):
            raise SessionError(
                "invalid_ranking",
                "argument ranking must list distinct presented arguments",
                self.phase,
            )
        self.final_argument_ranking = tuple(order)
        self._trace_cache = None

    # -- views --------------------------------------------------------------

    def candidate_probabilities(self) -> list[dict]:
        out = []
        for c in self.scenario.candidate_models:
            out.append(
                {
                    "id": c.id,
                    "label": self.scenario.candidate_labels.get(c.id, c.id),
                    "probability": probability_of_formula(self.belief, c.formula),
                }
            )
        return out

    def trace(self) -> DialogueTrace:
        if not self.has_trace():
            raise SessionError(
                "trace_unavailable",
                "the session has no completed exchange to serialize",
                self.phase,
            )
        if self._trace_cache is None:
            self._trace_cache = validate_trace(
                participant_id=self.participant_id,
                language=self.scenario.language,
                argument_pool=tuple(e.argument for e in self.scenario.pool),
                events=tuple(self.events),
                candidate_models=self.scenario.candidate_models,
                model_rankings=tuple(ModelRanking(r, o) for r, o in self.rankings),
                final_argument_ranking=self.final_argument_ranking,
                confidence_scale=self.scenario.confidence_scale,
                metadata={
                    "scenario_id": self.scenario.id,
                    "policy": self.policy.kind,
                    "end_reason": self.ended_reason,
                    "initial_params": {"s": self.initial_params.s, "r": self.initial_params.r},
                    "live_params_final": {"s": self.live_params.s, "r": self.live_params.r},
                    "params_history": [
                        {"s": p.s, "r": p.r} for p in self.params_history
                    ],
                    "final_belief": [float(p) for p in self.belief.probs],
                },
            )
        return self._trace_cache

    def persist(self, trace_dir: str | Path) -> Path:
        trace_dir = Path(trace_dir)
        trace_dir.mkdir(parents=True, exist_ok=True)
        path = trace_dir / f"{self.id}.json"
        path.write_text(dump_trace(self.trace()))
        return path

    def persist_log(self, log_dir: str | Path) -> Path:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        path = log_dir / f"{self.id}.log.jsonl"
        with open(path, "w") as fh:
            for entry in self.event_log:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
        return path
