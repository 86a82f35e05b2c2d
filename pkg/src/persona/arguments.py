"""Deductive arguments, attack graphs, and dialogue traces.

An argument pairs a consistent, minimal premise set with a claim it
entails.  Two arguments attack each other exactly when their joint
premises are inconsistent, so the attack relation is symmetric.  A
dialogue trace is a strictly alternating agent/human sequence of
pool arguments forming a tree under its attack edges, together with
the human's per-round candidate-model rankings and an optional final
ranking of the presented arguments.

Trace files use the JSON schema id ``persona-trace/v1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .logic import (
    Formula,
    Language,
    conjunction,
    conjunction_table,
    entails,
    format_formula,
    is_consistent,
    parse_formula,
)

TRACE_SCHEMA = "persona-trace/v1"

AGENT = "agent"
HUMAN = "human"

#: Confidence levels offered in the interaction protocol, "very low" .. "very high".
STUDY_CONFIDENCE_SCALE = (0.1, 0.3, 0.5, 0.7, 0.9)

MAX_TRACE_EVENTS = 10


class ArgumentValidationError(ValueError):
    """An argument candidate violated one of the validity conditions."""


class InconsistentPremisesError(ArgumentValidationError):
    pass


class ClaimNotEntailedError(ArgumentValidationError):
    pass


class NonMinimalPremisesError(ArgumentValidationError):
    def __init__(self, removable: Formula):
        super().__init__(
            f"premise {format_formula(removable)!r} is removable: "
            "the remaining premises still entail the claim"
        )
        self.removable = removable


class TraceValidationError(ValueError):
    """A raw trace violated the dialogue-trace invariants."""


@dataclass(frozen=True)
class Argument:
    """Premises plus the claim they entail.  Build via validate_argument."""

    id: str
    premises: tuple[Formula, ...]
    claim: Formula


def premise_conjunction(arg: Argument) -> Formula:
    return conjunction(arg.premises)


def premise_table(arg: Argument, lang: Language) -> np.ndarray:
    """Satisfaction vector of the premise conjunction (the "m entails A" set)."""
    return conjunction_table(arg.premises, lang)


def validate_argument(
    arg_id: str,
    premises: Sequence[Formula],
    claim: Formula,
    lang: Language,
) -> Argument:
    """Check consistency, entailment, and leave-one-out minimality.

    Minimality by single removals is sufficient: entailment is monotone,
    so any entailing proper subset extends to an entailing subset of
    size ``len(premises) - 1``.
    """
    premises = tuple(premises)
    if not is_consistent(premises, lang):
        raise InconsistentPremisesError(f"argument {arg_id!r}: premises are inconsistent")
    if not entails(premises, claim, lang):
        raise ClaimNotEntailedError(f"argument {arg_id!r}: premises do not entail the claim")
    for i in range(len(premises)):
        rest = premises[:i] + premises[i + 1:]
        if entails(rest, claim, lang):
            raise NonMinimalPremisesError(premises[i])
    return Argument(arg_id, premises, claim)


def attacks(a: Argument, b: Argument, lang: Language) -> bool:
    """True iff the joint premises are inconsistent (mutual attack)."""
    return not is_consistent(a.premises + b.premises, lang)


@dataclass(frozen=True)
class AttackGraph:
    """All pairwise attacks over a pool; edges are unordered id pairs."""

    arguments: tuple[Argument, ...]
    edges: frozenset[frozenset[str]]

    def by_id(self, arg_id: str) -> Argument:
        for a in self.arguments:
            if a.id == arg_id:
                return a
        raise KeyError(arg_id)

    def attack_between(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.edges

    def neighbors(self, arg_id: str) -> tuple[str, ...]:
        out = set()
        for edge in self.edges:
            if arg_id in edge:
                out.update(edge - {arg_id})
        return tuple(sorted(out))


def build_attack_graph(pool: Sequence[Argument], lang: Language) -> AttackGraph:
    ids = [a.id for a in pool]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate argument ids: {dupes}")
    edges = set()
    for i, a in enumerate(pool):
        for b in pool[i + 1:]:
            if attacks(a, b, lang):
                edges.add(frozenset((a.id, b.id)))
    return AttackGraph(tuple(pool), frozenset(edges))


# --- dialogue traces -------------------------------------------------------

@dataclass(frozen=True)
class DialogueEvent:
    t: int
    speaker: str  # AGENT or HUMAN
    argument_id: str
    confidence: float | None = None
    attacks: str | None = None  # argument id of the earlier event this one attacks


@dataclass(frozen=True)
class CandidateModel:
    id: str
    formula: Formula


@dataclass(frozen=True)
class ModelRanking:
    round: int
    order: tuple[str, ...]  # candidate-model ids, best first


@dataclass(frozen=True)
class DialogueTrace:
    participant_id: str
    language: Language
    argument_pool: tuple[Argument, ...]
    events: tuple[DialogueEvent, ...]
    candidate_models: tuple[CandidateModel, ...]
    model_rankings: tuple[ModelRanking, ...]
    final_argument_ranking: tuple[str, ...] = ()
    confidence_scale: tuple[float, ...] | None = STUDY_CONFIDENCE_SCALE
    metadata: Mapping = field(default_factory=dict)

    def pool_by_id(self, arg_id: str) -> Argument:
        for a in self.argument_pool:
            if a.id == arg_id:
                return a
        raise KeyError(arg_id)

    @property
    def completed_rounds(self) -> int:
        return len(self.events) // 2

    def events_upto_round(self, k: int) -> tuple[DialogueEvent, ...]:
        return self.events[: 2 * k]

    def ranking_for_round(self, k: int) -> ModelRanking | None:
        for r in self.model_rankings:
            if r.round == k:
                return r
        return None

    def candidate_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.candidate_models)


def _check_events(
    events: Sequence[DialogueEvent],
    graph: AttackGraph,
    scale: tuple[float, ...] | None,
) -> None:
    if not 2 <= len(events) <= MAX_TRACE_EVENTS:
        raise TraceValidationError(
            f"trace must have between 2 and {MAX_TRACE_EVENTS} events, got {len(events)}"
        )
    seen_args: list[str] = []
    last_t = 0
    for i, ev in enumerate(events):
        if ev.speaker not in (AGENT, HUMAN):
            raise TraceValidationError(f"event {i + 1}: unknown speaker {ev.speaker!r}")
        expected = AGENT if i % 2 == 0 else HUMAN
        if ev.speaker != expected:
            raise TraceValidationError(
                f"event {i + 1}: speakers must alternate starting with the agent"
            )
        if ev.t <= last_t:
            raise TraceValidationError(f"event {i + 1}: timesteps must strictly increase")
        last_t = ev.t
        if ev.argument_id in seen_args:
            raise TraceValidationError(
                f"event {i + 1}: argument {ev.argument_id!r} repeats within the trace"
            )
        try:
            graph.by_id(ev.argument_id)
        except KeyError:
            raise TraceValidationError(
                f"event {i + 1}: argument {ev.argument_id!r} is not in the pool"
            ) from None
        if i == 0:
            if ev.attacks is not None:
                raise TraceValidationError("the opening event must not attack anything")
        else:
            if ev.attacks is None:
                raise TraceValidationError(f"event {i + 1}: must attack one earlier event")
            if ev.attacks not in seen_args:
                raise TraceValidationError(
                    f"event {i + 1}: attacks {ev.attacks!r} which is not an earlier event"
                )
            if not graph.attack_between(ev.argument_id, ev.attacks):
                raise TraceValidationError(
                    f"event {i + 1}: {ev.argument_id!r} does not attack {ev.attacks!r}"
                )
        if ev.confidence is not None:
            if not 0.0 < ev.confidence < 1.0:
                raise TraceValidationError(
                    f"event {i + 1}: confidence {ev.confidence} outside (0, 1)"
                )
            if scale is not None and ev.confidence not in scale:
                raise TraceValidationError(
                    f"event {i + 1}: confidence {ev.confidence} not on the scale {scale}"
                )
        seen_args.append(ev.argument_id)


def validate_trace(
    participant_id: str,
    language: Language,
    argument_pool: Sequence[Argument],
    events: Sequence[DialogueEvent],
    candidate_models: Sequence[CandidateModel],
    model_rankings: Sequence[ModelRanking],
    final_argument_ranking: Sequence[str] = (),
    confidence_scale: tuple[float, ...] | None = STUDY_CONFIDENCE_SCALE,
    metadata: Mapping | None = None,
) -> DialogueTrace:
    """Validate all trace invariants and produce an immutable trace."""
    graph = build_attack_graph(tuple(argument_pool), language)
    _check_events(events, graph, confidence_scale)

    cand_ids = [c.id for c in candidate_models]
    if not cand_ids:
        raise TraceValidationError("trace declares no candidate models")
    if len(set(cand_ids)) != len(cand_ids):
        raise TraceValidationError("duplicate candidate-model ids")

    completed = len(events) // 2
    seen_rounds = set()
    for r in model_rankings:
        if r.round in seen_rounds:
            raise TraceValidationError(f"duplicate ranking for round {r.round}")
        seen_rounds.add(r.round)
        if not 1 <= r.round <= completed:
            raise TraceValidationError(
                f"ranking for round {r.round} but only {completed} rounds completed"
            )
        if sorted(r.order) != sorted(cand_ids):
            raise TraceValidationError(
                f"round {r.round}: ranking is not a permutation of the candidate ids"
            )

    presented = {ev.argument_id for ev in events}
    final = tuple(final_argument_ranking)
    if len(set(final)) != len(final):
        raise TraceValidationError("final argument ranking repeats an argument")
    for arg_id in final:
        if arg_id not in presented:
            raise TraceValidationError(
                f"final argument ranking names {arg_id!r} which was never presented"
            )

    return DialogueTrace(
        participant_id=participant_id,
        language=language,
        argument_pool=tuple(argument_pool),
        events=tuple(events),
        candidate_models=tuple(candidate_models),
        model_rankings=tuple(sorted(model_rankings, key=lambda r: r.round)),
        final_argument_ranking=final,
        confidence_scale=confidence_scale,
        metadata=dict(metadata or {}),
    )


# --- JSON round trip -------------------------------------------------------

def trace_to_dict(trace: DialogueTrace) -> dict:
    doc: dict = {
        "schema": TRACE_SCHEMA,
        "participant": trace.participant_id,
        "atoms": list(trace.language.atoms),
        "argument_pool": [
            {
                "id": a.id,
                "premises": [format_formula(p) for p in a.premises],
                "claim": format_formula(a.claim),
            }
            for a in trace.argument_pool
        ],
        "events": [
            {
                "t": ev.t,
                "speaker": ev.speaker,
                "argument": ev.argument_id,
                "confidence": ev.confidence,
                "attacks": ev.attacks,
            }
            for ev in trace.events
        ],
        "candidate_models": [
            {"id": c.id, "formula": format_formula(c.formula)}
            for c in trace.candidate_models
        ],
        "model_rankings": [
            {"round": r.round, "order": list(r.order)} for r in trace.model_rankings
        ],
        "final_argument_ranking": list(trace.final_argument_ranking),
    }
    if trace.confidence_scale != STUDY_CONFIDENCE_SCALE:
        doc["confidence_scale"] = (
            None if trace.confidence_scale is None else list(trace.confidence_scale)
        )
    if trace.metadata:
        doc["metadata"] = dict(trace.metadata)
    return doc


def trace_from_dict(doc: Mapping) -> DialogueTrace:
    if doc.get("schema") != TRACE_SCHEMA:
        raise TraceValidationError(f"unsupported trace schema: {doc.get('schema')!r}")
    lang = Language(tuple(doc["atoms"]))
    pool = [
        validate_argument(
            entry["id"],
            [parse_formula(p, lang) for p in entry["premises"]],
            parse_formula(entry["claim"], lang),
            lang,
        )
        for entry in doc["argument_pool"]
    ]
    events = [
        DialogueEvent(
            t=int(entry["t"]),
            speaker=entry["speaker"],
            argument_id=entry["argument"],
            confidence=entry.get("confidence"),
            attacks=entry.get("attacks"),
        )
        for entry in doc["events"]
    ]
    candidates = [
        CandidateModel(entry["id"], parse_formula(entry["formula"], lang))
        for entry in doc["candidate_models"]
    ]
    rankings = [
        ModelRanking(int(entry["round"]), tuple(entry["order"]))
        for entry in doc.get("model_rankings", [])
    ]
    if "confidence_scale" in doc:
        raw_scale = doc["confidence_scale"]
        scale = None if raw_scale is None else tuple(float(v) for v in raw_scale)
    else:
        scale = STUDY_CONFIDENCE_SCALE
    return validate_trace(
        participant_id=doc["participant"],
        language=lang,
        argument_pool=pool,
        events=events,
        candidate_models=candidates,
        model_rankings=rankings,
        final_argument_ranking=tuple(doc.get("final_argument_ranking", ())),
        confidence_scale=scale,
        metadata=doc.get("metadata"),
    )


def dump_trace(trace: DialogueTrace) -> str:
    """Canonical text form; identical traces serialize to identical bytes."""
    return json.dumps(trace_to_dict(trace), indent=2, sort_keys=True) + "\n"


def save_trace(trace: DialogueTrace, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dump_trace(trace))
    return path


def load_trace(path: str | Path) -> DialogueTrace:
    with open(path) as fh:
        return trace_from_dict(json.load(fh))


def load_dataset(path: str | Path) -> list[DialogueTrace]:
    """Load a dataset: a directory of ``*.json`` traces or a ``.jsonl`` file.

    A ``manifest.json`` sidecar (written by the batch commands) is not a
    trace and is skipped.
    """
    path = Path(path)
    traces: list[DialogueTrace] = []
    if path.is_dir():
        for f in sorted(path.glob("*.json")):
            if f.name == "manifest.json":
                continue
            traces.append(load_trace(f))
    elif path.suffix == ".jsonl":
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    traces.append(trace_from_dict(json.loads(line)))
    else:
        traces.append(load_trace(path))
    if not traces:
        raise TraceValidationError(f"no traces found under {path}")
    return traces
