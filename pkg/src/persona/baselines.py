"""Comparison methods for the belief-update mechanism.

* ``sbu_update``: the block update fed with the raw stated confidence,
  i.e. no weighting curve (the no-weighting ablation).
* ``hm1_update``: a redistribution update that moves each satisfying
  world's counterpart mass onto it and zeroes the rest.  The counterpart
  of a world flips exactly the atoms of the argument's (literal) claim.
* ``hm2_update``: ``hm1_update`` followed by a second redistribution
  along the attack structure, using the conjunction of the negated
  claims of the argument's attack-graph neighbors.
* ``ha_beliefs``: a case-based per-argument belief table driven by
  speaker roles and attack order, with fixed 0.2/0.8 levels.
"""

from __future__ import annotations

import numpy as np

from .arguments import AGENT, HUMAN, Argument, AttackGraph, DialogueTrace, premise_table
from .beliefs import BeliefState, update_belief
from .logic import And, Atom, Formula, Language, Not, World, truth_table


class NonLiteralClaimError(ValueError):
    """Redistribution updates require literal (or literal-conjunction) claims."""


class DegenerateUpdateError(RuntimeError):
    """A redistribution zeroed the whole distribution."""


def sbu_update(b: BeliefState, arg: Argument, sigma: float) -> BeliefState:
    """Block update with the confidence used directly as the probability."""
    return update_belief(b, arg, sigma)


def _literal_map(f: Formula) -> dict[str, bool]:
    """Atom -> polarity for a literal or conjunction of literals."""
    out: dict[str, bool] = {}

    def walk(node: Formula) -> None:
        if isinstance(node, Atom):
            if node.name in out:
                raise NonLiteralClaimError(f"atom {node.name!r} occurs twice")
            out[node.name] = True
        elif isinstance(node, Not) and isinstance(node.operand, Atom):
            if node.operand.name in out:
                raise NonLiteralClaimError(f"atom {node.operand.name!r} occurs twice")
            out[node.operand.name] = False
        elif isinstance(node, And):
            walk(node.left)
            walk(node.right)
        else:
            raise NonLiteralClaimError(
                "claim must be a literal or a conjunction of literals"
            )

    walk(f)
    if not out:
        raise NonLiteralClaimError("claim has no atoms")
    return out


def _flip_bits(f: Formula, lang: Language) -> int:
    return sum(1 << lang.bit(name) for name in _literal_map(f))


def flip_counterpart(w: World, f: Formula) -> World:
    """The world with every atom of ``f`` negated (an involution).

    On a world satisfying ``f`` this falsifies every literal of ``f``.
    """
    return World(w.language, w.index ^ _flip_bits(f, w.language))


def _redistribute(probs: np.ndarray, mask: np.ndarray, flip: int) -> np.ndarray:
    """new[m] = old[m] + old[m ^ flip] on the mask, zero elsewhere."""
    counterpart = np.arange(len(probs)) ^ flip
    new = np.zeros_like(probs)
    new[mask] = probs[mask] + probs[counterpart[mask]]
    return new


def hm1_update(b: BeliefState, arg: Argument) -> BeliefState:
    """Counterpart redistribution onto the argument's satisfying block."""
    mask = premise_table(arg, b.language)
    new = _redistribute(b.probs, mask, _flip_bits(arg.claim, b.language))
    total = float(new.sum())
    if total == 0.0:
        raise DegenerateUpdateError(
            f"update for {arg.id!r} left no probability mass"
        )
    return BeliefState(b.language, new / total, b.timestep + 1, b.warnings)


def _negated_claim(f: Formula) -> Formula:
    return f.operand if isinstance(f, Not) else Not(f)


def hm2_update(b: BeliefState, arg: Argument, g: AttackGraph) -> BeliefState:
    """Counterpart redistribution plus attack-structure redistribution.

    The second pass conditions on the set of negated claims of every
    neighbor of ``arg`` in the attack graph (deduplicated), flipping
    the atoms of those claims to find counterpart worlds.
    """
    g.by_id(arg.id)  # raises KeyError if absent
    mask = premise_table(arg, b.language)
    new = _redistribute(b.probs, mask, _flip_bits(arg.claim, b.language))

    neighbor_claims: list[Formula] = []
    for other_id in g.neighbors(arg.id):
        negated = _negated_claim(g.by_id(other_id).claim)
        if negated not in neighbor_claims:
            neighbor_claims.append(negated)

    if neighbor_claims:
        phi_mask = np.ones(b.language.world_count, dtype=bool)
        flip = 0
        seen_atoms: set[str] = set()
        for claim in neighbor_claims:
            phi_mask &= truth_table(claim, b.language)
            for name, _ in _literal_map(claim).items():
                if name not in seen_atoms:
                    seen_atoms.add(name)
                    flip |= 1 << b.language.bit(name)
        new = _redistribute(new, phi_mask, flip)

    total = float(new.sum())
    if total == 0.0:
        raise DegenerateUpdateError(
            f"structured update for {arg.id!r} left no probability mass"
        )
    return BeliefState(b.language, new / total, b.timestep + 1, b.warnings)


def ha_beliefs(trace: DialogueTrace, g: AttackGraph) -> dict[str, float]:
    """Per-argument beliefs from speaker roles and believed attackers.

    Evaluated newest-first so every referenced later belief exists:

    * agent argument with a believed (> 0.5) opponent reply -> 0.2,
      otherwise 0.8;
    * human argument with a believed later agent attacker -> 0.2,
      otherwise the human's stated confidence in it.
    """
    events = trace.events
    beliefs: dict[str, float] = {}
    for i in range(len(events) - 1, -1, -1):
        ev = events[i]
        if ev.speaker == AGENT:
            opponents = []
            if i + 1 < len(events) and events[i + 1].speaker == HUMAN:
                opponents.append(events[i + 1].argument_id)
            believed = any(beliefs[b] > 0.5 for b in opponents)
            beliefs[ev.argument_id] = 0.2 if believed else 0.8
        else:
            pro = [
                later.argument_id
                for later in events[i + 1:]
                if later.speaker == AGENT
                and g.attack_between(later.argument_id, ev.argument_id)
            ]
            believed = any(beliefs[b] > 0.5 for b in pro)
            if believed:
                beliefs[ev.argument_id] = 0.2
            else:
                if ev.confidence is None:
                    raise ValueError(
                        f"event {ev.t}: human argument {ev.argument_id!r} has no confidence"
                    )
                beliefs[ev.argument_id] = ev.confidence
    return beliefs
