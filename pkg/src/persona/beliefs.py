"""World-distribution belief engine.

The belief state is a dense probability vector over all worlds of a
language.  Presented arguments move probability mass between the block
of worlds satisfying the argument's premises and its complement: the
block is rescaled to carry exactly the argument's probability ``p`` and
the complement ``1 - p``, leaving within-block ratios untouched.

Stated confidences relate to probabilities through a two-branch
weighting curve with a crossover level ``s`` (the confidence reported
at even odds) and a distortion exponent ``r``; ``s = 0.5, r = 1`` is
the identity.  Both directions are exact inverses of each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arguments import Argument, premise_table
from .logic import Formula, Language, truth_table
from .ranking import Ranking

#: Renormalization drift allowed on any belief vector.
NORMALIZATION_TOL = 1e-9


class BeliefError(ValueError):
    pass


@dataclass(frozen=True)
class WeightingParams:
    """Confidence-weighting curve parameters: crossover and distortion."""

    s: float
    r: float

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"crossover s must lie in (0, 1), got {self.s}")
        if self.r < 1.0:
            raise ValueError(f"distortion r must be >= 1, got {self.r}")


IDENTITY_PARAMS = WeightingParams(0.5, 1.0)


def _check_unit(value: float, what: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise BeliefError(f"{what} {value} outside [0, 1]")


def probability_to_confidence(p: float, params: WeightingParams) -> float:
    """Map an argument probability to the stated confidence."""
    _check_unit(p, "probability")
    s, r = params.s, params.r
    if p > 0.5:
        return s + (1.0 - s) * (2.0 * p - 1.0) ** r
    return s - s * (1.0 - 2.0 * p) ** r


def confidence_to_probability(sigma: float, params: WeightingParams) -> float:
    """Invert the weighting curve: stated confidence back to probability."""
    _check_unit(sigma, "confidence")
    s, r = params.s, params.r
    if sigma > s:
        return 0.5 + 0.5 * ((sigma - s) / (1.0 - s)) ** (1.0 / r)
    return 0.5 - 0.5 * ((s - sigma) / s) ** (1.0 / r)


@dataclass(frozen=True, eq=False)
class BeliefState:
    """Probability vector over worlds, indexed by world index."""

    language: Language
    probs: np.ndarray
    timestep: int = 0
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def probability_of(self, f: Formula) -> float:
        return probability_of_formula(self, f)

    def to_payload(self, digits: int = 12) -> dict:
        """JSON form with probabilities at ``digits`` significant digits."""
        return {
            "atoms": list(self.language.atoms),
            "probs": [float(f"{p:.{digits}g}") for p in self.probs],
            "timestep": self.timestep,
        }


def belief_from_probs(lang: Language, probs: Sequence[float], timestep: int = 0) -> BeliefState:
    """Validating constructor for externally supplied vectors."""
    arr = np.asarray(probs, dtype=float)
    if arr.shape != (lang.world_count,):
        raise BeliefError(
            f"belief vector must have length {lang.world_count}, got {arr.shape}"
        )
    if np.any(arr < 0.0):
        raise BeliefError("belief vector has negative entries")
    if abs(float(arr.sum()) - 1.0) > NORMALIZATION_TOL:
        raise BeliefError(f"belief vector sums to {float(arr.sum())}, not 1")
    return BeliefState(lang, arr, timestep)


def uniform_belief(lang: Language) -> BeliefState:
    n = lang.world_count
    return BeliefState(lang, np.full(n, 1.0 / n), timestep=0)


def update_with_mask(b: BeliefState, mask: np.ndarray, p: float) -> BeliefState:
    """Rescale the masked block to mass ``p`` and its complement to ``1 - p``.

    If the targeted block cannot carry its mass (empty or zero prior mass),
    the distribution is left as-is except for renormalization and the
    result carries an ``empty-block`` warning instead of failing, so live
    dialogues survive degenerate inputs.
    """
    _check_unit(p, "argument probability")
    probs = b.probs
    in_mass = float(probs[mask].sum())
    out_mass = float(probs[~mask].sum())

    if (in_mass == 0.0 and p != 0.0) or (out_mass == 0.0 and p != 1.0):
        new = probs / float(probs.sum())
        warnings = b.warnings + ("empty-block",)
    else:
        new = np.zeros_like(probs)
        if p != 0.0:
            new[mask] = probs[mask] / in_mass * p
        if p != 1.0:
            new[~mask] = probs[~mask] / out_mass * (1.0 - p)
        new /= float(new.sum())
        warnings = b.warnings

    return BeliefState(b.language, new, b.timestep + 1, warnings)


def update_belief(b: BeliefState, arg: Argument, p: float) -> BeliefState:
    """Condition the belief on an argument carrying probability ``p``."""
    return update_with_mask(b, premise_table(arg, b.language), p)


def probability_of_formula(b: BeliefState, f: Formula) -> float:
    return float(b.probs[truth_table(f, b.language)].sum())


def rank_candidates(b: BeliefState, candidates: Sequence[Formula]) -> Ranking:
    """Candidates by descending probability; exact ties keep input order."""
    if not candidates:
        raise ValueError("no candidates to rank")
    scores = [probability_of_formula(b, f) for f in candidates]
    return Ranking.from_scores(scores)
