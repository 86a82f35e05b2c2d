"""Rankings over a fixed item set, with tie groups and average ranks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Ranking:
    """Items 0..n-1 ordered best first; tied items share a group.

    ``average_ranks`` assigns each item the mean of the 1-based positions
    its group spans, the standard treatment for rank correlations.
    """

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        items = [i for g in self.groups for i in g]
        if sorted(items) != list(range(len(items))):
            raise ValueError("ranking groups must partition 0..n-1")
        if not items:
            raise ValueError("empty ranking")

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(i for g in self.groups for i in g)

    @property
    def n_items(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def has_ties(self) -> bool:
        return any(len(g) > 1 for g in self.groups)

    def average_ranks(self) -> np.ndarray:
        ranks = np.empty(self.n_items, dtype=float)
        pos = 1
        for g in self.groups:
            mean_rank = pos + (len(g) - 1) / 2.0
            for item in g:
                ranks[item] = mean_rank
            pos += len(g)
        return ranks

    @staticmethod
    def from_order(order: Sequence[int]) -> "Ranking":
        return Ranking(tuple((int(i),) for i in order))

    @staticmethod
    def from_scores(scores: Sequence[float]) -> "Ranking":
        """Rank by descending score; exact score ties group, input order kept."""
        idx = sorted(range(len(scores)), key=lambda i: -scores[i])
        groups: list[list[int]] = []
        for i in idx:
            if groups and scores[groups[-1][-1]] == scores[i]:
                groups[-1].append(i)
            else:
                groups.append([i])
        return Ranking(tuple(tuple(g) for g in groups))
