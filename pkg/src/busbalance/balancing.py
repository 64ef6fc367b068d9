"""Stage 2: rebalance tour durations without changing the number of tours.

Each tour loses its last trip; the shortened tours and the removed trips are
then re-paired by a minimum-weight perfect matching whose weight is the
excess over the goal of the tour the pair would form. Keeping every tour
with its own last trip is always feasible, so aggregate excess can only
go down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assignment import CostMatrix, min_weight_perfect_matching
from .model import Instance, Schedule, compatible, excess


@dataclass(frozen=True)
class StrippedView:
    heads: tuple  # tour prefixes, possibly empty
    tails: tuple  # removed last trips
    origin: tuple  # tail index -> source tour index

    def reattach(self, assignment=None) -> Schedule:
        if assignment is None:
            assignment = range(len(self.heads))
        return Schedule(h + (self.tails[int(j)],) for h, j in zip(self.heads, assignment))


def strip(schedule: Schedule) -> StrippedView:
    heads = tuple(t[:-1] for t in schedule.tours)
    tails = tuple(t[-1] for t in schedule.tours)
    return StrippedView(heads, tails, tuple(range(len(tails))))


def balance_cost(head, tail: int, instance: Instance) -> Optional[int]:
    """Excess seconds of ``head + (tail,)``, or ``None`` when incompatible."""
    if len(head) and not compatible(head[-1], tail, instance):
        return None
    return excess(tuple(head) + (tail,), instance)


def weight_matrix(view: StrippedView, instance: Instance):
    """Vectorised :func:`balance_cost` over all heads x tails."""
    k = len(view.heads)
    tails = np.array(view.tails, dtype=np.int64)
    feasible = np.ones((k, k), dtype=bool)
    base = np.zeros(k, dtype=np.int64)  # head duration, 0 for empty heads
    last = np.full(k, -1, dtype=np.int64)
    for a, head in enumerate(view.heads):
        if head:
            base[a] = sum(int(instance.durations[i]) for i in head) + sum(
                int(instance.deadhead[x, y]) for x, y in zip(head, head[1:])
            )
            last[a] = head[-1]
    dur = base[:, None] + instance.durations[tails][None, :]
    nonempty = last >= 0
    if nonempty.any():
        lh = last[nonempty]
        dh = instance.deadhead[np.ix_(lh, tails)]
        ends = instance.starts[lh] + instance.durations[lh]
        feasible[nonempty] = ends[:, None] + dh <= instance.starts[tails][None, :]
        dur[nonempty] += dh
    weights = np.maximum(dur - instance.goal, 0)
    return weights, feasible


def rebalance(schedule: Schedule, instance: Instance, passes: int = 1) -> Schedule:
    for _ in range(passes):
        view = strip(schedule)
        weights, feasible = weight_matrix(view, instance)
        m = min_weight_perfect_matching(CostMatrix(weights, feasible))
        schedule = view.reattach(m.assignment)
    return schedule
