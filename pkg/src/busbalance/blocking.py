"""Stage 1: chain trips into the fewest tours, then least total deadhead.

Minimum path cover on the compatibility DAG equals ``n - |maximum matching|``
on its split bipartite graph, so a min-cost maximum-cardinality matching of
predecessor -> successor links gives both objectives at once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .assignment import min_cost_max_cardinality
from .model import Instance, Schedule

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkGraph:
    feasible: np.ndarray  # feasible[i, j]: j may follow i
    link_cost: np.ndarray  # deadhead seconds, meaningful on feasible cells only

    @property
    def n(self) -> int:
        return self.feasible.shape[0]

    def edges(self) -> list:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.feasible))]


def build_link_graph(instance: Instance) -> LinkGraph:
    ends = instance.starts + instance.durations
    feasible = ends[:, None] + instance.deadhead <= instance.starts[None, :]
    np.fill_diagonal(feasible, False)
    return LinkGraph(feasible, np.where(feasible, instance.deadhead, 0))


def chains_from_links(n: int, links, starts=None) -> Schedule:
    """Join predecessor -> successor links into tours.

    Tours are ordered by (first trip start, first trip id).
    """
    succ = [-1] * n
    has_pred = [False] * n
    for i, j in links:
        succ[i] = j
        has_pred[j] = True
    tours = []
    for h in range(n):
        if has_pred[h]:
            continue
        tour = [h]
        while succ[tour[-1]] >= 0:
            tour.append(succ[tour[-1]])
        tours.append(tour)
    if starts is not None:
        tours.sort(key=lambda t: (int(starts[t[0]]), t[0]))
    return Schedule(tours)


def block(instance: Instance) -> Schedule:
    graph = build_link_graph(instance)
    links = min_cost_max_cardinality(instance.n, graph.feasible, graph.link_cost)
    schedule = chains_from_links(instance.n, links, instance.starts)
    if instance.max_chain is not None:
        longest = max((len(t) for t in schedule.tours), default=0)
        if longest > instance.max_chain:
            log.warning(
                "stage-1 tour of %d trips exceeds max_chain %d", longest, instance.max_chain
            )
    return schedule
