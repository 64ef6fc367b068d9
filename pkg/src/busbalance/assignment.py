"""Square assignment solvers on integer costs with an infeasibility mask.

:func:`min_weight_perfect_matching` is a shortest-augmenting-path Hungarian
method, O(n^3): dual prices start from row/column reductions with a greedy
tight matching, then each unmatched row is augmented by a Dijkstra search
over reduced costs. All columns tied at the current distance are settled
together, which keeps the Python loop short on the large zero-cost plateaus
of padded problems. Infeasible cells are never priced; when a row's
alternating tree runs out of feasible columns the Hall condition fails and
:class:`InfeasibleMatchingError` names that row.

Ties between optimal assignments are broken lexicographically: the final
dual prices identify the tight (zero reduced cost) edges, every optimal
assignment lives on them, and a row-by-row pass rotates alternating cycles
so each row takes the smallest column still admitting a perfect matching.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InfeasibleMatchingError, InputError

_INF = np.iinfo(np.int64).max // 4


@dataclass(frozen=True)
class CostMatrix:
    cost: np.ndarray
    feasible: np.ndarray

    def __init__(self, cost, feasible=None):
        c = np.asarray(cost)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise InputError(f"cost matrix must be square, got shape {c.shape}")
        if feasible is None:
            f = np.ones(c.shape, dtype=bool)
        else:
            f = np.asarray(feasible, dtype=bool)
            if f.shape != c.shape:
                raise InputError("feasibility mask shape differs from cost shape")
        # infeasible cells may hold anything (nan, None); never read them
        c = np.where(f, c, 0)
        if c.dtype.kind == "f":
            if not np.all(np.isfinite(c)) or not np.all(c == np.round(c)):
                raise InputError("costs must be finite integers")
        c = c.astype(np.int64)
        object.__setattr__(self, "cost", c)
        object.__setattr__(self, "feasible", f)

    @property
    def n(self) -> int:
        return self.cost.shape[0]


@dataclass(frozen=True)
class Matching:
    assignment: np.ndarray  # row -> column
    total_cost: int


def _warm_start(cost: np.ndarray, feasible: np.ndarray):
    """Row then column reduction, and a greedy matching on the tight cells."""
    n = cost.shape[0]
    masked = np.where(feasible, cost, _INF)
    u = masked.min(axis=1)
    if (u >= _INF).any():
        raise InfeasibleMatchingError(int(np.argmax(u >= _INF)))
    reduced = np.where(feasible, cost - u[:, None], _INF)
    v = np.zeros(n + 1, dtype=np.int64)
    colmin = reduced.min(axis=0)
    v[:n] = np.where(colmin < _INF, colmin, 0)  # empty column: left to augmentation
    owner = np.full(n + 1, -1, dtype=np.int64)
    taken = np.zeros(n, dtype=bool)
    for i in range(n):
        row = (reduced[i] - v[:n] == 0) & ~taken
        if row.any():
            j = int(np.argmax(row))
            owner[j] = i
            taken[j] = True
    matched = np.zeros(n, dtype=bool)
    matched[owner[:n][owner[:n] >= 0]] = True
    return u, v, owner, np.flatnonzero(~matched)


def _hungarian(cost: np.ndarray, feasible: np.ndarray):
    n = cost.shape[0]
    u, v, owner, pending = _warm_start(cost, feasible)
    v = v[:n]
    owner = owner[:n]
    col_of = np.full(n, -1, dtype=np.int64)
    col_of[owner[owner >= 0]] = np.flatnonzero(owner >= 0)
    for root in pending.tolist():
        # Dijkstra over reduced costs from ``root``; every column at the
        # current minimum distance is settled in one vectorised step.
        dist = np.full(n, _INF, dtype=np.int64)
        pred = np.full(n, -1, dtype=np.int64)  # column -> row it was reached from
        settled = np.zeros(n, dtype=bool)
        seen_rows = [root]
        scan = np.array([root])
        level = 0
        while True:
            red = cost[scan] - u[scan, None] - v[None, :]
            red = np.where(feasible[scan] & ~settled[None, :], red + level, _INF)
            best = red.argmin(axis=0)
            bval = red[best, np.arange(n)]
            better = bval < dist
            dist[better] = bval[better]
            pred[better] = scan[best[better]]
            open_ = np.where(settled, _INF, dist)
            level = int(open_.min())
            if level >= _INF:
                raise InfeasibleMatchingError(root)
            ring = ~settled & (dist == level)
            sinks = np.flatnonzero(ring & (owner < 0))
            if sinks.size:
                sink = int(sinks[0])
                break
            settled |= ring
            scan = owner[ring]
            seen_rows.extend(scan.tolist())
        rows = np.array(seen_rows[1:], dtype=np.int64)
        u[root] += level
        if rows.size:
            u[rows] += level - dist[col_of[rows]]
        v[settled] -= level - dist[settled]
        j = sink
        while True:
            i = int(pred[j])
            owner[j] = i
            prev = int(col_of[i])
            col_of[i] = j
            if i == root:
                break
            j = prev
    return col_of.copy(), u, v


def _lex_smallest(assign: np.ndarray, tight: np.ndarray) -> np.ndarray:
    """Lexicographically smallest perfect matching on ``tight`` edges.

    ``assign`` must already be a perfect matching using tight edges only.
    """
    n = len(assign)
    assign = assign.copy()
    rowof = np.empty(n, dtype=np.int64)
    rowof[assign] = np.arange(n)
    for i in range(n):
        cur = assign[i]
        cands = np.flatnonzero(tight[i, :cur])
        cands = cands[rowof[cands] > i]
        if cands.size == 0:
            continue
        # reverse search: rows r > i that can hand their column along a chain ending at i
        nxt = np.full(n, -1, dtype=np.int64)
        reached = np.zeros(n, dtype=bool)
        reached[: i + 1] = True
        frontier = np.array([i])
        while frontier.size:
            sub = tight[:, assign[frontier]]
            hit = sub.any(axis=1) & ~reached
            new = np.flatnonzero(hit)
            if new.size == 0:
                break
            nxt[new] = frontier[np.argmax(sub[new], axis=1)]
            reached[new] = True
            frontier = new
        ok = cands[nxt[rowof[cands]] >= 0]
        if ok.size == 0:
            continue
        j = int(ok[0])
        # rotate: i -> j, r -> assign[nxt[r]] along the chain
        r = int(rowof[j])
        new_cols = {i: j}
        while r != i:
            new_cols[r] = int(assign[nxt[r]])
            r = int(nxt[r])
        for row, col in new_cols.items():
            assign[row] = col
            rowof[col] = row
    return assign


def min_weight_perfect_matching(m: CostMatrix) -> Matching:
    """Minimum-cost perfect matching over the feasible cells of ``m``.

    Among equal-cost optima the lexicographically smallest assignment
    (row 0's column first, then row 1's, ...) is returned.
    """
    n = m.n
    if n == 0:
        return Matching(np.zeros(0, dtype=np.int64), 0)
    assign, u, v = _hungarian(m.cost, m.feasible)
    tight = m.feasible & (m.cost - u[:, None] - v[None, :] == 0)
    assign = _lex_smallest(assign, tight)
    total = int(m.cost[np.arange(n), assign].sum())
    return Matching(assign, total)


def min_cost_max_cardinality(
    n_left: int,
    feasible,
    cost,
    n_right: Optional[int] = None,
) -> list:
    """Maximum-cardinality matching of least total cost, as sorted (i, j) pairs.

    Embeds the problem into a 2n x 2n perfect matching: real-real edges cost
    ``c - L`` with ``L = 1 + n * max(c)`` so one extra edge always outweighs
    any cost difference; every edge touching a dummy costs 0.
    """
    n = n_left
    if n_right is not None and n_right != n_left:
        raise InputError("only square problems are supported")
    feas = np.asarray(feasible, dtype=bool)
    if feas.shape != (n, n):
        raise InputError(f"feasibility mask must be {n}x{n}")
    if n == 0 or not feas.any():
        return []
    c = np.where(feas, np.asarray(cost), 0)
    c = np.asarray(c, dtype=np.int64)
    if (c[feas] < 0).any():
        raise InputError("costs must be non-negative")
    big = 1 + n * int(c[feas].max())
    full_cost = np.zeros((2 * n, 2 * n), dtype=np.int64)
    full_cost[:n, :n] = c - big
    full_feas = np.ones((2 * n, 2 * n), dtype=bool)
    full_feas[:n, :n] = feas
    res = min_weight_perfect_matching(CostMatrix(full_cost, full_feas))
    return [(i, int(res.assignment[i])) for i in range(n) if res.assignment[i] < n]
