"""Balanced-blocking MIP: model construction, LP-format export, and an
exhaustive oracle for small instances.

Tour slots hold only multi-trip tours, so ``K = ceil(N / 2)`` slots always
suffice; single-trip tours are flagged per trip by ``a_i``. Arc variables
``x_i_j_k`` exist only for compatible ordered pairs. Times are written in
minutes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .blocking import build_link_graph
from .errors import InputError
from .model import Instance, Schedule, excess, to_minutes

LE, GE, EQ = "<=", ">=", "="


@dataclass(frozen=True)
class Row:
    name: str
    terms: tuple  # ((coef, var), ...)
    sense: str
    rhs: float

    def lhs(self, values: dict) -> float:
        return sum(c * values.get(v, 0) for c, v in self.terms)

    def satisfied(self, values: dict, tol: float = 1e-6) -> bool:
        lhs = self.lhs(values)
        if self.sense == LE:
            return lhs <= self.rhs + tol
        if self.sense == GE:
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass
class MipModel:
    n_trips: int
    n_slots: int
    pairs: list  # compatible (i, j)
    binaries: list = field(default_factory=list)
    continuous: list = field(default_factory=list)
    objective: list = field(default_factory=list)  # ((coef, var), ...)
    rows: list = field(default_factory=list)

    def counts(self) -> dict:
        kinds = {"x": 0, "m": 0, "n": 0, "a": 0, "b": 0, "p": 0}
        for v in self.binaries + self.continuous:
            kinds[v.split("_")[0]] += 1
        return kinds

    @property
    def n_vars(self) -> int:
        return len(self.binaries) + len(self.continuous)

    def violated(self, values: dict, tol: float = 1e-6) -> list:
        return [r.name for r in self.rows if not r.satisfied(values, tol)]

    def objective_value(self, values: dict) -> float:
        return sum(c * values.get(v, 0) for c, v in self.objective)


def _x(i, j, k):
    return f"x_{i}_{j}_{k}"


def estimate_size(instance: Instance) -> int:
    """Variable count of :func:`build_mip` without building it."""
    n = instance.n
    k = math.ceil(n / 2)
    pairs = int(build_link_graph(instance).feasible.sum())
    return pairs * k + 2 * n * k + n + 2 * k


def build_mip(instance: Instance) -> MipModel:
    n = instance.n
    if n < 2:
        raise InputError("the MIP needs at least 2 trips")
    K = math.ceil(n / 2)
    cap = instance.max_chain if instance.max_chain is not None else n
    graph = build_link_graph(instance)
    pairs = graph.edges()
    T = [to_minutes_exact(t.duration) for t in instance.trips]
    D = instance.deadhead
    out_of = {i: [] for i in range(n)}
    into = {i: [] for i in range(n)}
    for i, j in pairs:
        out_of[i].append(j)
        into[j].append(i)

    model = MipModel(n, K, pairs)
    model.binaries += [_x(i, j, k) for i, j in pairs for k in range(K)]
    model.binaries += [f"m_{i}_{k}" for i in range(n) for k in range(K)]
    model.binaries += [f"n_{i}_{k}" for i in range(n) for k in range(K)]
    model.binaries += [f"a_{i}" for i in range(n)]
    model.binaries += [f"b_{k}" for k in range(K)]
    model.continuous += [f"p_{k}" for k in range(K)]

    mb, mg = instance.bus_penalty, instance.excess_penalty
    obj = [(mb, _x(i, j, k)) for i, j in pairs for k in range(K)]
    obj += [(-mb, f"m_{i}_{k}") for i in range(n) for k in range(K)]
    obj += [(mb, f"a_{i}") for i in range(n)]
    obj += [(mg, f"p_{k}") for k in range(K)]
    model.objective = obj

    goal = to_minutes_exact(instance.goal)
    rows = model.rows

    def touching(i, k):
        return [(1, _x(i, j, k)) for j in out_of[i]] + [(1, _x(j, i, k)) for j in into[i]]

    # (2) excess of each slot
    for k in range(K):
        terms = [(to_minutes_exact(int(D[i, j])) + T[i] + T[j], _x(i, j, k)) for i, j in pairs]
        terms += [(-T[i], f"m_{i}_{k}") for i in range(n)]
        terms.append((-1, f"p_{k}"))
        rows.append(Row(f"c2_{k}", tuple(terms), LE, goal))
    # (3) every trip covered exactly once
    for i in range(n):
        terms = [t for k in range(K) for t in touching(i, k)]
        terms.append((1, f"a_{i}"))
        terms += [(-1, f"m_{i}_{k}") for k in range(K)]
        rows.append(Row(f"c3_{i}", tuple(terms), EQ, 1))
    # (4)-(5) middle trips and slot membership
    for i in range(n):
        for k in range(K):
            rows.append(
                Row(f"c4_{i}_{k}", tuple(touching(i, k) + [(-1, f"m_{i}_{k}"), (-1, f"n_{i}_{k}")]), GE, 0)
            )
    for i in range(n):
        for k in range(K):
            rows.append(Row(f"c5_{i}_{k}", tuple(touching(i, k) + [(-2, f"n_{i}_{k}")]), LE, 0))
    # (6) one start and one end per used slot
    for k in range(K):
        terms = [(1, f"n_{i}_{k}") for i in range(n)] + [(-1, f"m_{i}_{k}") for i in range(n)]
        terms.append((-2, f"b_{k}"))
        rows.append(Row(f"c6_{k}", tuple(terms), EQ, 0))
    # (7) single-trip flag
    for i in range(n):
        terms = [t for k in range(K) for t in touching(i, k)] + [(2, f"a_{i}")]
        rows.append(Row(f"c7_{i}", tuple(terms), LE, 2))
    # (8)-(9) slot in use
    for k in range(K):
        terms = [(1, _x(i, j, k)) for i, j in pairs] + [(-(cap - 1), f"b_{k}")]
        rows.append(Row(f"c8_{k}", tuple(terms), LE, 0))
    for k in range(K):
        terms = [(1, _x(i, j, k)) for i, j in pairs] + [(-1, f"b_{k}")]
        rows.append(Row(f"c9_{k}", tuple(terms), GE, 0))
    # (10)-(11) at most one successor / predecessor; trips without arcs give
    # an empty, always-satisfied row, which is omitted
    for i in range(n):
        if out_of[i]:
            terms = [(1, _x(i, j, k)) for j in out_of[i] for k in range(K)]
            rows.append(Row(f"c10_{i}", tuple(terms), LE, 1))
    for i in range(n):
        if into[i]:
            terms = [(1, _x(j, i, k)) for j in into[i] for k in range(K)]
            rows.append(Row(f"c11_{i}", tuple(terms), LE, 1))
    # (12) used slots first
    for k in range(1, K):
        rows.append(Row(f"c12_{k}", ((1, f"b_{k}"), (-1, f"b_{k - 1}")), LE, 0))
    return model


def to_minutes_exact(seconds: int) -> float:
    return seconds / 60.0


# ---------------------------------------------------------------------------
# LP text


def _num(c: float) -> str:
    if c == int(c):
        return str(int(c))
    return f"{c:.10g}"


def _expr(terms, per_line: int = 8) -> list:
    parts = []
    for idx, (c, v) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = v if mag == 1 else f"{_num(mag)} {v}"
        if idx == 0:
            parts.append(f"- {body}" if c < 0 else body)
        else:
            parts.append(f"{sign} {body}")
    lines = [" ".join(parts[s : s + per_line]) for s in range(0, len(parts), per_line)]
    return lines or ["0"]


def export_lp(model: MipModel) -> str:
    out = [
        f"\\ balanced school bus blocking: {model.n_trips} trips, {model.n_slots} tour slots",
        "Minimize",
    ]
    obj = [(c, v) for c, v in model.objective if c != 0]
    lines = _expr(obj)
    out.append(f" obj: {lines[0]}")
    out += [f"   {ln}" for ln in lines[1:]]
    out.append("Subject To")
    for r in model.rows:
        lines = _expr(r.terms)
        lines[-1] += f" {r.sense} {_num(r.rhs)}"
        out.append(f" {r.name}: {lines[0]}")
        out += [f"   {ln}" for ln in lines[1:]]
    out.append("Bounds")
    out += [f" {v} >= 0" for v in model.continuous]
    out.append("Binaries")
    for s in range(0, len(model.binaries), 8):
        out.append(" " + " ".join(model.binaries[s : s + 8]))
    out.append("End")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# schedules as variable assignments


def assignment_from_schedule(schedule: Schedule, instance: Instance, model: MipModel) -> dict:
    """Variable values encoding ``schedule``; multi-trip tours fill slots 0, 1, ..."""
    values = {v: 0 for v in model.binaries + model.continuous}
    multi = [t for t in schedule.tours if len(t) > 1]
    if len(multi) > model.n_slots:
        raise InputError("schedule has more multi-trip tours than slots")
    for k, tour in enumerate(multi):
        for a, b in zip(tour, tour[1:]):
            values[_x(a, b, k)] = 1
        for i in tour:
            values[f"n_{i}_{k}"] = 1
        for i in tour[1:-1]:
            values[f"m_{i}_{k}"] = 1
        values[f"b_{k}"] = 1
        values[f"p_{k}"] = excess(tour, instance) / 60.0
    for tour in schedule.tours:
        if len(tour) == 1:
            values[f"a_{tour[0]}"] = 1
    return values


def bus_count(values: dict) -> int:
    """Sum x - sum m + sum a over an explicit assignment."""
    total = 0
    for v, val in values.items():
        kind = v.split("_")[0]
        if kind in ("x", "a"):
            total += val
        elif kind == "m":
            total -= val
    return int(round(total))


# ---------------------------------------------------------------------------
# exhaustive oracle


@dataclass(frozen=True)
class OracleResult:
    schedule: Schedule
    buses: int
    excess_total: float  # minutes
    objective: float
    proven_optimal: bool
    nodes: int = 0


def _order(instance: Instance) -> list:
    return sorted(range(instance.n), key=lambda i: (instance.trips[i].start, i))


def chain_partitions(instance: Instance) -> Iterator[Schedule]:
    """Every partition of the trips into compatible chains, each exactly once."""
    order = _order(instance)
    ends = [t.end for t in instance.trips]
    starts = [t.start for t in instance.trips]
    D = instance.deadhead
    chains: list = []

    def rec(pos):
        if pos == len(order):
            yield Schedule(chains)
            return
        t = order[pos]
        for c in chains:
            last = c[-1]
            if ends[last] + D[last, t] <= starts[t]:
                c.append(t)
                yield from rec(pos + 1)
                c.pop()
        chains.append([t])
        yield from rec(pos + 1)
        chains.pop()

    yield from rec(0)


def objective_of(buses: int, excess_seconds: int, instance: Instance) -> Fraction:
    return Fraction(instance.bus_penalty) * buses + Fraction(instance.excess_penalty) * Fraction(
        excess_seconds, 60
    )


def exact_solve_small(instance: Instance, node_limit: int = 2_000_000) -> OracleResult:
    """Depth-first search over chain partitions, scored by bus and excess penalties.

    A partial partition's bus count and accumulated excess never decrease as
    trips are added, so a branch is cut once that bound reaches the
    incumbent. If ``node_limit`` is hit, the best complete partition found so
    far (or all singletons) is returned with ``proven_optimal=False``.
    """
    order = _order(instance)
    trips = instance.trips
    D = instance.deadhead
    goal = instance.goal
    mb = Fraction(instance.bus_penalty)
    mg = Fraction(instance.excess_penalty) / 60
    # chain state: [trip list, duration seconds]
    chains: list = []
    best: dict = {"obj": None, "tours": None}
    nodes = 0

    class _Stop(Exception):
        pass

    def bound(extra_bus=0, extra_excess=0):
        exc = sum(max(0, d - goal) for _, d in chains) + extra_excess
        return mb * (len(chains) + extra_bus) + mg * exc

    def rec(pos):
        nonlocal nodes
        nodes += 1
        if nodes > node_limit:
            raise _Stop
        lb = bound()
        if best["obj"] is not None and lb >= best["obj"]:
            return
        if pos == len(order):
            best["obj"] = lb
            best["tours"] = [list(c) for c, _ in chains]
            return
        t = order[pos]
        for ch in chains:
            c, d = ch
            last = c[-1]
            if trips[last].end + D[last, t] <= trips[t].start:
                c.append(t)
                ch[1] = d + int(D[last, t]) + trips[t].duration
                rec(pos + 1)
                c.pop()
                ch[1] = d
        chains.append([[t], trips[t].duration])
        rec(pos + 1)
        chains.pop()

    proven = True
    try:
        rec(0)
    except _Stop:
        proven = False
    tours = best["tours"] if best["tours"] is not None else [[i] for i in order]
    schedule = Schedule(sorted(tours, key=lambda c: (trips[c[0]].start, c[0])))
    exc = sum(excess(t, instance) for t in schedule.tours)
    obj = objective_of(len(schedule), exc, instance)
    return OracleResult(schedule, len(schedule), to_minutes(exc), float(obj), proven, nodes)
