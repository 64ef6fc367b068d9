"""Domain types and tour arithmetic.

All times are integer seconds. Minutes (2 decimals) only appear at I/O
boundaries, through :func:`minutes` and :func:`to_minutes`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError

Tour = tuple  # ordered tuple of trip indices

DEFAULT_BUS_PENALTY = 60_000.0
DEFAULT_EXCESS_PENALTY = 150.0  # currency per excess minute per year


def minutes(m: float) -> int:
    """Minutes -> integer seconds."""
    return int(round(m * 60))


def to_minutes(s: float) -> float:
    return round(s / 60.0, 2)


@dataclass(frozen=True)
class Trip:
    id: int
    start: int
    duration: int

    def __post_init__(self):
        if self.duration <= 0:
            raise InputError(f"trip {self.id}: duration must be positive")
        if self.start < 0:
            raise InputError(f"trip {self.id}: start must be non-negative")

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass(eq=False)
class Instance:
    """Trips, the directed deadhead matrix and the penalty parameters.

    ``max_chain`` is ``None`` for an unbounded number of trips per tour.
    ``excess_penalty`` is charged per minute of excess.
    """

    trips: tuple
    deadhead: np.ndarray
    goal: int
    max_chain: Optional[int] = None
    bus_penalty: float = DEFAULT_BUS_PENALTY
    excess_penalty: float = DEFAULT_EXCESS_PENALTY
    starts: np.ndarray = field(init=False, repr=False)
    durations: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.trips = tuple(self.trips)
        for k, t in enumerate(self.trips):
            if t.id != k:
                raise InputError(f"trip at position {k} has id {t.id}")
        dh = np.asarray(self.deadhead, dtype=np.int64)
        n = len(self.trips)
        if n == 0:
            dh = dh.reshape(0, 0)
        if dh.ndim != 2 or dh.shape != (n, n):
            raise InputError(f"deadhead dimension {dh.shape} does not match {n} trips")
        if (dh < 0).any():
            raise InputError("deadhead entries must be non-negative")
        dh.setflags(write=False)
        self.deadhead = dh
        if self.goal <= 0:
            raise InputError("goal must be positive")
        if self.max_chain is not None and self.max_chain < 2:
            raise InputError("max_chain must be >= 2 when bounded")
        if self.bus_penalty < 0 or self.excess_penalty < 0:
            raise InputError("penalties must be non-negative")
        self.starts = np.array([t.start for t in self.trips], dtype=np.int64)
        self.durations = np.array([t.duration for t in self.trips], dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.trips)

    def replace(self, **changes) -> "Instance":
        kw = dict(
            trips=self.trips,
            deadhead=self.deadhead,
            goal=self.goal,
            max_chain=self.max_chain,
            bus_penalty=self.bus_penalty,
            excess_penalty=self.excess_penalty,
        )
        kw.update(changes)
        return Instance(**kw)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.trips == other.trips
            and np.array_equal(self.deadhead, other.deadhead)
            and self.goal == other.goal
            and self.max_chain == other.max_chain
            and self.bus_penalty == other.bus_penalty
            and self.excess_penalty == other.excess_penalty
        )


@dataclass(frozen=True)
class Schedule:
    tours: tuple

    def __init__(self, tours: Iterable[Sequence[int]]):
        object.__setattr__(self, "tours", tuple(tuple(int(i) for i in t) for t in tours))

    def __len__(self):
        return len(self.tours)

    @property
    def n_tours(self) -> int:
        return len(self.tours)


@dataclass(frozen=True)
class CostModel:
    annual_bus_cost: float = DEFAULT_BUS_PENALTY
    per_minute_year: float = DEFAULT_EXCESS_PENALTY  # $50/hr * 180 days / 60

    def __post_init__(self):
        if self.annual_bus_cost < 0 or self.per_minute_year < 0:
            raise InputError("cost rates must be non-negative")


@dataclass(frozen=True)
class Violation:
    tour: Optional[int]
    reason: str

    def __str__(self):
        return self.reason if self.tour is None else f"tour {self.tour}: {self.reason}"


def _check_index(i: int, instance: Instance):
    if not 0 <= i < instance.n:
        raise InputError(f"trip index {i} out of range for {instance.n} trips")


def compatible(i: int, j: int, instance: Instance) -> bool:
    """True iff trip ``j`` can be served right after trip ``i`` by the same bus."""
    _check_index(i, instance)
    _check_index(j, instance)
    if i == j:
        raise InputError("a trip cannot be chained to itself")
    ti, tj = instance.trips[i], instance.trips[j]
    return ti.end + int(instance.deadhead[i, j]) <= tj.start


def tour_duration(tour: Sequence[int], instance: Instance) -> int:
    """Ride time of all trips plus deadheads between consecutive trips.

    Idle time waiting for the next trip's start is not counted.
    """
    if len(tour) == 0:
        raise InputError("empty tour")
    for i in tour:
        _check_index(i, instance)
    total = sum(instance.trips[i].duration for i in tour)
    total += sum(int(instance.deadhead[a, b]) for a, b in zip(tour, tour[1:]))
    return total


def excess(tour: Sequence[int], instance: Instance) -> int:
    return max(0, tour_duration(tour, instance) - instance.goal)


def tour_deadhead(tour: Sequence[int], instance: Instance) -> int:
    return sum(int(instance.deadhead[a, b]) for a, b in zip(tour, tour[1:]))


def total_excess(schedule: Schedule, instance: Instance) -> int:
    return sum(excess(t, instance) for t in schedule.tours)


def total_deadhead(schedule: Schedule, instance: Instance) -> int:
    return sum(tour_deadhead(t, instance) for t in schedule.tours)


def validate_schedule(
    schedule: Schedule, instance: Instance, max_chain: Optional[int] = None
) -> list:
    """Return every rule the schedule breaks; an empty list means valid.

    ``max_chain`` overrides the instance's cap when given.
    """
    cap = max_chain if max_chain is not None else instance.max_chain
    n = instance.n
    out = []
    seen: dict = {}
    for k, tour in enumerate(schedule.tours):
        if len(tour) == 0:
            out.append(Violation(k, "empty tour"))
            continue
        for i in tour:
            if not 0 <= i < n:
                out.append(Violation(k, f"unknown trip {i}"))
            elif i in seen:
                out.append(Violation(k, f"trip {i} duplicated (also in tour {seen[i]})"))
            else:
                seen[i] = k
        for a, b in zip(tour, tour[1:]):
            if 0 <= a < n and 0 <= b < n and (a == b or not compatible(a, b, instance)):
                out.append(Violation(k, f"incompatible pair ({a},{b})"))
        if cap is not None and len(tour) > cap:
            out.append(Violation(k, f"{len(tour)} trips exceeds max_chain {cap}"))
    for i in range(n):
        if i not in seen:
            out.append(Violation(None, f"trip {i} unassigned"))
    return out
