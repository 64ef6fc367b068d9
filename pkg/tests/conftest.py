from __future__ import annotations

import contextlib

import numpy as np
import pytest

from busbalance import Instance, Trip, minutes

_ACCEPTANCE: list = []


def make_instance(spec, deadhead, goal=75, default_dh=None, **kw):
    """Build an instance from minutes: ``spec`` is [(start, duration), ...],
    ``deadhead`` maps (i, j) -> minutes; other off-diagonal cells get
    ``default_dh`` (or 0)."""
    n = len(spec)
    trips = [Trip(k, minutes(s), minutes(d)) for k, (s, d) in enumerate(spec)]
    dh = np.full((n, n), minutes(default_dh or 0), dtype=np.int64)
    np.fill_diagonal(dh, 0)
    for (i, j), m in deadhead.items():
        dh[i, j] = minutes(m)
    return Instance(trips, dh, minutes(goal), **kw)


def random_instance(rng, n, goal=None, excess_penalty=150.0, max_start=180, max_dh=30):
    """Small random instance with plenty of compatible pairs."""
    starts = rng.integers(0, max_start // 5 + 1, n) * 5
    durs = rng.integers(5, 41, n)
    dh = rng.integers(0, max_dh + 1, (n, n))
    np.fill_diagonal(dh, 0)
    trips = [Trip(k, int(starts[k]) * 60, int(durs[k]) * 60) for k in range(n)]
    if goal is None:
        goal = int(rng.integers(30, 91))
    return Instance(trips, dh * 60, goal * 60, excess_penalty=excess_penalty)


@pytest.fixture
def e1():
    # t1: 0+30, t2: 40+20, t3: 100+25 (minutes)
    return make_instance(
        [(0, 30), (40, 20), (100, 25)],
        {(0, 1): 10, (1, 2): 35, (0, 2): 20, (1, 0): 10, (2, 1): 10, (2, 0): 10},
    )


@pytest.fixture
def w1():
    # ids: a1=0, a2=1, b1=2, b2=3; tours A=[0,1] (90 min) and B=[2,3] (55 min)
    return make_instance(
        [(0, 40), (50, 45), (0, 30), (45, 20)],
        {(0, 1): 5, (2, 3): 5, (0, 3): 5, (2, 1): 10},
        default_dh=100,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20180627)


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record one acceptance criterion's outcome for the terminal summary."""
    notes: list = []
    try:
        yield notes
    except BaseException as e:
        _ACCEPTANCE.append((number, title, "FAIL", f"{type(e).__name__}: {e}".splitlines()[0]))
        raise
    _ACCEPTANCE.append((number, title, "PASS", "; ".join(notes)))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, detail in sorted(_ACCEPTANCE):
        line = f"[{status}] {number:>2}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
