"""Synthetic instance generation and JSON instance/schedule files."""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.stats import truncnorm

from .errors import FormatError, InputError, ScheduleValidationError
from .model import Instance, Schedule, Trip, minutes, validate_schedule

FORMAT_VERSION = 1


@dataclass(frozen=True)
class GeneratorParams:
    """Trip-set generator settings; durations and times in minutes.

    ``duration_mean``/``duration_sd`` are the moments of the generated
    (truncated) durations, not of the underlying normal.

    Schools sit uniformly in a square plane; each trip starts at its
    school's bell time and ends at a uniform drop-off point. Deadhead from
    trip i to trip j is the straight-line drive from i's drop-off to j's
    school.
    """

    n_trips: int
    duration_mean: float = 25.0
    duration_sd: float = 10.0
    duration_min: float = 7.0
    duration_max: float = 84.0
    n_schools: Optional[int] = None  # default: one school per ~12 trips
    bell_window: tuple = (13 * 60 + 30, 16 * 60)
    plane_size: float = 10.0
    speed: float = 0.5
    goal: float = 75.0
    seed: int = 0

    def __post_init__(self):
        if self.n_trips < 1:
            raise InputError("n_trips must be >= 1")
        if not self.duration_min <= self.duration_mean <= self.duration_max:
            raise InputError("need duration_min <= duration_mean <= duration_max")
        if self.duration_min <= 0 or self.duration_sd < 0:
            raise InputError("durations must be positive and sd non-negative")
        if self.n_schools is not None and self.n_schools < 1:
            raise InputError("n_schools must be >= 1")
        lo, hi = self.bell_window
        if lo > hi or lo < 0:
            raise InputError("bad bell window")
        if self.plane_size <= 0 or self.speed <= 0 or self.goal <= 0:
            raise InputError("plane_size, speed and goal must be positive")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")

    @property
    def schools(self) -> int:
        return self.n_schools if self.n_schools is not None else max(1, round(self.n_trips / 12))


PRESETS = {
    "hcpss": GeneratorParams(n_trips=994),
    "california": GeneratorParams(
        n_trips=54, duration_mean=40.0, duration_sd=10.0, duration_min=22.0, duration_max=66.0
    ),
}


def preset(name: str, **overrides) -> GeneratorParams:
    try:
        base = PRESETS[name]
    except KeyError:
        raise InputError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides)


@lru_cache(maxsize=64)
def parent_normal(mean: float, sd: float, lo: float, hi: float) -> tuple:
    """(mu, sigma) of the normal whose truncation to [lo, hi] has the given moments."""
    if sd == 0 or lo == hi:
        return float(mean), 0.0

    def gap(x):
        mu, log_sigma = x
        sigma = np.exp(log_sigma)
        m, v = truncnorm.stats((lo - mu) / sigma, (hi - mu) / sigma, loc=mu, scale=sigma, moments="mv")
        return [(m - mean) / sd, (np.sqrt(v) - sd) / sd]

    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sol = optimize.root(gap, [mean, np.log(sd)])
        residual = gap(sol.x)
    if not sol.success or not np.all(np.abs(residual) <= 1e-6):
        raise InputError(f"no normal truncated to [{lo}, {hi}] has mean {mean} and sd {sd}")
    return float(sol.x[0]), float(np.exp(sol.x[1]))


def _truncated_normal(rng, size, mean, sd, lo, hi):
    out = np.empty(size)
    filled = 0
    if sd == 0:
        out[:] = mean
        return out
    tries = 0
    while filled < size:
        draw = rng.normal(mean, sd, size - filled)
        keep = draw[(draw >= lo) & (draw <= hi)]
        out[filled : filled + keep.size] = keep
        filled += keep.size
        tries += 1
        if tries > 10_000:
            raise InputError("truncation bounds reject almost every draw")
    return out


def generate(params: GeneratorParams) -> Instance:
    rng = np.random.default_rng(params.seed)
    n, s = params.n_trips, params.schools
    school_xy = rng.uniform(0, params.plane_size, (s, 2))
    lo, hi = params.bell_window
    slots = np.arange(int(np.ceil(lo / 5)) * 5, hi + 1, 5)
    if slots.size == 0:
        raise InputError("bell window contains no 5-minute slot")
    bells = rng.choice(slots, s)
    school_of = rng.integers(0, s, n)
    mu, sigma = parent_normal(
        params.duration_mean, params.duration_sd, params.duration_min, params.duration_max
    )
    dur = _truncated_normal(rng, n, mu, sigma, params.duration_min, params.duration_max)
    drop_xy = rng.uniform(0, params.plane_size, (n, 2))
    dist = np.linalg.norm(drop_xy[:, None, :] - school_xy[school_of][None, :, :], axis=2)
    deadhead = np.rint(dist / params.speed * 60).astype(np.int64)
    np.fill_diagonal(deadhead, 0)
    trips = [
        Trip(k, int(bells[school_of[k]]) * 60, max(1, minutes(float(dur[k])))) for k in range(n)
    ]
    return Instance(trips, deadhead, goal=minutes(params.goal))


# ---------------------------------------------------------------------------
# files


def instance_to_dict(instance: Instance) -> dict:
    return {
        "version": FORMAT_VERSION,
        "goal_s": int(instance.goal),
        "max_chain": instance.max_chain,
        "bus_penalty": instance.bus_penalty,
        "excess_penalty": instance.excess_penalty,
        "trips": [{"id": t.id, "start_s": t.start, "duration_s": t.duration} for t in instance.trips],
        "deadhead_s": instance.deadhead.tolist(),
    }


def instance_hash(instance: Instance) -> str:
    blob = json.dumps(instance_to_dict(instance), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _field(d, key, kind, locus):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"missing field {key!r}", locus)
    val = d[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise FormatError(f"field {key!r} must be an integer", f"{locus}.{key}")
    if kind is float and (isinstance(val, bool) or not isinstance(val, (int, float))):
        raise FormatError(f"field {key!r} must be a number", f"{locus}.{key}")
    if kind is list and not isinstance(val, list):
        raise FormatError(f"field {key!r} must be a list", f"{locus}.{key}")
    return val


def _check_version(d, path):
    v = _field(d, "version", int, path)
    if v != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {v}", f"{path}.version")


def instance_from_dict(d: dict, path: str = "$") -> Instance:
    _check_version(d, path)
    goal = _field(d, "goal_s", int, path)
    max_chain = d.get("max_chain")
    if max_chain is not None and (isinstance(max_chain, bool) or not isinstance(max_chain, int)):
        raise FormatError("max_chain must be an integer or null", f"{path}.max_chain")
    trips = []
    for k, t in enumerate(_field(d, "trips", list, path)):
        loc = f"{path}.trips[{k}]"
        trips.append(
            Trip(_field(t, "id", int, loc), _field(t, "start_s", int, loc), _field(t, "duration_s", int, loc))
        )
    rows = _field(d, "deadhead_s", list, path)
    n = len(trips)
    if len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        shape = f"{len(rows)}x{len(rows[0]) if rows and isinstance(rows[0], list) else 0}"
        raise InputError(f"deadhead dimension {shape} does not match {n} trips")
    for r, row in enumerate(rows):
        for c, val in enumerate(row):
            if isinstance(val, bool) or not isinstance(val, int):
                raise FormatError("deadhead entries must be integers", f"{path}.deadhead_s[{r}][{c}]")
    kw = {}
    for key in ("bus_penalty", "excess_penalty"):
        if key in d:
            kw[key] = float(_field(d, key, float, path))
    return Instance(trips, np.array(rows, dtype=np.int64).reshape(n, n), goal, max_chain, **kw)


def _read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, f"{path}:{e.lineno}:{e.colno}") from None


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance)) + "\n")


def load_instance(path) -> Instance:
    return instance_from_dict(_read_json(path), str(path))


def save_schedule(schedule: Schedule, instance: Instance, path) -> None:
    d = {
        "version": FORMAT_VERSION,
        "instance_hash": instance_hash(instance),
        "tours": [list(t) for t in schedule.tours],
    }
    Path(path).write_text(json.dumps(d) + "\n")


def load_schedule(path, instance: Instance, check_hash: bool = True) -> Schedule:
    """Read a schedule and re-validate it against ``instance``.

    Validation runs before the hash check so that a schedule written for a
    different instance reports the concrete rule it breaks.
    """
    d = _read_json(path)
    _check_version(d, str(path))
    tours = _field(d, "tours", list, str(path))
    for k, t in enumerate(tours):
        if not isinstance(t, list) or any(isinstance(i, bool) or not isinstance(i, int) for i in t):
            raise FormatError("tour must be a list of trip ids", f"{path}.tours[{k}]")
    schedule = Schedule(tours)
    violations = validate_schedule(schedule, instance)
    if violations:
        raise ScheduleValidationError(violations)
    if check_hash and d.get("instance_hash") != instance_hash(instance):
        raise ScheduleValidationError(["instance hash mismatch"])
    return schedule


def params_to_dict(params: GeneratorParams) -> dict:
    d = asdict(params)
    d["bell_window"] = list(params.bell_window)
    d["n_schools_effective"] = params.schools
    return d
