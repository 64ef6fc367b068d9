"""Tour-duration statistics, over-goal minutes and annual cost."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .model import CostModel, Instance, Schedule, excess, to_minutes, total_deadhead, tour_duration


@dataclass(frozen=True)
class KpiReport:
    n_tours: int
    duration_min: float
    duration_max: float
    duration_avg: float
    duration_sd: float  # population SD
    exceed_minutes: float
    exceed_count: int
    total_deadhead: float
    annual_cost: float

    def to_dict(self) -> dict:
        return asdict(self)


def kpi(schedule: Schedule, instance: Instance, cost_model: Optional[CostModel] = None) -> KpiReport:
    cm = cost_model or CostModel()
    dur = np.array([tour_duration(t, instance) for t in schedule.tours], dtype=np.int64)
    over = np.array([excess(t, instance) for t in schedule.tours], dtype=np.int64)
    if dur.size == 0:
        dur = over = np.zeros(1, dtype=np.int64)
    n = len(schedule)
    over_s = int(over.sum())
    return KpiReport(
        n_tours=n,
        duration_min=to_minutes(dur.min()),
        duration_max=to_minutes(dur.max()),
        duration_avg=to_minutes(dur.mean()),
        duration_sd=to_minutes(dur.std()),
        exceed_minutes=to_minutes(over_s),
        exceed_count=int((over > 0).sum()),
        total_deadhead=to_minutes(total_deadhead(schedule, instance)),
        annual_cost=cm.annual_bus_cost * n + cm.per_minute_year * over_s / 60,
    )


def _pct(old: float, new: float) -> Optional[float]:
    if old == new:
        return 0.0
    if old == 0:
        return None
    return round(100.0 * (new - old) / old, 1)


def compare(before: KpiReport, after: KpiReport) -> dict:
    """Old/new pairs plus percentage changes of SD and excess minutes.

    A percentage against a zero baseline is ``None``.
    """
    return {
        "old": before.to_dict(),
        "new": after.to_dict(),
        "deltas": {
            "sd_pct": _pct(before.duration_sd, after.duration_sd),
            "exceed_pct": _pct(before.exceed_minutes, after.exceed_minutes),
        },
    }


_ROWS = [
    ("tours", "n_tours", "{:d}"),
    ("min duration", "duration_min", "{:.2f}"),
    ("max duration", "duration_max", "{:.2f}"),
    ("avg duration", "duration_avg", "{:.2f}"),
    ("SD", "duration_sd", "{:.2f}"),
    ("exceeding tours", "exceed_count", "{:d}"),
    ("exceeding mins", "exceed_minutes", "{:.2f}"),
    ("deadhead mins", "total_deadhead", "{:.2f}"),
    ("annual cost", "annual_cost", "{:,.0f}"),
]


def render_table(comparison: dict) -> str:
    old, new = comparison["old"], comparison["new"]
    width = max(len(label) for label, _, _ in _ROWS)
    lines = [f"{'':<{width}}  {'old':>12}  {'new':>12}"]
    for label, key, fmt in _ROWS:
        lines.append(f"{label:<{width}}  {fmt.format(old[key]):>12}  {fmt.format(new[key]):>12}")
    for label, key in (("SD change", "sd_pct"), ("excess change", "exceed_pct")):
        val = comparison["deltas"][key]
        lines.append(f"{label:<{width}}  {'n/a' if val is None else f'{val:+.1f}%':>26}")
    return "\n".join(lines)
