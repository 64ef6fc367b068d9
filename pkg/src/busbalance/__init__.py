"""Minimum-fleet school bus blocking with matching-based tour balancing."""

__version__ = "0.1.0"

from .assignment import CostMatrix, Matching, min_cost_max_cardinality, min_weight_perfect_matching
from .balancing import StrippedView, balance_cost, rebalance, strip
from .blocking import LinkGraph, block, build_link_graph
from .errors import (
    FormatError,
    InfeasibleMatchingError,
    InputError,
    ScheduleValidationError,
)
from .instances import (
    GeneratorParams,
    generate,
    load_instance,
    load_schedule,
    preset,
    save_instance,
    save_schedule,
)
from .kpi import KpiReport, compare, kpi, render_table
from .mip import MipModel, OracleResult, build_mip, exact_solve_small, export_lp
from .model import (
    CostModel,
    Instance,
    Schedule,
    Trip,
    Violation,
    compatible,
    excess,
    minutes,
    to_minutes,
    tour_duration,
    validate_schedule,
)
