"""Discrete-event evaluation of secured GPSR under attack."""

from .engine import run, step_node
from .metrics import CSV_COLUMNS, RunMetrics, metrics_csv
from .mobility import Mobility, Walker, move_nodes
from .scenario import (
    AdversarySpec,
    Scenario,
    ScenarioError,
    TrafficFlow,
    apply_overrides,
    dump_scenario,
    load_scenario,
    parse_scenario,
)

__all__ = [
    "AdversarySpec",
    "CSV_COLUMNS",
    "Mobility",
    "RunMetrics",
    "Scenario",
    "ScenarioError",
    "TrafficFlow",
    "Walker",
    "apply_overrides",
    "dump_scenario",
    "load_scenario",
    "metrics_csv",
    "move_nodes",
    "parse_scenario",
    "run",
    "step_node",
]
