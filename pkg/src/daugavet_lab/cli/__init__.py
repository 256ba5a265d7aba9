"""Scenario registry, runner and command-line driver."""

from .report import Report, Scenario, emit_report, run_scenario
from .scenarios import get_scenario, list_scenarios, registry

__all__ = ["Report", "Scenario", "emit_report", "run_scenario", "get_scenario", "list_scenarios",
           "registry"]
