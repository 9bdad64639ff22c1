"""Python access to the dispatch planning core.

Functions that exchange structured data use JSON text on the C++ side; the
wrappers here convert to and from Python objects.
"""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    IoError,
    SolverError,
    ValidationError,
    equal_count_strata,
    format_mps_number,
    k_medoids,
    percentile,
    percentile_summary,
    run_cli,
    welch_t_test,
)

__all__ = [
    "ConfigError",
    "IoError",
    "SolverError",
    "ValidationError",
    "config_echo",
    "equal_count_strata",
    "format_mps_number",
    "k_medoids",
    "percentile",
    "percentile_summary",
    "run_cli",
    "simulate",
    "solve_deterministic",
    "welch_t_test",
]


def _text(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def config_echo(path, overrides=()):
    """Resolved configuration; every leaf is {"value": ..., "source": ...}."""
    return _json.loads(_core.config_echo(str(path), list(overrides)))


def solve_deterministic(config_path, trajectory, overrides=()):
    """Optimise a plan for one trajectory (a manifest "trajectory" object).

    Returns a dict whose "plan" entry is the plan as a Python dict.
    """
    out = _core.solve_deterministic(str(config_path), _text(trajectory), list(overrides))
    out["plan"] = _json.loads(out["plan"])
    return out


def simulate(config_path, plan, trajectory, overrides=()):
    """Simulated profit breakdown and event counts of a plan on a trajectory."""
    return _core.simulate(str(config_path), _text(plan), _text(trajectory), list(overrides))
