"""Python access to the hoferlab core."""

import json

from ._core import (
    HoferlabError,
    __version__,
    calabi,
    canonical,
    evaluate,
    experiment_description,
    experiment_names,
    flow_point,
    length,
    minimal_period,
)
from . import _core


def error_kind(err):
    """Kind name of a HoferlabError, e.g. "SyntaxError"."""
    return str(err).split(":", 1)[0]


def run_experiment(name, grid=0, tol=None):
    return json.loads(_core.run_experiment_json(name, grid, tol))


def run_scenario(scenario):
    text = scenario if isinstance(scenario, str) else json.dumps(scenario)
    return json.loads(_core.run_scenario_json(text))


__all__ = [
    "HoferlabError",
    "__version__",
    "calabi",
    "canonical",
    "error_kind",
    "evaluate",
    "experiment_description",
    "experiment_names",
    "flow_point",
    "length",
    "minimal_period",
    "run_experiment",
    "run_scenario",
]
