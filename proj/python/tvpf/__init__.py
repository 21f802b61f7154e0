"""Joint state and time-varying source estimation for 1D PDEs with a particle filter.

Configs are plain dicts with the same layout as the JSON files under
``configs/``. Array results come back as NumPy arrays.
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping, Optional, Union

from ._core import DegenerateWeightsError, IoError, ValidationError
from . import _core

__all__ = [
    "DegenerateWeightsError",
    "IoError",
    "ValidationError",
    "canned_config",
    "load_config",
    "data_hash",
    "simulate",
    "estimate",
    "run_experiment",
    "simulate_to",
    "estimate_to",
    "report_to",
]

Config = Union[Mapping[str, Any], str]
PathLike = Union[str, os.PathLike]


def _text(config: Config) -> str:
    return config if isinstance(config, str) else json.dumps(config)


def canned_config(name: str) -> dict:
    """Built-in experiment: ``"advection_logistic"`` or ``"heat_sine"``."""
    return json.loads(_core.canned_config(name))


def load_config(path: PathLike) -> dict:
    """Read and validate a JSON config, filling in defaults."""
    with open(path, encoding="utf-8") as fh:
        return json.loads(_core.normalize_config(fh.read()))


def data_hash(config: Config) -> str:
    return _core.data_hash(_text(config))


def simulate(config: Config, seed: Optional[int] = None) -> dict:
    """Truth field, theta and noisy observations.

    Keys: times, state_x, truth, theta, obs_x, observations, sigma_noise.
    """
    return _core.simulate(_text(config), seed)


def estimate(config: Config, observations, seed: Optional[int] = None) -> dict:
    """Filter a ``J x m`` observation matrix.

    Band arrays (``theta``, ``sigma_e``) have columns mean, lo95, lo68, hi68, hi95.
    """
    return _core.estimate(_text(config), observations, seed)


def run_experiment(config: Config, seed: Optional[int] = None) -> dict:
    """Simulate, filter and score; ``metrics`` is a parsed dict."""
    out = _core.run_experiment(_text(config), seed)
    out["metrics"] = json.loads(out.pop("metrics_json"))
    return out


def simulate_to(config: Config, out: PathLike, seed: Optional[int] = None) -> None:
    _core.simulate_to(_text(config), os.fspath(out), seed)


def estimate_to(config: Config, data: PathLike, out: PathLike,
                seed: Optional[int] = None, ignore_hash: bool = False) -> None:
    _core.estimate_to(_text(config), os.fspath(data), os.fspath(out), seed, ignore_hash)


def report_to(data: PathLike, est: PathLike, out: PathLike, plots: bool = False) -> dict:
    return json.loads(_core.report_to(os.fspath(data), os.fspath(est), os.fspath(out), plots))
