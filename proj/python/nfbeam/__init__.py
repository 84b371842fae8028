"""Near-field predictive beamforming and tracking simulator.

Configurations are plain dicts with the same layout as the CLI's JSON
files; any subset of keys may be given and the rest keep their defaults.
"""

import json

from . import _nfbeam
from ._nfbeam import ConfigError, moving_average

__all__ = [
    "ConfigError",
    "checks",
    "converge",
    "default_config",
    "moving_average",
    "mrt_throughput",
    "opt_beamformer",
    "resolve_config",
    "steering_vector",
    "sweep_power",
    "track",
]


def _text(config):
    return json.dumps(config or {})


def default_config():
    return json.loads(_nfbeam.default_config())


def resolve_config(config=None, overrides=()):
    """Fill in defaults, apply "dotted.key=value" overrides and validate."""
    return json.loads(_nfbeam.resolve_config(_text(config), list(overrides)))


def track(config=None):
    """Closed-loop run. Returns (metrics, summary); metrics maps column
    names to numpy arrays with one entry per CPI."""
    return _nfbeam.track(_text(config))


def sweep_power(config=None, powers=(10, 20, 30, 40), methods=("ekf", "agdao")):
    return _nfbeam.sweep_power(_text(config), list(powers), list(methods))


def converge(config=None, variants=("plain-gd", "adam-joint", "adam-ao")):
    return _nfbeam.converge(_text(config), list(variants))


def checks(config=None):
    return _nfbeam.checks(_text(config))


def steering_vector(x, y, config=None):
    return _nfbeam.steering_vector(_text(config), x, y)


def opt_beamformer(state, n, config=None):
    return _nfbeam.opt_beamformer(_text(config), list(state), n)


def mrt_throughput(state, config=None):
    return _nfbeam.mrt_throughput(_text(config), list(state))
