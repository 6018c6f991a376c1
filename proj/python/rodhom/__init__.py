"""Python access to the rod homogenisation library.

Configurations are plain dictionaries with the same keys as the JSON files
accepted by the ``rodhom`` command-line tool.
"""

import json

from . import _core
from ._core import InvalidArgument, RodhomError, isotropic_rod_tensor, saint_venant_torsion

__all__ = [
    "InvalidArgument",
    "RodhomError",
    "default_config",
    "homogenize",
    "identities",
    "isotropic_rod_tensor",
    "rates",
    "saint_venant_torsion",
    "spectrum",
]


def _dump(config):
    return "" if config is None else json.dumps(config)


def default_config():
    return json.loads(_core.default_config())


def normalise_config(config):
    return json.loads(_core.normalise_config(_dump(config)))


def homogenize(config=None):
    return json.loads(_core.homogenize(_dump(config)))


def rates(config=None, order=0):
    return json.loads(_core.rates(_dump(config), order))


def spectrum(config=None):
    return json.loads(_core.spectrum(_dump(config)))


def identities(config=None, N=8):
    return json.loads(_core.identities(_dump(config), N))
