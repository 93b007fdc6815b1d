"""Pseudo-label filtering against weak annotations, label simulation and cost planning."""

from ._core import *  # noqa: F401,F403
from ._core import InputError, DimensionError  # noqa: F401

__version__ = "0.1.0"
