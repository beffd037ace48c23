"""Sofic entropy, boundary laws and Gibbs dynamics over random regular graphs."""

from _soficlab import *  # noqa: F401,F403
from _soficlab import __doc__  # noqa: F401

__version__ = "0.1.0"
