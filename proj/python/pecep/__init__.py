"""Prediction-error conditional entropy proxies for time-series complexity ranking."""

from pecep._core import *  # noqa: F401,F403
from pecep._core import __version__  # noqa: F401
