"""Coherent amplify-and-forward tracking toolkit.

Thin wrapper around the compiled extension: Kalman filtering of a
Gauss-Markov parameter observed through a coherent sensor network,
optimal gain design under sum and per-sensor power constraints, and
closed-form MSE outage analysis for equal-power transmission.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
