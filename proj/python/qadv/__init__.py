"""Statevector laboratory for adversarial attacks on quantum classifiers."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
