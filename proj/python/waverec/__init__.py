"""Optimal detection, identification and estimation of wave patterns."""

from _waverec import *  # noqa: F401,F403
from _waverec import __version__  # noqa: F401
