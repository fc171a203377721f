"""Interbank contagion simulator with credit-default-swap risk transfer."""

from ._contagion import *  # noqa: F401,F403
from ._contagion import __version__  # noqa: F401
