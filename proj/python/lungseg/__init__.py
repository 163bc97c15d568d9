"""Lung mask segmentation toolkit (C++ core)."""

from ._lungseg import *  # noqa: F401,F403
from ._lungseg import __doc__  # noqa: F401
