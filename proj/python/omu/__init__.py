"""Banked-octree occupancy mapping engine.

Thin wrapper over the compiled extension; everything lives in `omu._core`.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401
from ._core import __version__  # noqa: F401
