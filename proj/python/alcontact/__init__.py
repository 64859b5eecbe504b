"""Active-learning pipeline for learned headrest contact wrenches.

The heavy lifting lives in the compiled extension; this package simply
re-exports it.
"""

from alcontact._core import *  # noqa: F401,F403
from alcontact import _core as core  # noqa: F401

__all__ = [name for name in dir(core) if not name.startswith("_")]
__version__ = "0.1.0"
