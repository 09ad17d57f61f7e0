"""Structural equation exploratory regression.

Thin re-export of the compiled extension; see ``run_config`` for the
configuration-file workflow and ``a3`` / ``b2`` / ``backward_select`` for
in-memory fits.
"""

from ._seer import *  # noqa: F401,F403
from ._seer import SeerError, __doc__  # noqa: F401

__version__ = "0.1.0"
