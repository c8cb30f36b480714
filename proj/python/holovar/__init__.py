"""Moduli of flat connections on nonorientable surfaces and their double covers.

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from holovar._core import *  # noqa: F401,F403
from holovar._core import __version__  # noqa: F401
