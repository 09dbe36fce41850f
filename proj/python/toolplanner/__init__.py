# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the toolplanner core library."""

from ._toolplanner import *  # noqa: F401,F403
from ._toolplanner import ToolplannerError, Level, TagLevel, Registry

__all__ = [name for name in dir() if not name.startswith("_")]
