"""Command bodies behind the ``disco`` command line."""

from .discover import cmd_discover
from .genbk import cmd_genbk
from .learn import cmd_learn
from .rulespace import cmd_rulespace
from .scale import cmd_scale
from .sweep import cmd_sweep

__all__ = [
    "cmd_discover",
    "cmd_genbk",
    "cmd_learn",
    "cmd_rulespace",
    "cmd_scale",
    "cmd_sweep",
]
