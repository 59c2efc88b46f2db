from ._zeno import *  # noqa: F401,F403
from ._zeno import __doc__, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]
