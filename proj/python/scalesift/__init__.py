from ._scalesift import *  # noqa: F401,F403
from ._scalesift import __version__  # noqa: F401
