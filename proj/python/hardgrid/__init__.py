"""Hard-constraint point processes via hard-core discretization."""

from ._hardgrid import *  # noqa: F401,F403
from ._hardgrid import Error, ValidationError, PreconditionError, CapacityError, UndersampledError  # noqa: F401

__version__ = "0.1.0"
