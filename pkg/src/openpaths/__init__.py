"""Compositional algebraic path problems and open Petri-net reachability."""
from .cospan import *  # noqa: F401,F403
from .errors import (  # noqa: F401
    BoundaryMismatchError,
    DimensionMismatchError,
    NonConvergenceError,
    NotFunctionalError,
    OpenPathsError,
    ParseError,
    QuantaleMismatchError,
)
from .matrix import *  # noqa: F401,F403
from .netgraph import *  # noqa: F401,F403
from .pathsolve import *  # noqa: F401,F403
from .qnet import *  # noqa: F401,F403
from .quantale import *  # noqa: F401,F403

__version__ = "0.1.0"
