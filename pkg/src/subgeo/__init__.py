"""subgeo: numerical residual checks for metric splittings, dual
connections, and tangent-bundle lifts on charted manifolds."""

__version__ = "0.1.0"

from .errors import (
    BoundaryExit,
    ConfigError,
    ContractViolation,
    EvalDomain,
    ExprSyntaxError,
    RankDrop,
    SingularMatrix,
    SubgeoError,
)
from .jets import Jet

__all__ = [
    "__version__",
    "Jet",
    "SubgeoError",
    "ContractViolation",
    "SingularMatrix",
    "EvalDomain",
    "ExprSyntaxError",
    "RankDrop",
    "BoundaryExit",
    "ConfigError",
]
