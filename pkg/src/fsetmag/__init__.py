"""Exact magnitude and magnitude homology of filtered-set enriched categories."""

from .errors import (FsetmagError, HorizonError, NotInvertibleError, PreconditionError, ResourceError,
                     StrategyError, UsageError, ValidationError)
from .fcat import FCat, Functor, from_graph, from_metric, product
from .magnitude import coweighting, magnitude, weighting, zeta_inverse, zeta_matrix
from .novikov import NSeries

__version__ = "0.1.0"

__all__ = [
    "FCat", "Functor", "NSeries", "from_graph", "from_metric", "product",
    "magnitude", "weighting", "coweighting", "zeta_matrix", "zeta_inverse",
    "FsetmagError", "UsageError", "ValidationError", "PreconditionError", "StrategyError",
    "NotInvertibleError", "HorizonError", "ResourceError",
]
