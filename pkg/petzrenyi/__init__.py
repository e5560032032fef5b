"""petzrenyi -- Petz-Renyi and relative entropies of coherent excitations."""

from .chiral import HalfLineTestFunction
from .config import RunConfig
from .engine import PetzRenyiEngine
from .errors import (
    ConvergenceError,
    DomainError,
    FactorialityError,
    PetzRenyiError,
    UsageError,
)
from .spectral import AlphaGrid, SpectralMeasure
from .subspace import StandardSubspace
from .wedge import WedgeCauchyData

__version__ = "0.1.0"

__all__ = [
    "AlphaGrid",
    "ConvergenceError",
    "DomainError",
    "FactorialityError",
    "HalfLineTestFunction",
    "PetzRenyiEngine",
    "PetzRenyiError",
    "RunConfig",
    "SpectralMeasure",
    "StandardSubspace",
    "UsageError",
    "WedgeCauchyData",
]
