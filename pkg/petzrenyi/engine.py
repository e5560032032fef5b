"""Facade: PetzRenyiEngine -- single entry point that composes all layers."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from .chiral import EPSILON_LADDER, ChiralCurrent
from .fock import TruncatedFock
from .quadrature import Quadrature
from .subspace import modular_operator, renyi_entropy_of_vector
from .sweep import Sweep
from .wedge import REGULATOR, WedgeScalar

if TYPE_CHECKING:
    from .chiral import HalfLineTestFunction
    from .config import RunConfig
    from .quadrature import QuadratureResult
    from .subspace import StandardSubspace
    from .wedge import WedgeCauchyData

log = logging.getLogger(__name__)


class PetzRenyiEngine:
    """Entropy engine for coherent excitations.

    Usage::

        engine = PetzRenyiEngine(tol=1e-10)
        f = HalfLineTestFunction.bump(0.5, 1.5)
        s = engine.chiral_entropy(f, beta=1.0, alpha=0.5)
        print(s.value, s.error_estimate)
    """

    def __init__(
        self,
        tol: float = 1e-10,
        epsilons: tuple[float, ...] = EPSILON_LADDER,
        regulator: float = REGULATOR,
        strict: bool = True,
    ) -> None:
        self.quad = Quadrature(tol)
        self.chiral = ChiralCurrent(self.quad, epsilons=epsilons)
        self.wedge = WedgeScalar(self.quad, regulator=regulator)
        self.sweep = Sweep(self.quad, self.chiral, self.wedge, strict=strict)

    @classmethod
    def from_config(cls, config: RunConfig, strict: bool = True) -> PetzRenyiEngine:
        return cls(tol=config.tol, epsilons=config.epsilons, strict=strict)

    # -- convenience shortcuts -------------------------------------------

    def chiral_entropy(self, f: HalfLineTestFunction, beta: float, alpha: float) -> QuadratureResult:
        """Petz-Renyi entropy of ``W(f)`` in the thermal chiral current."""
        return self.chiral.petz_renyi_chiral(f, beta, alpha)

    def chiral_relative_entropy(self, f: HalfLineTestFunction, beta: float) -> QuadratureResult:
        return self.chiral.relative_entropy_chiral(f, beta)

    def wedge_entropy(
        self, data: WedgeCauchyData, alpha: float, method: str = "momentum"
    ) -> QuadratureResult:
        """Petz-Renyi entropy of the wedge excitation with Cauchy data ``data``."""
        return self.wedge.petz_renyi_wedge(data, alpha, method)

    def wedge_relative_entropy(self, data: WedgeCauchyData) -> QuadratureResult:
        return self.wedge.relative_entropy_wedge(data)

    def subspace_entropy(self, L: StandardSubspace, f: np.ndarray, alpha: float) -> float:
        return renyi_entropy_of_vector(L, f, alpha)

    def fock_entropy(
        self, L: StandardSubspace, f: np.ndarray, alpha: float, cutoff: int = 40
    ) -> float:
        """Brute-force value of :meth:`subspace_entropy` on a truncated Fock space."""
        M = modular_operator(L)
        return TruncatedFock(M.modes, cutoff).petz_renyi_bruteforce(M, f, alpha)
