"""Layer 4: High-level sweep routines.

Each method drives one model layer over a grid of Renyi parameters or
temperatures and returns tabulated results ready for CSV export.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .quadrature import QuadratureResult
from .spectral import AlphaGrid
from .subspace import entropy_of_vector, modular_operator, renyi_entropy_of_vector

if TYPE_CHECKING:
    from .chiral import ChiralCurrent, HalfLineTestFunction
    from .fock import TruncatedFock
    from .quadrature import ExtrapolationLadder, Quadrature
    from .subspace import StandardSubspace
    from .wedge import WedgeCauchyData, WedgeScalar

log = logging.getLogger(__name__)

Evaluator = Callable[[float], QuadratureResult]

LADDER_SPREAD = 1e-3
WEDGE_LADDER_K = (5, 9)
SLOPE_STEPS = (0.03, 0.015, 0.0075, 0.00375)


@dataclass(frozen=True)
class EntropyCurve:
    """``S_alpha`` on a grid, with error bars and the ``alpha -> 1`` endpoint."""

    model: str
    alphas: tuple[float, ...]
    values: np.ndarray
    errors: np.ndarray
    converged: tuple[bool, ...]
    endpoint: float | None = None
    endpoint_error: float = 0.0

    @property
    def all_converged(self) -> bool:
        return all(self.converged)

    def is_monotone(self, tol: float = 0.0) -> bool:
        """Non-decreasing in alpha up to the combined error bars."""
        slack = self.errors[:-1] + self.errors[1:] + tol
        return bool(np.all(np.diff(self.values) >= -slack))

    def is_bounded(self, tol: float = 0.0) -> bool:
        """Every value at most the endpoint (plus error bars)."""
        if self.endpoint is None:
            return True
        return bool(np.all(self.values <= self.endpoint + self.errors + self.endpoint_error + tol))

    def rows(self) -> list[tuple[float, float, float]]:
        return [(a, float(v), float(e)) for a, v, e in zip(self.alphas, self.values, self.errors)]


class Sweep:
    """Parameter sweeps over the model layers.

    Parameters
    ----------
    quad : Quadrature
        Shared integration engine (for extrapolation).
    chiral, wedge : ChiralCurrent, WedgeScalar
        Model layers.
    strict : bool
        Raise ``ConvergenceError`` for any point that missed its tolerance.
    """

    def __init__(
        self,
        quad: Quadrature,
        chiral: ChiralCurrent,
        wedge: WedgeScalar,
        strict: bool = True,
    ) -> None:
        self._quad = quad
        self._chiral = chiral
        self._wedge = wedge
        self.strict = strict

    # -- generic ---------------------------------------------------------

    def alpha_curve(
        self,
        evaluate: Evaluator,
        grid: AlphaGrid,
        model: str,
        endpoint: QuadratureResult | None = None,
    ) -> EntropyCurve:
        """Evaluate ``S_alpha`` on every grid point."""
        results = []
        for alpha in grid:
            res = evaluate(alpha)
            if self.strict:
                res.require(f"{model} S_{alpha:g}")
            results.append(res)
        curve = EntropyCurve(
            model=model,
            alphas=tuple(grid),
            values=np.array([float(np.real(r.value)) for r in results]),
            errors=np.array([r.error_estimate for r in results]),
            converged=tuple(r.converged for r in results),
            endpoint=None if endpoint is None else float(endpoint.value),
            endpoint_error=0.0 if endpoint is None else endpoint.error_estimate,
        )
        if not curve.is_monotone():
            log.warning("%s curve is not monotone within its error bars", model)
        if not curve.is_bounded():
            log.warning("%s curve exceeds its alpha -> 1 endpoint", model)
        return curve

    def alpha_ladder(self, evaluate: Evaluator, k_first: int, k_last: int) -> ExtrapolationLadder:
        """Extrapolate ``S_alpha`` to ``alpha -> 1`` along ``alpha = 1 - 2**-k``.

        The rungs are reported as divergence diagnostics: a ladder whose
        values keep growing geometrically has no finite limit.  The
        returned ladder carries ``warning`` when its spread exceeds
        ``LADDER_SPREAD`` relative to the limit, which marks rungs
        outside the asymptotic regime.
        """
        alphas = AlphaGrid.dyadic(k_first, k_last)
        h = [1.0 - a for a in alphas]
        rungs = [evaluate(a) for a in alphas]
        values = [float(np.real(r.value)) for r in rungs]
        ladder = self._quad.richardson_limit(h, values, [r.error_estimate for r in rungs])
        steps = np.diff(values)
        if steps.size >= 2 and np.all(steps > 0) and steps[-1] > 0.9 * steps[-2]:
            log.warning("alpha ladder increments are not shrinking: %s", steps)
        log.info("alpha -> 1 ladder %s -> %.12g (spread %.2e)", values, ladder.extrapolated, ladder.spread)
        return self._flag_spread(ladder, "alpha -> 1")

    @staticmethod
    def _flag_spread(ladder: ExtrapolationLadder, what: str) -> ExtrapolationLadder:
        limit = abs(ladder.extrapolated)
        rel = ladder.spread / limit if limit > 0 else ladder.spread
        if rel > LADDER_SPREAD and ladder.spread > ladder.propagated_error:
            log.warning("%s ladder is pre-asymptotic: relative spread %.2e", what, rel)
            return replace(ladder, warning=True)
        return ladder

    # -- chiral ----------------------------------------------------------

    def chiral_alpha_curve(
        self, f: HalfLineTestFunction, beta: float, grid: AlphaGrid
    ) -> EntropyCurve:
        grid.interior()
        endpoint = self._chiral.relative_entropy_chiral(f, beta)
        return self.alpha_curve(
            lambda a: self._chiral.petz_renyi_chiral(f, beta, a), grid, "chiral", endpoint
        )

    def chiral_alpha_ladder(
        self, f: HalfLineTestFunction, beta: float, k_first: int = 3, k_last: int = 7
    ) -> ExtrapolationLadder:
        return self.alpha_ladder(lambda a: self._chiral.petz_renyi_chiral(f, beta, a), k_first, k_last)

    def chiral_alpha_slope(
        self, f: HalfLineTestFunction, beta: float, steps: Sequence[float] = SLOPE_STEPS
    ) -> ExtrapolationLadder:
        """``dS_alpha/dalpha`` at ``alpha = 1`` from finite differences.

        Secants ``(S_1 - S_(1-h)) / h`` against the closed-form endpoint
        are extrapolated to ``h = 0``; the first secant of the default
        steps is the slope at ``alpha = 0.985``.
        """
        top = self._chiral.relative_entropy_chiral(f, beta)
        secants, errors = [], []
        for h in steps:
            res = self._chiral.petz_renyi_chiral(f, beta, 1.0 - h)
            if self.strict:
                res.require(f"chiral S_{1.0 - h:g}")
            secants.append((top.value - res.value) / h)
            errors.append((top.error_estimate + res.error_estimate) / h)
        ladder = self._quad.richardson_limit(steps, secants, errors)
        log.info("secant slopes %s -> %.12g", secants, ladder.extrapolated)
        return self._flag_spread(ladder, "secant slope")

    def beta_sweep(
        self, f: HalfLineTestFunction, betas: Sequence[float]
    ) -> list[tuple[float, float, float]]:
        """Rows ``(beta, relative entropy, d/dbeta relative entropy)``."""
        rows = []
        for beta in sorted(betas):
            s = self._chiral.relative_entropy_chiral(f, beta)
            ds = self._chiral.beta_derivative_relative_entropy(f, beta)
            if self.strict:
                s.require(f"relative entropy at beta={beta:g}")
                ds.require(f"beta derivative at beta={beta:g}")
            if ds.value < -ds.error_estimate:
                log.warning("negative beta derivative %.3e at beta=%g", ds.value, beta)
            rows.append((float(beta), float(s.value), float(ds.value)))
        values = [r[1] for r in rows]
        if any(b < a for a, b in zip(values, values[1:])):
            log.warning("relative entropy is not monotone in beta")
        return rows

    # -- wedge -----------------------------------------------------------

    def wedge_alpha_curve(
        self, data: WedgeCauchyData, grid: AlphaGrid, method: str = "momentum"
    ) -> EntropyCurve:
        grid.interior()
        endpoint = self._wedge.relative_entropy_wedge(data)
        return self.alpha_curve(
            lambda a: self._wedge.petz_renyi_wedge(data, a, method), grid, "wedge", endpoint
        )

    def wedge_alpha_ladder(
        self, data: WedgeCauchyData, k_first: int = WEDGE_LADDER_K[0], k_last: int = WEDGE_LADDER_K[1]
    ) -> ExtrapolationLadder:
        """Wedge ``alpha -> 1`` ladder.

        The continued kernel damps like ``exp(-sin(pi alpha) omega x)``,
        so rungs with ``sin(pi alpha) x omega`` of order one are not yet in
        the Taylor regime; the default range starts at ``k = 5``.
        """
        return self.alpha_ladder(lambda a: self._wedge.petz_renyi_wedge(data, a), k_first, k_last)

    # -- finite modes ------------------------------------------------------

    def subspace_table(
        self,
        L: StandardSubspace,
        f: np.ndarray,
        grid: AlphaGrid,
        fock: TruncatedFock | None = None,
    ) -> list[tuple[float, float, float, float]]:
        """Rows ``(alpha, spectral, fock, |difference|)``.

        The Fock column is ``nan`` when no truncated space is supplied.
        """
        M = modular_operator(L)
        rows = []
        for alpha in grid:
            exact = renyi_entropy_of_vector(L, f, alpha)
            brute = math.nan if fock is None else fock.petz_renyi_bruteforce(M, f, alpha)
            rows.append((alpha, exact, brute, abs(exact - brute)))
        log.info("subspace entropy S = %.12g", entropy_of_vector(L, f))
        return rows
