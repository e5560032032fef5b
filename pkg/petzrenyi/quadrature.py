"""Layer 1: numerical integration engine.

Every other layer receives a ``Quadrature`` instance and never calls a
quadrature rule directly.  All routines are deterministic: panels are
refined in a fixed order and partial results are accumulated sorted by
position.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence, Union

import numpy as np

from .errors import ConvergenceError, DomainError

log = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], Any]
Weight = Union[None, str, tuple]

_EPS = np.finfo(float).eps

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15), positive half.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_GK_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_GK_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_G7_WEIGHTS = np.zeros(15)
_G7_WEIGHTS[[1, 3, 5]] = _WG[:3]
_G7_WEIGHTS[7] = _WG[3]
_G7_WEIGHTS[[13, 11, 9]] = _WG[:3]


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an integral together with an honest error bound.

    ``value`` may be real, complex or an array for vector-valued
    integrands; ``error_estimate`` is then the max-norm bound.
    """

    value: Any
    error_estimate: float
    evaluations: int
    converged: bool

    def __add__(self, other: QuadratureResult) -> QuadratureResult:
        return QuadratureResult(
            value=self.value + other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )

    def scaled(self, factor: complex) -> QuadratureResult:
        """Multiply the value (and error bound) by a constant."""
        return QuadratureResult(
            value=self.value * factor,
            error_estimate=self.error_estimate * abs(factor),
            evaluations=self.evaluations,
            converged=self.converged,
        )

    def require(self, what: str) -> QuadratureResult:
        """Return ``self`` or raise ``ConvergenceError`` naming *what*."""
        if not self.converged:
            raise ConvergenceError(
                f"{what}: quadrature did not converge "
                f"(error estimate {self.error_estimate:.3e})",
                result=self,
            )
        return self


@dataclass(frozen=True)
class ExtrapolationLadder:
    """Sequence of approximations at shrinking parameter and its limit.

    Attributes
    ----------
    parameters : np.ndarray
        Strictly decreasing positive step parameters ``h_k``.
    values : np.ndarray
        Approximations at each ``h_k``.
    extrapolated : float
        Neville-table value at ``h = 0``.
    spread : float
        Distance between the last two diagonal extrapolants.
    propagated_error : float
        Rung errors pushed through the extrapolation weights.
    warning : bool
        Set when the diagonal of the table stops contracting.
    """

    parameters: np.ndarray
    values: np.ndarray
    extrapolated: Any
    spread: float
    propagated_error: float = 0.0
    warning: bool = False
    diagonal: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def error_estimate(self) -> float:
        return self.spread + self.propagated_error


# -- module helpers -------------------------------------------------------


def _broadcast_like(fx: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Give a (possibly scalar) integrand result the node-array shape."""
    fx = np.asarray(fx)
    if fx.shape[: len(shape)] != shape:
        fx = np.broadcast_to(fx, shape)
    return fx


def _expand(jac: np.ndarray, fx: np.ndarray) -> np.ndarray:
    return jac.reshape(jac.shape + (1,) * (fx.ndim - jac.ndim))


def _max_abs(x: Any) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def _weight_function(weight: Weight) -> Callable[[np.ndarray], np.ndarray] | None:
    if weight is None:
        return None
    if weight == "log":
        return np.log
    if isinstance(weight, tuple) and len(weight) == 2 and weight[0] == "algebraic":
        gamma = float(weight[1])
        if gamma <= -1.0:
            raise DomainError(f"algebraic weight exponent must exceed -1, got {gamma}")
        return lambda r: r**gamma
    raise DomainError(f"unknown weight {weight!r}")


def _tanh_sinh_abscissae(level: int, t_max: float) -> np.ndarray:
    """Nodes added at refinement *level* (step ``2**-level``)."""
    if level == 0:
        n = int(math.floor(t_max))
        return np.arange(-n, n + 1, dtype=float)
    h = 2.0**-level
    k = np.arange(1, int(math.floor(t_max / h)) + 1, 2, dtype=float)
    t = k * h
    return np.concatenate([-t[::-1], t])


def _tanh_sinh_map(t: np.ndarray, length: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Offsets from both endpoints and the Jacobian of the tanh-sinh map.

    Offsets are computed directly so that points near an endpoint keep
    full relative precision.
    """
    s = 0.5 * np.pi * np.sinh(t)
    e = np.exp(-2.0 * np.abs(s))
    near = length * e / (1.0 + e)
    far = length / (1.0 + e)
    off_a = np.where(s < 0, near, far)
    off_b = np.where(s < 0, far, near)
    dxdt = length * np.pi * np.cosh(t) * e / (1.0 + e) ** 2
    return off_a, off_b, dxdt


class Quadrature:
    """Adaptive integration rules with embedded error estimates.

    Parameters
    ----------
    tol : float
        Default absolute tolerance.
    limit : int
        Maximum number of Gauss-Kronrod subintervals per integral.
    max_levels : int
        Maximum tanh-sinh refinement level (step ``2**-max_levels``).
    """

    def __init__(
        self,
        tol: float = 1e-10,
        limit: int = 2000,
        max_levels: int = 8,
    ) -> None:
        if tol <= 0:
            raise DomainError(f"tolerance must be positive, got {tol}")
        self.tol = tol
        self.limit = limit
        self.max_levels = max_levels

    # -- Gauss-Kronrod ---------------------------------------------------

    @staticmethod
    def _gk15(
        integrand: Integrand, left: np.ndarray, right: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Apply the 7/15 pair to every interval at once."""
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        x = mid[:, None] + half[:, None] * _GK_NODES
        fx = _broadcast_like(integrand(x), x.shape)
        fx = fx.reshape(x.shape + (-1,))
        resk = np.einsum("j,mjk->mk", _GK_WEIGHTS, fx)
        resg = np.einsum("j,mjk->mk", _G7_WEIGHTS, fx)
        mean = 0.5 * resk
        resasc = np.einsum("j,mjk->mk", _GK_WEIGHTS, np.abs(fx - mean[:, None, :]))
        resabs = np.einsum("j,mjk->mk", _GK_WEIGHTS, np.abs(fx))
        h = np.abs(half)[:, None]
        value = resk * half[:, None]
        err = np.abs(resk - resg) * h
        resasc = resasc * h
        resabs = resabs * h
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
        err = np.where((resasc != 0) & (err != 0), scaled, err)
        err = np.maximum(err, 50.0 * _EPS * resabs)
        return value, err.max(axis=1)

    def _adaptive_kronrod(
        self,
        integrand: Integrand,
        points: np.ndarray,
        tol: float,
        rtol: float,
    ) -> QuadratureResult:
        left, right = points[:-1].copy(), points[1:].copy()
        values, errors = self._gk15(integrand, left, right)
        evaluations = 15 * left.size
        while True:
            total = values.sum(axis=0)
            goal = max(tol, rtol * _max_abs(total))
            total_err = float(errors.sum())
            if total_err <= goal or left.size >= self.limit:
                break
            order = np.argsort(-errors, kind="stable")
            rest = total_err - np.cumsum(errors[order])
            hits = np.flatnonzero(rest <= 0.5 * goal)
            n_split = int(hits[0]) + 1 if hits.size else order.size
            n_split = max(1, min(n_split, self.limit - left.size))
            split = order[:n_split]
            keep = np.ones(left.size, dtype=bool)
            keep[split] = False
            mids = 0.5 * (left[split] + right[split])
            new_left = np.concatenate([left[split], mids])
            new_right = np.concatenate([mids, right[split]])
            new_values, new_errors = self._gk15(integrand, new_left, new_right)
            evaluations += 15 * new_left.size
            left = np.concatenate([left[keep], new_left])
            right = np.concatenate([right[keep], new_right])
            values = np.concatenate([values[keep], new_values])
            errors = np.concatenate([errors[keep], new_errors])
        idx = np.argsort(left, kind="stable")
        value = values[idx].sum(axis=0)
        err = float(errors.sum())
        converged = err <= max(tol, rtol * _max_abs(value))
        if not converged:
            log.warning(
                "Gauss-Kronrod exhausted %d subintervals (error %.3e, goal %.3e)",
                left.size, err, tol,
            )
        else:
            log.debug("Gauss-Kronrod converged on %d subintervals", left.size)
        return QuadratureResult(
            value=value if value.size > 1 else value.reshape(()).item(),
            error_estimate=err,
            evaluations=evaluations,
            converged=converged,
        )

    # -- tanh-sinh --------------------------------------------------------

    def _tanh_sinh(
        self,
        integrand: Integrand,
        a: float,
        b: float,
        tol: float,
        weight: Weight,
        t_max: float = 6.0,
    ) -> QuadratureResult:
        wfun = _weight_function(weight)
        length = b - a
        acc = 0.0
        acc_abs = 0.0
        estimates: list[Any] = []
        evaluations = 0
        err = math.inf
        converged = False
        for level in range(self.max_levels + 1):
            t = _tanh_sinh_abscissae(level, t_max)
            off_a, off_b, dxdt = _tanh_sinh_map(t, length)
            keep = (off_a > 0) & (off_b > 0) & (dxdt > 0)
            x = np.where(t < 0, a + off_a, b - off_b)[keep]
            fx = _broadcast_like(integrand(x), x.shape)
            if wfun is not None:
                fx = fx * _expand(wfun(off_a[keep]), fx)
            evaluations += x.size
            acc = acc + np.tensordot(dxdt[keep], fx, axes=(0, 0))
            acc_abs = acc_abs + np.tensordot(dxdt[keep], np.abs(fx), axes=(0, 0))
            h = 2.0**-level
            estimates.append(h * acc)
            if level >= 2:
                err = max(
                    _max_abs(estimates[-1] - estimates[-2]),
                    50.0 * _EPS * _max_abs(h * acc_abs),
                )
                if err <= tol:
                    converged = True
                    break
        if not converged:
            log.warning("tanh-sinh stopped at level %d (error %.3e)", self.max_levels, err)
        else:
            log.debug("tanh-sinh converged at level %d", level)
        value = estimates[-1]
        return QuadratureResult(
            value=value.item() if np.ndim(value) == 0 else value,
            error_estimate=float(err),
            evaluations=evaluations,
            converged=converged,
        )

    # -- public rules -----------------------------------------------------

    def integrate_1d(
        self,
        integrand: Integrand,
        interval: tuple[float, float],
        tol: float | None = None,
        *,
        weight: Weight = None,
        rule: str = "auto",
        points: Sequence[float] = (),
        rtol: float = 0.0,
    ) -> QuadratureResult:
        """Integrate ``w(x - a) * integrand(x)`` over ``interval``.

        Parameters
        ----------
        integrand : callable
            Vectorised function of an ndarray of abscissae.  May return
            complex values or carry extra trailing axes.
        interval : (a, b)
            Integration limits; either may be infinite when ``weight`` is
            ``None``.
        tol : float, optional
            Absolute tolerance; defaults to ``self.tol``.
        weight : None, ``"log"`` or ``("algebraic", gamma)``
            Declared endpoint singularity at ``a``: ``ln(x - a)`` or
            ``(x - a)**gamma`` with ``gamma > -1``.
        rule : ``"auto"``, ``"kronrod"`` or ``"tanh-sinh"``
            ``"auto"`` picks Gauss-Kronrod for unweighted integrals and
            tanh-sinh otherwise.
        points : sequence of float
            Interior breakpoints for the initial Gauss-Kronrod partition.

        Returns
        -------
        QuadratureResult
        """
        tol = self.tol if tol is None else tol
        a, b = float(interval[0]), float(interval[1])
        if math.isnan(a) or math.isnan(b):
            raise DomainError("integration limits must not be NaN")
        if a == b:
            return QuadratureResult(0.0, 0.0, 0, True)
        if a > b:
            return self.integrate_1d(
                integrand, (b, a), tol, weight=weight, rule=rule, points=points, rtol=rtol
            ).scaled(-1.0)
        if rule == "auto":
            rule = "kronrod" if weight is None else "tanh-sinh"
        if rule == "tanh-sinh":
            if math.isinf(a) or math.isinf(b):
                raise DomainError("tanh-sinh rule needs a finite interval")
            return self._tanh_sinh(integrand, a, b, tol, weight)
        if rule != "kronrod":
            raise DomainError(f"unknown rule {rule!r}")
        if weight is not None:
            raise DomainError("weighted integrals use the tanh-sinh rule")

        if math.isinf(a) and math.isinf(b):
            mapped = self._map_real_line(integrand)
            return self._adaptive_kronrod(mapped, np.array([-1.0, 0.0, 1.0]), tol, rtol)
        if math.isinf(b):
            mapped = self._map_half_line(integrand, a, 1.0)
            return self._adaptive_kronrod(mapped, np.array([0.0, 1.0]), tol, rtol)
        if math.isinf(a):
            mapped = self._map_half_line(integrand, b, -1.0)
            return self._adaptive_kronrod(mapped, np.array([0.0, 1.0]), tol, rtol)

        inner = sorted(p for p in points if a < p < b)
        grid = np.array([a, *inner, b], dtype=float)
        return self._adaptive_kronrod(integrand, grid, tol, rtol)

    @staticmethod
    def composite_nodes(
        interval: tuple[float, float], panels: int
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nodes and Kronrod / embedded Gauss weights of a composite 15-point rule.

        Used for fixed-grid transforms whose integrand is known to be
        resolved once every panel spans at most a couple of oscillations.
        """
        a, b = float(interval[0]), float(interval[1])
        if panels < 1 or not b > a:
            raise DomainError("composite rule needs panels >= 1 and a < b")
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * (edges[1] - edges[0])
        x = (0.5 * (edges[:-1] + edges[1:]))[:, None] + half * _GK_NODES
        wk = np.tile(_GK_WEIGHTS, panels) * half
        wg = np.tile(_G7_WEIGHTS, panels) * half
        return x.ravel(), wk, wg

    @staticmethod
    def _map_half_line(integrand: Integrand, origin: float, sign: float) -> Integrand:
        def mapped(t: np.ndarray) -> np.ndarray:
            x = origin + sign * t / (1.0 - t)
            fx = _broadcast_like(integrand(x), x.shape)
            return fx * _expand(1.0 / (1.0 - t) ** 2, fx)

        return mapped

    @staticmethod
    def _map_real_line(integrand: Integrand) -> Integrand:
        def mapped(t: np.ndarray) -> np.ndarray:
            x = t / (1.0 - t * t)
            fx = _broadcast_like(integrand(x), x.shape)
            jac = (1.0 + t * t) / (1.0 - t * t) ** 2
            return fx * _expand(jac, fx)

        return mapped

    def integrate_2d_diag_log(
        self,
        integrand: Callable[[np.ndarray, np.ndarray], Any],
        square: tuple[float, float],
        tol: float | None = None,
        *,
        coordinates: str = "uv",
        panels: int = 8,
        max_panels: int = 256,
    ) -> QuadratureResult:
        """Integrate over ``square x square`` with a log-singular diagonal.

        The square is split along ``u = v`` and rotated to
        ``u = s + d/2``, ``v = s - d/2``.  The transverse ``d`` integral
        runs over ``[0, b - a]`` with the tanh-sinh rule, which absorbs the
        logarithm at ``d = 0``; the longitudinal ``s`` integral uses
        composite Gauss-Kronrod panels.  Both argument orders are summed,
        so the integrand need not be symmetric.

        Parameters
        ----------
        integrand : callable
            ``integrand(u, v)`` when ``coordinates="uv"``;
            ``integrand(s, d)`` (with ``d = u - v`` of either sign) when
            ``coordinates="sd"``.
        square : (a, b)
            Side of the integration square.
        panels : int
            Initial number of longitudinal panels; doubled while the
            longitudinal error exceeds half the tolerance.
        """
        tol = self.tol if tol is None else tol
        a, b = float(square[0]), float(square[1])
        if not b > a:
            raise DomainError(f"empty integration square ({a}, {b})")
        if coordinates not in ("uv", "sd"):
            raise DomainError(f"unknown coordinates {coordinates!r}")

        total_evals = 0
        result = None
        while True:
            result = self._diag_pass(integrand, a, b, tol, coordinates, panels)
            total_evals += result[3]
            value, outer_err, inner_err, _, outer_ok = result
            if inner_err <= 0.5 * tol or panels >= max_panels:
                break
            panels *= 2
            log.debug("2D diagonal rule: doubling longitudinal panels to %d", panels)
        err = outer_err + inner_err
        converged = outer_ok and err <= tol
        if not converged:
            log.warning(
                "2D diagonal rule missed tolerance (outer %.3e, inner %.3e)",
                outer_err, inner_err,
            )
        return QuadratureResult(
            value=value.item() if np.ndim(value) == 0 else value,
            error_estimate=float(err),
            evaluations=total_evals,
            converged=converged,
        )

    def _diag_pass(
        self,
        integrand: Callable[[np.ndarray, np.ndarray], Any],
        a: float,
        b: float,
        tol: float,
        coordinates: str,
        panels: int,
        t_max: float = 4.0,
    ) -> tuple[Any, float, float, int, bool]:
        length = b - a
        edges = np.linspace(0.0, 1.0, panels + 1)
        half = 0.5 / panels
        tin = (0.5 * (edges[:-1] + edges[1:]))[:, None] + half * _GK_NODES
        tin = tin.ravel()
        wk = np.tile(_GK_WEIGHTS, panels) * half
        wg = np.tile(_G7_WEIGHTS, panels) * half
        floor = 16.0 * _EPS * max(abs(a), abs(b), length)

        acc = 0.0
        acc_inner_err = 0.0
        estimates: list[Any] = []
        evaluations = 0
        outer_err = math.inf
        converged = False
        for level in range(min(self.max_levels, 7) + 1):
            t = _tanh_sinh_abscissae(level, t_max)
            d, rest, dxdt = _tanh_sinh_map(t, length)
            keep = (rest > 0) & (dxdt > 0)
            if coordinates == "uv":
                keep &= d > floor
            d, rest, dxdt = d[keep], rest[keep], dxdt[keep]
            s = a + 0.5 * d[:, None] + tin[None, :] * rest[:, None]
            dd = np.broadcast_to(d[:, None], s.shape)
            if coordinates == "uv":
                u = s + 0.5 * dd
                v = s - 0.5 * dd
                g = _broadcast_like(integrand(u, v), s.shape) + _broadcast_like(
                    integrand(v, u), s.shape
                )
            else:
                g = _broadcast_like(integrand(s, dd), s.shape) + _broadcast_like(
                    integrand(s, -dd), s.shape
                )
            evaluations += 2 * s.size
            hk = (g @ wk) * rest
            hg = (g @ wg) * rest
            inner_err = np.abs(hk - hg)
            acc = acc + np.dot(dxdt, hk)
            acc_inner_err = acc_inner_err + float(np.dot(dxdt, inner_err))
            h = 2.0**-level
            estimates.append(h * acc)
            if level >= 2:
                outer_err = _max_abs(estimates[-1] - estimates[-2])
                if outer_err <= 0.5 * tol:
                    converged = True
                    break
        return estimates[-1], float(outer_err), h * acc_inner_err, evaluations, converged

    def damped_momentum_integral(
        self,
        integrand: Integrand,
        damping_rate: float,
        tol: float | None = None,
        *,
        bound: float = 1.0,
        half_line: bool = False,
        envelope: float = 0.0,
    ) -> QuadratureResult:
        """Integrate over the momentum line with a certified tail bound.

        The caller guarantees ``|integrand(p)| <= bound * exp(-rate |p|)``
        for ``|p| >= envelope``.  The cutoff ``P`` is chosen so that the
        discarded two-sided tail ``2 * bound * exp(-rate P) / rate`` is
        half the tolerance; the tail bound is added to the error.

        Parameters
        ----------
        damping_rate : float
            Exponential decay rate; must be positive.
        bound : float
            Constant ``C`` of the decay bound.
        half_line : bool
            Integrate over ``[0, inf)`` instead of the whole line.
        envelope : float
            Momentum beyond which the decay bound holds.
        """
        tol = self.tol if tol is None else tol
        if not damping_rate > 0:
            raise DomainError(
                f"damping rate must be positive, got {damping_rate}; "
                "use the closed-form endpoint"
            )
        sides = 1.0 if half_line else 2.0
        cutoff = math.log(max(2.0 * sides * bound / (damping_rate * tol), 1.0)) / damping_rate
        cutoff = max(cutoff, envelope)
        tail = sides * bound * math.exp(-damping_rate * cutoff) / damping_rate
        log.debug("momentum cutoff %.4g (tail bound %.3e)", cutoff, tail)
        grid = (0.0, cutoff) if half_line else (-cutoff, cutoff)
        inner = self.integrate_1d(integrand, grid, 0.5 * tol, points=(0.0,))
        err = inner.error_estimate + tail
        return QuadratureResult(
            value=inner.value,
            error_estimate=err,
            evaluations=inner.evaluations,
            converged=inner.converged and err <= tol,
        )

    # -- extrapolation -----------------------------------------------------

    @staticmethod
    def richardson_limit(
        parameters: Sequence[float],
        values: Sequence[Any],
        errors: Sequence[float] | None = None,
    ) -> ExtrapolationLadder:
        """Extrapolate ``values(h)`` to ``h = 0`` with a Neville table.

        Parameters
        ----------
        parameters : sequence of float
            Strictly decreasing positive ``h_k``, ideally geometric.
        values : sequence
            Approximations at each ``h_k`` (real or complex).
        errors : sequence of float, optional
            Absolute errors of the rungs, propagated through the
            Lagrange weights of the extrapolant.

        Returns
        -------
        ExtrapolationLadder
        """
        h = np.asarray(parameters, dtype=float)
        y = np.asarray(values)
        n = h.size
        if n < 3 or y.shape[0] != n:
            raise DomainError("extrapolation needs at least 3 rungs of matching length")
        if np.any(h <= 0) or np.any(np.diff(h) >= 0):
            raise DomainError("extrapolation parameters must be positive and decreasing")
        ratios = h[1:] / h[:-1]
        if np.ptp(ratios) > 1e-6 * np.max(ratios):
            log.warning("extrapolation parameters are not geometric: %s", h)

        table = [y.astype(complex if np.iscomplexobj(y) else float)]
        diagonal = [table[0][0]]
        for j in range(1, n):
            prev = table[-1]
            hi = h[j:]
            hij = h[: n - j]
            cur = (hi * prev[:-1] - hij * prev[1:]) / (hi - hij)
            table.append(cur)
            diagonal.append(cur[0])
        diag = np.asarray(diagonal)
        extrapolated = diag[-1]
        spread = float(max(abs(diag[-1] - diag[-2]), abs(diag[-1] - table[-2][1])))
        propagated = 0.0
        if errors is not None:
            err = np.asarray(errors, dtype=float)
            for i in range(n):
                others = np.delete(h, i)
                lagrange = np.prod(others / (others - h[i]))
                propagated += abs(lagrange) * err[i]

        # a tail buried in rung noise carries no information
        last = abs(diag[-1] - diag[-2])
        warning = bool(last > abs(diag[-2] - diag[-3]) and last > propagated)
        if warning:
            log.warning("extrapolation tail is not contracting (spread %.3e)", spread)
        return ExtrapolationLadder(
            parameters=h,
            values=y,
            extrapolated=extrapolated.item() if np.ndim(extrapolated) == 0 else extrapolated,
            spread=spread,
            propagated_error=float(propagated),
            warning=warning,
            diagonal=diag,
        )
