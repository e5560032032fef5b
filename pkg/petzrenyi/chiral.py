"""Layer 3: chiral current on the half light-ray in a thermal state.

Coherent excitations ``W(f)`` of the free chiral current, ``f`` supported
in ``(0, inf)``, relative to the KMS state at inverse temperature
``beta``.  The modular flow of the half-line is the point transformation
``u -> L(t, u)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import gammainc

from .errors import ConvergenceError, DomainError
from .quadrature import QuadratureResult

if TYPE_CHECKING:
    from .quadrature import Quadrature

log = logging.getLogger(__name__)

Profile = Callable[[np.ndarray], np.ndarray]

EPSILON_LADDER = (1e-3, 1e-4, 1e-5)
DISSIPATION_RATIO = 1e-2
FLOW_TOL = 1e-5


# -- test functions ------------------------------------------------------


def _inside(u: np.ndarray, a: float, b: float) -> np.ndarray:
    return (u > a) & (u < b)


@dataclass(frozen=True)
class HalfLineTestFunction:
    """Smooth ``f`` with compact support in ``(0, inf)`` and its derivatives.

    ``second_derivative`` is optional; it is only needed for the
    integrated-by-parts forms.
    """

    value: Profile
    derivative: Profile
    support: tuple[float, float]
    label: str = ""
    second_derivative: Profile | None = None
    interpolation_error: float = 0.0

    def __post_init__(self) -> None:
        a, b = (float(x) for x in self.support)
        if not 0.0 < a < b < math.inf:
            raise DomainError(f"support must satisfy 0 < a < b < inf, got ({a}, {b})")
        object.__setattr__(self, "support", (a, b))

    # -- built-ins -------------------------------------------------------

    @classmethod
    def bump(cls, a: float, b: float, amplitude: float = 1.0) -> HalfLineTestFunction:
        """``exp(-1 / ((u - a)(b - u)))`` on ``(a, b)``."""

        def parts(u: np.ndarray):
            u = np.asarray(u, dtype=float)
            inside = _inside(u, a, b)
            q = np.where(inside, (u - a) * (b - u), 1.0)
            dq = a + b - 2.0 * u
            f = np.where(inside, np.exp(-1.0 / q), 0.0)
            return inside, q, dq, f

        def value(u):
            return amplitude * parts(u)[3]

        def derivative(u):
            inside, q, dq, f = parts(u)
            return amplitude * np.where(inside, f * dq / q**2, 0.0)

        def second(u):
            inside, q, dq, f = parts(u)
            r = dq / q**2
            return amplitude * np.where(inside, f * (r * r - 2.0 / q**2 - 2.0 * dq**2 / q**3), 0.0)

        return cls(value, derivative, (a, b), f"bump {a:g} {b:g}", second)

    @classmethod
    def poly_bump(cls, a: float, b: float, k: int, amplitude: float = 1.0) -> HalfLineTestFunction:
        """``(4 (u - a)(b - u) / (b - a)**2)**k`` on ``(a, b)``; ``C^(k-1)``."""
        if k < 2:
            raise DomainError("poly-bump needs k >= 2 for a continuous derivative")
        kappa = 4.0 / (b - a) ** 2

        def q_of(u):
            u = np.asarray(u, dtype=float)
            inside = _inside(u, a, b)
            return inside, np.where(inside, kappa * (u - a) * (b - u), 0.0), kappa * (a + b - 2.0 * u)

        def value(u):
            inside, q, _ = q_of(u)
            return amplitude * np.where(inside, q**k, 0.0)

        def derivative(u):
            inside, q, dq = q_of(u)
            return amplitude * np.where(inside, k * q ** (k - 1) * dq, 0.0)

        def second(u):
            inside, q, dq = q_of(u)
            qk2 = q ** (k - 2) if k > 2 else np.ones_like(q)
            return amplitude * np.where(
                inside, k * (k - 1) * qk2 * dq**2 - 2.0 * kappa * k * q ** (k - 1), 0.0
            )

        return cls(value, derivative, (a, b), f"poly-bump {a:g} {b:g} {k}", second)

    @classmethod
    def from_samples(
        cls,
        u: Sequence[float],
        f: Sequence[float],
        fprime: Sequence[float],
        label: str = "sampled",
    ) -> HalfLineTestFunction:
        """Cubic Hermite interpolant of sampled ``(u, f, f')`` triples.

        The interpolation error is estimated by rebuilding the spline on
        every other node and comparing derivatives at the dropped nodes.
        """
        u = np.asarray(u, dtype=float)
        f = np.asarray(f, dtype=float)
        fp = np.asarray(fprime, dtype=float)
        if u.size < 4 or np.any(np.diff(u) <= 0):
            raise DomainError("need at least 4 strictly increasing sample points")
        spline = CubicHermiteSpline(u, f, fp, extrapolate=False)
        dspline = spline.derivative()
        d2spline = spline.derivative(2)
        coarse = CubicHermiteSpline(u[::2], f[::2], fp[::2], extrapolate=False)
        dropped = u[1:-1:2]
        dev = np.abs(coarse.derivative()(dropped) - fp[1:-1:2]) if dropped.size else np.zeros(1)
        scale = max(float(np.max(np.abs(fp))), 1e-300)
        rel = float(np.nanmax(dev)) / scale / 16.0  # cubic Hermite: error ~ h**4

        def wrap(p):
            return lambda x: np.nan_to_num(p(np.asarray(x, dtype=float)), nan=0.0)

        return cls(
            wrap(spline), wrap(dspline), (float(u[0]), float(u[-1])), label, wrap(d2spline), rel
        )

    def scaled(self, c: float) -> HalfLineTestFunction:
        """``c * f``."""
        d2 = self.second_derivative
        return replace(
            self,
            value=lambda u: c * self.value(u),
            derivative=lambda u: c * self.derivative(u),
            second_derivative=None if d2 is None else (lambda u: c * d2(u)),
            label=f"{c:g}*({self.label})",
        )

    def dilated(self, s: float) -> HalfLineTestFunction:
        """``f(u / s)``, supported on ``s * support``."""
        d2 = self.second_derivative
        a, b = self.support
        return replace(
            self,
            value=lambda u: self.value(np.asarray(u) / s),
            derivative=lambda u: self.derivative(np.asarray(u) / s) / s,
            second_derivative=None if d2 is None else (lambda u: d2(np.asarray(u) / s) / s**2),
            support=(a * s, b * s),
            label=f"({self.label})(u/{s:g})",
        )

    def require_second_derivative(self) -> Profile:
        if self.second_derivative is None:
            raise DomainError(f"test function {self.label!r} has no second derivative")
        return self.second_derivative


@dataclass(frozen=True)
class ThermalConfig:
    beta: float

    def __post_init__(self) -> None:
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError(f"inverse temperature must be positive and finite, got {self.beta}")


# -- kernels -------------------------------------------------------------


def thermal_two_point(u, v, beta: float, epsilon: float) -> np.ndarray:
    """``-(pi / (4 beta**2)) sinh**-2[(pi/beta)(u - v - i epsilon)]``.

    ``u`` may be complex (used for the KMS boundary condition).
    """
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    return _two_point(np.asarray(u) - np.asarray(v) - 1j * epsilon, beta)


def _two_point(z: np.ndarray, beta: float) -> np.ndarray:
    return -(np.pi / (4.0 * beta**2)) / np.sinh(np.pi * z / beta) ** 2


def kms_residual(u, v, beta: float, epsilon: float) -> np.ndarray:
    """``|w2(u - i beta, v) - w2(v, u)|`` with opposite boundary prescriptions."""
    shifted = _two_point(np.asarray(u) - 1j * beta - np.asarray(v) - 1j * epsilon, beta)
    swapped = _two_point(np.asarray(v) - np.asarray(u) + 1j * epsilon, beta)
    return np.abs(shifted - swapped)


def modular_flow_L(t, u, beta: float) -> np.ndarray:
    """``(beta / 2 pi) ln[1 + e^(2 pi t)(e^(2 pi u / beta) - 1)]``."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise DomainError("modular flow of the half-line needs u >= 0")
    x = 2.0 * np.pi * u / beta
    with np.errstate(divide="ignore"):
        log_expm1 = np.where(
            x > 30.0, x + np.log1p(-np.exp(-x)), np.log(np.expm1(np.minimum(x, 30.0)))
        )
    shift = 2.0 * np.pi * np.asarray(t, dtype=float)
    return beta / (2.0 * np.pi) * np.logaddexp(0.0, shift + log_expm1)


def _log_abs_sinh(y: np.ndarray, eta: float = 0.0) -> np.ndarray:
    """``ln|sinh(y - i eta)|``, finite for tiny ``y`` when ``eta > 0``."""
    ay = np.abs(y)
    e2 = np.exp(-2.0 * ay)
    with np.errstate(divide="ignore"):
        if eta == 0.0:
            return ay + np.log(-np.expm1(-2.0 * ay)) - math.log(2.0)
        inner = np.expm1(-2.0 * ay) ** 2 + 4.0 * e2 * math.sin(eta) ** 2
        return ay - math.log(2.0) + 0.5 * np.log(inner)


def _kernel_q(s: np.ndarray, d: np.ndarray, beta: float) -> np.ndarray:
    """``(1 - 2 sigma cosh x + sigma**2) / sinh(x)**2``.

    ``x = pi d / beta`` and ``sigma = exp(-2 pi s / beta)``; evaluated
    without overflow for small ``beta``.
    """
    ax = np.abs(np.pi * d / beta)
    L = 2.0 * np.pi * s / beta
    sigma = np.exp(-L)
    with np.errstate(over="ignore", invalid="ignore"):
        small = 4.0 * sigma * np.sinh(0.5 * ax) ** 2
        large = np.exp(ax - L) - 2.0 * sigma + np.exp(-ax - L)
    spread = np.where(ax < 1.0, small, large)
    num = np.expm1(-L) ** 2 - spread
    e2 = np.exp(-2.0 * ax)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_sinh2 = 4.0 * e2 / (-np.expm1(-2.0 * ax)) ** 2
    return num * inv_sinh2


def log_kernel(u, v, beta: float, alpha: float) -> np.ndarray:
    """Complex kernel ``ln(-c(A-B) - i s(A+B-2)) - ln(A-B - i0)``.

    ``A = exp(2 pi u / beta)``, ``B = exp(2 pi v / beta)``,
    ``c = cos(pi alpha)``, ``s = sin(pi alpha)``; principal branches.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    A = np.exp(2.0 * np.pi * u / beta)
    B = np.exp(2.0 * np.pi * v / beta)
    c, s = math.cos(math.pi * alpha), math.sin(math.pi * alpha)
    first = np.log(-c * (A - B) - 1j * s * (A + B - 2.0))
    second = np.log(np.abs(A - B)) - 1j * np.pi * (A < B)
    return first - second


def sinh_kernel(u, v, beta: float, alpha: float, epsilon: float = 0.0) -> np.ndarray:
    """``[c sinh x + i s (cosh x - sigma)]**-2 - sinh(x - i eta)**-2``.

    ``x = pi (u - v) / beta``, ``sigma = exp(-pi (u + v) / beta)`` and
    ``eta = pi epsilon / beta``.  Equals ``(beta/pi)**2 d_u d_v log_kernel``
    away from the diagonal.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    x = np.pi * (u - v) / beta
    sigma = np.exp(-np.pi * (u + v) / beta)
    c, s = math.cos(math.pi * alpha), math.sin(math.pi * alpha)
    first = 1.0 / (c * np.sinh(x) + 1j * s * (np.cosh(x) - sigma)) ** 2
    second = 1.0 / np.sinh(x - 1j * np.pi * epsilon / beta) ** 2
    return first - second


def energy_density(f: HalfLineTestFunction, u) -> np.ndarray:
    """Classical energy density ``T_00 = f'(u)**2 / 2``."""
    return 0.5 * f.derivative(np.asarray(u, dtype=float)) ** 2


class ChiralCurrent:
    """Entropies of coherent excitations of the thermal chiral current.

    Parameters
    ----------
    quad : Quadrature
        Shared integration engine.
    tol : float, optional
        Absolute tolerance for every integral; defaults to ``quad.tol``.
    epsilons : sequence of float
        Regulator ladder, in units of ``beta``, for the ``epsilon -> 0`` forms.
    """

    def __init__(
        self, quad: Quadrature, tol: float | None = None, epsilons: Sequence[float] = EPSILON_LADDER
    ) -> None:
        self._quad = quad
        self.tol = quad.tol if tol is None else tol
        self.epsilons = tuple(float(e) for e in epsilons)

    # -- helpers -----------------------------------------------------------

    @staticmethod
    def _check(beta: float) -> None:
        ThermalConfig(beta)

    def _fold_interpolation(self, f: HalfLineTestFunction, res: QuadratureResult) -> QuadratureResult:
        if f.interpolation_error == 0.0:
            return res
        extra = 2.0 * f.interpolation_error * abs(res.value)
        return replace(res, error_estimate=res.error_estimate + extra)

    def _one_dim(self, f: HalfLineTestFunction, weight: Profile) -> QuadratureResult:
        fp = f.derivative
        res = self._quad.integrate_1d(lambda u: weight(u) * fp(u) ** 2, f.support, self.tol)
        return self._fold_interpolation(f, res)

    # -- Petz-Renyi entropy ------------------------------------------------

    def petz_renyi_chiral(
        self, f: HalfLineTestFunction, beta: float, alpha: float
    ) -> QuadratureResult:
        """``S_alpha`` from the logarithmic kernel.

        ``1 / (4 pi (1 - alpha)) * integral K f'(u) f'(v)`` with the real
        symmetrized kernel ``K = (1/2) log1p(sin(pi alpha)**2 q)``.  The
        imaginary parts of the two argument orders cancel; their
        integrated residual is added to the error estimate.

        ``alpha = 0`` returns the endpoint value 0.
        """
        self._check(beta)
        if alpha == 0.0:
            return QuadratureResult(0.0, 0.0, 0, True)
        if not 0.0 < alpha < 1.0:
            raise DomainError(f"alpha must lie in [0, 1), got {alpha!r}")
        c, s = math.cos(math.pi * alpha), math.sin(math.pi * alpha)
        fp = f.derivative

        def integrand(sm: np.ndarray, d: np.ndarray) -> np.ndarray:
            q = _kernel_q(sm, d, beta)
            real = 0.5 * np.log1p(s * s * q)
            sgn = np.where(d < 0, -1.0, 1.0)
            imag = np.arctan2(-s * np.sqrt(np.maximum(1.0 + q, 0.0)), -c * sgn) + np.pi * (d < 0)
            return (real + 1j * imag) * fp(sm + 0.5 * d) * fp(sm - 0.5 * d)

        prefactor = 1.0 / (4.0 * math.pi * (1.0 - alpha))
        res = self._quad.integrate_2d_diag_log(
            integrand, f.support, self.tol / prefactor, coordinates="sd"
        )
        residual = abs(complex(res.value).imag) * prefactor
        out = QuadratureResult(
            value=complex(res.value).real * prefactor,
            error_estimate=res.error_estimate * prefactor + residual,
            evaluations=res.evaluations,
            converged=res.converged,
        )
        log.debug("S_%g(beta=%g) = %.12g +- %.2e", alpha, beta, out.value, out.error_estimate)
        return self._fold_interpolation(f, out)

    def imaginary_residual(self, f: HalfLineTestFunction, beta: float, alpha: float) -> float:
        """Integrated imaginary part of the symmetrized principal-branch kernel."""
        fp = f.derivative

        def integrand(u: np.ndarray, v: np.ndarray) -> np.ndarray:
            return log_kernel(u, v, beta, alpha).imag * fp(u) * fp(v)

        res = self._quad.integrate_2d_diag_log(integrand, f.support, self.tol)
        return abs(res.value) / (4.0 * math.pi * (1.0 - alpha))

    def _epsilon_ladder(
        self, rung: Callable[[float], QuadratureResult], beta: float, what: str
    ) -> QuadratureResult:
        eps = [e * beta for e in self.epsilons]
        rungs = [rung(e) for e in eps]
        ladder = self._quad.richardson_limit(
            eps, [r.value for r in rungs], [r.error_estimate for r in rungs]
        )
        log.debug("%s epsilon ladder %s -> %.12g", what, ladder.values, ladder.extrapolated)
        return QuadratureResult(
            value=float(np.real(ladder.extrapolated)),
            error_estimate=ladder.error_estimate,
            evaluations=sum(r.evaluations for r in rungs),
            converged=all(r.converged for r in rungs) and not ladder.warning,
        )

    def petz_renyi_chiral_sinh_form(
        self, f: HalfLineTestFunction, beta: float, alpha: float
    ) -> QuadratureResult:
        """``S_alpha`` from the ``sinh**-2`` kernel, extrapolated in ``epsilon``.

        ``pi / (4 beta**2 (1 - alpha)) * integral f(u) f(v) Re sinh_kernel``.
        """
        self._check(beta)
        if not 0.0 < alpha < 1.0:
            raise DomainError(f"alpha must lie strictly inside (0, 1), got {alpha!r}")
        fv = f.value
        prefactor = math.pi / (4.0 * beta**2 * (1.0 - alpha))

        def rung(epsilon: float) -> QuadratureResult:
            def integrand(u: np.ndarray, v: np.ndarray) -> np.ndarray:
                return sinh_kernel(u, v, beta, alpha, epsilon).real * fv(u) * fv(v)

            res = self._quad.integrate_2d_diag_log(integrand, f.support, self.tol / prefactor)
            return res.scaled(prefactor)

        return self._epsilon_ladder(rung, beta, "sinh form")

    # -- closed-form endpoints ---------------------------------------------

    def relative_entropy_chiral(self, f: HalfLineTestFunction, beta: float) -> QuadratureResult:
        """``(beta / 4) integral (1 - exp(-2 pi u / beta)) f'(u)**2 du``."""
        self._check(beta)
        return self._one_dim(f, lambda u: -0.25 * beta * np.expm1(-2.0 * np.pi * u / beta))

    def relative_entropy_stress_tensor(self, f: HalfLineTestFunction, beta: float) -> QuadratureResult:
        """``(beta / 2) integral (1 - exp(-2 pi u / beta)) T_00(u) du``."""
        self._check(beta)
        res = self._quad.integrate_1d(
            lambda u: -0.5 * beta * np.expm1(-2.0 * np.pi * u / beta) * energy_density(f, u),
            f.support,
            self.tol,
        )
        return self._fold_interpolation(f, res)

    def alpha_derivative_at_one(self, f: HalfLineTestFunction, beta: float) -> QuadratureResult:
        """First correction ``dS_alpha/dalpha`` at ``alpha = 1``.

        ``(beta**2 / 2) integral h(u) h(v) Re w2_eps(u, v)`` with
        ``h = (1 - exp(-2 pi u / beta)) f'``, extrapolated to ``eps = 0``.
        When ``f''`` is known each rung is integrated by parts twice, which
        trades the ``sinh**-2`` peak of width ``eps`` for a bounded
        logarithm; otherwise the kernel is integrated as it stands.
        """
        self._check(beta)
        fp = f.derivative

        def h(u: np.ndarray) -> np.ndarray:
            return -np.expm1(-2.0 * np.pi * u / beta) * fp(u)

        def direct(epsilon: float) -> QuadratureResult:
            def integrand(u: np.ndarray, v: np.ndarray) -> np.ndarray:
                w2 = thermal_two_point(u, v, beta, epsilon).real
                return 0.5 * beta**2 * w2 * h(u) * h(v)

            return self._quad.integrate_2d_diag_log(integrand, f.support, self.tol)

        def by_parts(epsilon: float) -> QuadratureResult:
            return self._first_correction_by_parts(f, beta, epsilon)

        rung = direct if f.second_derivative is None else by_parts
        return self._fold_interpolation(f, self._epsilon_ladder(rung, beta, "first correction"))

    def _first_correction_by_parts(
        self, f: HalfLineTestFunction, beta: float, epsilon: float
    ) -> QuadratureResult:
        """``-(beta**2 / (8 pi)) integral ln|sinh(pi (u - v - i eps) / beta)| h'(u) h'(v)``."""
        fp = f.derivative
        fpp = f.require_second_derivative()
        k = 2.0 * np.pi / beta
        eta = np.pi * epsilon / beta

        def dh(u: np.ndarray) -> np.ndarray:
            return k * np.exp(-k * u) * fp(u) - np.expm1(-k * u) * fpp(u)

        def integrand(sm: np.ndarray, d: np.ndarray) -> np.ndarray:
            w = dh(sm + 0.5 * d) * dh(sm - 0.5 * d)
            with np.errstate(invalid="ignore"):
                out = _log_abs_sinh(np.pi * d / beta, eta) * w
            # integrable log singularity; zero weight kills it
            return np.where(w == 0.0, 0.0, out)

        prefactor = -beta**2 / (8.0 * math.pi)
        res = self._quad.integrate_2d_diag_log(
            integrand, f.support, self.tol / abs(prefactor), coordinates="sd"
        )
        return res.scaled(prefactor)

    def first_correction_log_form(self, f: HalfLineTestFunction, beta: float) -> QuadratureResult:
        """Epsilon-free first correction after integrating by parts twice.

        ``-(beta**2 / (8 pi)) integral ln|sinh(pi (u - v) / beta)| h'(u) h'(v)``.
        """
        self._check(beta)
        f.require_second_derivative()
        return self._fold_interpolation(f, self._first_correction_by_parts(f, beta, 0.0))

    def beta_derivative_relative_entropy(
        self, f: HalfLineTestFunction, beta: float
    ) -> QuadratureResult:
        """``(1/4) integral (1 - e^-x - x e^-x) f'(u)**2 du`` with ``x = 2 pi u / beta``."""
        self._check(beta)
        # 1 - e^-x (1 + x) is the regularized lower incomplete gamma P(2, x)
        return self._one_dim(f, lambda u: 0.25 * gammainc(2.0, 2.0 * np.pi * u / beta))

    def zero_temperature_entropy(self, f: HalfLineTestFunction) -> QuadratureResult:
        """``beta -> inf`` limit ``(1/4) integral 2 pi u f'(u)**2 du``."""
        return self._one_dim(f, lambda u: 0.5 * np.pi * u)

    def zero_temperature_stress_tensor(self, f: HalfLineTestFunction) -> QuadratureResult:
        """Same limit written as ``integral pi u T_00(u) du``."""
        res = self._quad.integrate_1d(lambda u: np.pi * u * energy_density(f, u), f.support, self.tol)
        return self._fold_interpolation(f, res)

    def infinite_temperature_check(
        self, f: HalfLineTestFunction, alpha: float, beta: float = 1e-3, flow_beta: float = 1e-6
    ) -> QuadratureResult:
        """``S_alpha`` at small ``beta``, required to have dissipated.

        Raises
        ------
        ConvergenceError
            When ``S_alpha`` is not below ``DISSIPATION_RATIO`` times the
            zero-temperature entropy, or when ``|L(1, u) - u|`` at
            ``flow_beta`` exceeds ``FLOW_TOL`` on the support.  The entropy
            is attached as ``result``.
        """
        res = self.petz_renyi_chiral(f, beta, alpha)
        reference = self.zero_temperature_entropy(f).value
        a, b = f.support
        u = np.linspace(a, b, 5)
        flow_dev = float(np.max(np.abs(modular_flow_L(1.0, u, flow_beta) - u)))
        log.info(
            "beta=%g: S_%g = %.3e (zero-temperature %.3e), |L(1,u) - u| = %.2e at beta=%g",
            beta, alpha, res.value, reference, flow_dev, flow_beta,
        )
        if res.value - res.error_estimate > DISSIPATION_RATIO * reference:
            raise ConvergenceError(
                f"coherent excitation has not dissipated at beta={beta:g}: "
                f"S_{alpha:g} = {res.value:.3e} vs zero-temperature {reference:.3e}",
                res,
            )
        if flow_dev > FLOW_TOL:
            raise ConvergenceError(
                f"modular flow at beta={flow_beta:g} is {flow_dev:.2e} away from the identity", res
            )
        return res

    # -- two-point form ----------------------------------------------------

    def two_point_smeared(
        self, f: HalfLineTestFunction, g: HalfLineTestFunction, beta: float
    ) -> complex:
        """``w2(f, g)``: ``-(1/4pi) iint ln|sinh| f'g' + (i/4) int f g'``."""
        self._check(beta)
        lo = min(f.support[0], g.support[0])
        hi = max(f.support[1], g.support[1])
        fp, gp = f.derivative, g.derivative

        def integrand(sm: np.ndarray, d: np.ndarray) -> np.ndarray:
            return _log_abs_sinh(np.pi * d / beta) * fp(sm + 0.5 * d) * gp(sm - 0.5 * d)

        real = self._quad.integrate_2d_diag_log(integrand, (lo, hi), self.tol, coordinates="sd")
        imag = self._quad.integrate_1d(lambda u: f.value(u) * gp(u), (lo, hi), self.tol)
        return complex(-real.value / (4.0 * math.pi), 0.25 * imag.value)

    def gram_matrix(self, functions: Sequence[HalfLineTestFunction], beta: float) -> np.ndarray:
        """Hermitian matrix ``w2(f_i, f_j)``."""
        n = len(functions)
        G = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                G[i, j] = self.two_point_smeared(functions[i], functions[j], beta)
                G[j, i] = np.conj(G[i, j])
        return G

    def ultralocal_ratio(self, f: HalfLineTestFunction, beta: float) -> float:
        """``Re w2(f, f)`` over its ``beta -> 0`` limit ``integral f**2 / (2 beta)``."""
        w = self.two_point_smeared(f, f, beta).real
        norm = self._quad.integrate_1d(lambda u: f.value(u) ** 2, f.support, self.tol).value
        return w / (norm / (2.0 * beta))
