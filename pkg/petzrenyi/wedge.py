"""Layer 3: free massive scalar in the right Rindler wedge (1+1 dimensions).

The modular flow of the wedge in the vacuum is the boost flow.  Entropies
of a coherent excitation ``W(f)`` are expressed through the Cauchy data
``phi = (Ef)(0, x)`` and ``pi = d_0 (Ef)(0, x)`` of ``Ef``, with the
boost continued to imaginary rapidity.

At equal times, with ``c = cos(pi alpha)``, ``s = sin(pi alpha)``,
``omega = sqrt(p**2 + m**2)``, ``D = x - y`` and ``S = x + y``, the
continued pieces of the symmetric kernel are::

    I0 = (1/2pi) int cos(c p D) exp(-s omega S) / omega dp
    I2 = (1/2pi) int (p**2 + c**2 m**2) cos(c p D) exp(-s omega S) / omega dp

and the uncontinued vacuum kernel is ``K0(m |D|) / pi``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.special import j0, k0

from .errors import DomainError
from .quadrature import QuadratureResult

if TYPE_CHECKING:
    from .quadrature import Quadrature

log = logging.getLogger(__name__)

Profile = Callable[[np.ndarray], np.ndarray]

REGULATOR = 1e-12
_CHUNK = 4_000_000


def _zero(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(np.asarray(x, dtype=float))


def _bump_parts(center: float, width: float, amplitude: float):
    """``exp(-1 / (1 - r**2))`` with ``r = (x - center) / width`` and its derivative."""

    def core(x):
        x = np.asarray(x, dtype=float)
        r = (x - center) / width
        inside = np.abs(r) < 1.0
        q = np.where(inside, 1.0 - r * r, 1.0)
        f = np.where(inside, np.exp(-1.0 / q), 0.0)
        return inside, r, q, f

    def value(x):
        return amplitude * core(x)[3]

    def derivative(x):
        inside, r, q, f = core(x)
        return amplitude * np.where(inside, -2.0 * r * f / (q * q * width), 0.0)

    return value, derivative


# -- data ----------------------------------------------------------------


@dataclass(frozen=True)
class WedgeCauchyData:
    """Time-zero data ``(phi, pi)`` of ``Ef`` supported in ``(0, inf)``.

    Attributes
    ----------
    phi, phi_prime, pi : callable
        Vectorised profiles; zero outside ``support``.
    support : (a, b)
        ``0 < a < b``.
    mass : float
        Klein-Gordon mass ``m > 0``.
    """

    phi: Profile
    phi_prime: Profile
    pi: Profile
    support: tuple[float, float]
    mass: float = 1.0
    label: str = ""
    interpolation_error: float = 0.0

    def __post_init__(self) -> None:
        a, b = (float(x) for x in self.support)
        if not 0.0 < a < b < math.inf:
            raise DomainError(f"support must satisfy 0 < a < b < inf, got ({a}, {b})")
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        object.__setattr__(self, "support", (a, b))

    @staticmethod
    def _bump_support(center: float, width: float) -> tuple[float, float]:
        if width <= 0 or center - width <= 0:
            raise DomainError(
                f"bump at {center:g} with half-width {width:g} leaves the right half-line"
            )
        return center - width, center + width

    @classmethod
    def gauss_bump(cls, center: float, width: float, mass: float = 1.0) -> WedgeCauchyData:
        """``phi`` a smooth bump, ``pi = 0``."""
        value, derivative = _bump_parts(center, width, 1.0)
        return cls(value, derivative, _zero, cls._bump_support(center, width), mass,
                   f"gauss-bump {center:g} {width:g}")

    @classmethod
    def momentum_bump(cls, center: float, width: float, mass: float = 1.0) -> WedgeCauchyData:
        """``phi = 0``, ``pi`` a smooth bump."""
        value, _ = _bump_parts(center, width, 1.0)
        return cls(_zero, _zero, value, cls._bump_support(center, width), mass,
                   f"momentum-bump {center:g} {width:g}")

    @classmethod
    def wave_packet(cls, center: float, width: float, mass: float = 1.0) -> WedgeCauchyData:
        """Right-moving packet: ``phi`` a bump and ``pi = -phi'``."""
        value, derivative = _bump_parts(center, width, 1.0)
        return cls(value, derivative, lambda x: -derivative(x),
                   cls._bump_support(center, width), mass, f"wave-packet {center:g} {width:g}")

    @classmethod
    def from_samples(
        cls,
        x: Sequence[float],
        phi: Sequence[float],
        phi_prime: Sequence[float],
        pi: Sequence[float],
        mass: float = 1.0,
        label: str = "sampled",
    ) -> WedgeCauchyData:
        """Interpolate sampled ``(x, phi, phi', pi)`` rows.

        ``phi`` uses a cubic Hermite spline through the supplied
        derivatives; ``pi`` a clamped cubic spline.
        """
        x = np.asarray(x, dtype=float)
        phi = np.asarray(phi, dtype=float)
        dphi = np.asarray(phi_prime, dtype=float)
        pi = np.asarray(pi, dtype=float)
        if x.size < 4 or np.any(np.diff(x) <= 0):
            raise DomainError("need at least 4 strictly increasing sample points")
        spline = CubicHermiteSpline(x, phi, dphi, extrapolate=False)
        dspline = spline.derivative()
        pspline = CubicSpline(x, pi, bc_type="clamped", extrapolate=False)
        coarse = CubicHermiteSpline(x[::2], phi[::2], dphi[::2], extrapolate=False)
        dropped = x[1:-1:2]
        dev = np.abs(coarse(dropped) - phi[1:-1:2]) if dropped.size else np.zeros(1)
        scale = max(float(np.max(np.abs(phi))), float(np.max(np.abs(pi))), 1e-300)

        def wrap(p):
            return lambda t: np.nan_to_num(p(np.asarray(t, dtype=float)), nan=0.0)

        return cls(wrap(spline), wrap(dspline), wrap(pspline), (float(x[0]), float(x[-1])),
                   mass, label, float(np.nanmax(dev)) / scale / 16.0)

    def scaled(self, c: float) -> WedgeCauchyData:
        """Data of ``E(c f)``."""
        return replace(
            self,
            phi=lambda x: c * self.phi(x),
            phi_prime=lambda x: c * self.phi_prime(x),
            pi=lambda x: c * self.pi(x),
            label=f"{c:g}*({self.label})",
        )

    def with_mass(self, mass: float) -> WedgeCauchyData:
        return replace(self, mass=mass)


@dataclass(frozen=True)
class BoostParameters:
    """Complex boost parameters ``z`` (first argument) and ``w`` (second)."""

    z: complex
    w: complex

    @classmethod
    def for_alpha(cls, alpha: float) -> BoostParameters:
        """Continuation points ``z = i(1 - alpha)/2``, ``w = -i(1 - alpha)/2``."""
        b = 0.5 * (1.0 - alpha)
        return cls(1j * b, -1j * b)

    @property
    def admissible(self) -> bool:
        bz, bw = complex(self.z).imag, complex(self.w).imag
        return 0.0 <= bz <= 0.5 and -0.5 <= bw <= 0.0


# -- kinematics ------------------------------------------------------------


def boost(t, x) -> np.ndarray:
    """``Lambda_t x`` in the ``x^1`` direction, rapidity ``2 pi t``.

    ``x`` has a trailing axis of length 2 holding ``(x^0, x^1)``; ``t`` may
    be complex.
    """
    x = np.asarray(x)
    ch, sh = np.cosh(2.0 * np.pi * t), np.sinh(2.0 * np.pi * t)
    x0, x1 = x[..., 0], x[..., 1]
    return np.stack([ch * x0 + sh * x1, sh * x0 + ch * x1], axis=-1)


def minkowski_square(x) -> np.ndarray:
    """``-(x^0)**2 + (x^1)**2`` (mostly-plus signature)."""
    x = np.asarray(x)
    return -x[..., 0] ** 2 + x[..., 1] ** 2


def imag_H(x, y, z: complex, w: complex, p, m: float) -> np.ndarray:
    """Imaginary part of the boosted phase ``H(x, y, z, w, p)``."""
    p = np.asarray(p, dtype=float)
    om = np.sqrt(p * p + m * m)
    bx = boost(z, np.asarray(x, dtype=float))
    by = boost(w, np.asarray(y, dtype=float))
    H = om * (bx[..., 0] - by[..., 0]) - p * (bx[..., 1] - by[..., 1])
    return np.asarray(H).imag


def in_right_wedge(x) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(x[1] >= abs(x[0]))


def energy_density(data: WedgeCauchyData, x) -> np.ndarray:
    """``T_00 = (pi**2 + phi'**2 + m**2 phi**2) / 2`` at ``x^0 = 0``."""
    x = np.asarray(x, dtype=float)
    m2 = data.mass**2
    return 0.5 * (data.pi(x) ** 2 + data.phi_prime(x) ** 2 + m2 * data.phi(x) ** 2)


class WedgeScalar:
    """Entropies of coherent excitations of the wedge scalar.

    Parameters
    ----------
    quad : Quadrature
        Shared integration engine.
    tol : float, optional
        Absolute tolerance; defaults to ``quad.tol``.
    regulator : float
        The ``exp(-eps omega)`` factor kept inside every momentum integral.
    """

    def __init__(self, quad: Quadrature, tol: float | None = None, regulator: float = REGULATOR) -> None:
        self._quad = quad
        self.tol = quad.tol if tol is None else tol
        self.regulator = regulator

    # -- transforms ------------------------------------------------------

    def _transform(self, profile: Profile, support: tuple[float, float], k: np.ndarray) -> np.ndarray:
        """``int profile(x) exp(i k x) dx`` for complex wave numbers ``k``."""
        k = np.asarray(k, dtype=complex)
        flat = k.ravel()
        a, b = support
        kmax = float(np.max(np.abs(flat.real))) if flat.size else 0.0
        panels = max(16, int(math.ceil(0.5 * (b - a) * kmax)))
        x, wk, _ = self._quad.composite_nodes(support, panels)
        fw = profile(x) * wk
        out = np.empty(flat.shape, dtype=complex)
        step = max(1, _CHUNK // x.size)
        for lo in range(0, flat.size, step):
            kk = flat[lo: lo + step]
            out[lo: lo + step] = np.exp(1j * np.outer(kk, x)) @ fw
        return out.reshape(k.shape)

    @staticmethod
    def _check_alpha(alpha: float) -> None:
        if not 0.0 < alpha < 1.0:
            raise DomainError(f"alpha must lie strictly inside (0, 1), got {alpha!r}")

    def _l1(self, profile: Profile, support: tuple[float, float]) -> float:
        return float(self._quad.integrate_1d(lambda x: np.abs(profile(x)), support, self.tol).value)

    # -- kernels ---------------------------------------------------------

    def equal_time_momentum_integrals(
        self, delta, sigma, alpha: float, m: float, tol: float | None = None
    ) -> tuple[np.ndarray, np.ndarray, float]:
        """Vectorised ``(I0, I2)`` over pairs ``(D, S)`` and their error bound."""
        self._check_alpha(alpha)
        if not m > 0:
            raise DomainError(f"mass must be positive, got {m}")
        delta = np.atleast_1d(np.asarray(delta, dtype=float))
        sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
        delta, sigma = np.broadcast_arrays(delta, sigma)
        if np.any(sigma <= 0):
            raise DomainError("kernel points must lie in the open right wedge")
        c, s = math.cos(math.pi * alpha), math.sin(math.pi * alpha)
        eps = self.regulator
        D, S = delta.ravel(), sigma.ravel()

        def integrand(p: np.ndarray) -> np.ndarray:
            om = np.sqrt(p * p + m * m)[..., None]
            pp = p[..., None]
            base = np.cos(c * pp * D) * np.exp(-(s * S + eps) * om) / (np.pi * om)
            return np.concatenate([base, (pp * pp + c * c * m * m) * base], axis=-1)

        rate = 0.5 * s * float(S.min())
        bound = (1.0 / m + 2.0 / (math.e * s * float(S.min()))) / np.pi
        tol = self.tol if tol is None else tol
        res = self._quad.damped_momentum_integral(integrand, rate, tol, bound=bound, half_line=True)
        # 1/pi in the integrand is the 1/2pi of the full line folded onto p >= 0
        vals = np.asarray(res.value, dtype=float).reshape(2, -1)
        return vals[0].reshape(delta.shape), vals[1].reshape(delta.shape), res.error_estimate

    def K_alpha_equal_time(self, x1, y1, alpha: float, m: float = 1.0, which: str = "value"):
        """Symmetric kernel ``K_alpha`` or its time derivatives at ``x^0 = y^0 = 0``.

        ``which`` is ``"value"``, ``"dt"`` (``d_{x^0} K``) or ``"dtdt"``
        (continued part of ``d_{x^0} d_{y^0} K``; the uncontinued part is a
        distribution and is applied to data by ``petz_renyi_wedge``).

        The value kernel has a logarithmic singularity on ``x1 = y1``.
        Scalars in, float out.
        """
        x1 = np.asarray(x1, dtype=float)
        y1 = np.asarray(y1, dtype=float)
        shape = np.broadcast(x1, y1).shape
        if np.any(x1 <= 0) or np.any(y1 <= 0):
            raise DomainError("kernel points must satisfy x1, y1 > 0")
        if which == "dt":
            out = self._dt_kernel(x1 - y1, x1 + y1, alpha, m)
        elif which in ("value", "dtdt"):
            I0, I2, _ = self.equal_time_momentum_integrals(x1 - y1, x1 + y1, alpha, m)
            if which == "dtdt":
                out = I2 / (alpha - 1.0)
            else:
                d = np.abs(np.atleast_1d(x1 - y1))
                if np.any(d == 0):
                    raise DomainError("value kernel is singular at coincident points")
                out = (I0 - k0(m * d) / np.pi) / (alpha - 1.0)
        else:
            raise DomainError(f"unknown kernel component {which!r}")
        out = np.asarray(out).reshape(shape)
        return float(out) if out.ndim == 0 else out

    def _dt_kernel(self, delta, sigma, alpha: float, m: float) -> np.ndarray:
        """``(1/2pi) int (s p cos(c p D) + c omega sin(c p D)) e^(-s omega S) / omega dp``.

        The integrand is odd in ``p``, so the result vanishes up to rounding.
        """
        self._check_alpha(alpha)
        c, s = math.cos(math.pi * alpha), math.sin(math.pi * alpha)
        D = np.atleast_1d(delta).ravel()
        S = np.atleast_1d(sigma).ravel()

        def integrand(p: np.ndarray) -> np.ndarray:
            om = np.sqrt(p * p + m * m)[..., None]
            pp = p[..., None]
            damp = np.exp(-(s * S + self.regulator) * om)
            return (s * pp * np.cos(c * pp * D) / om + c * np.sin(c * pp * D)) * damp / (2 * np.pi)

        rate = s * float(S.min())
        res = self._quad.damped_momentum_integral(integrand, rate, self.tol, bound=1.0 / np.pi)
        return np.asarray(res.value, dtype=float).ravel() / (alpha - 1.0)

    # -- uncontinued part --------------------------------------------------

    def vacuum_form(self, data: WedgeCauchyData) -> QuadratureResult:
        """``iint K0(m|x-y|) [pi pi + phi' phi' + m**2 phi phi] dx dy``."""
        m = data.mass

        def integrand(sm: np.ndarray, d: np.ndarray) -> np.ndarray:
            u, v = sm + 0.5 * d, sm - 0.5 * d
            pair = (data.pi(u) * data.pi(v) + data.phi_prime(u) * data.phi_prime(v)
                    + m * m * data.phi(u) * data.phi(v))
            return k0(m * np.abs(d)) * pair

        return self._quad.integrate_2d_diag_log(integrand, data.support, self.tol, coordinates="sd")

    # -- entropies ---------------------------------------------------------

    def petz_renyi_wedge(
        self, data: WedgeCauchyData, alpha: float, method: str = "momentum"
    ) -> QuadratureResult:
        """Petz-Renyi entropy of ``W(f) Omega`` relative to the vacuum.

        ``(1/2) iint [K pi pi - 2 dK phi pi + ddK phi phi]`` at equal time.
        The ``"momentum"`` method performs the spatial integrals first:

            S = [ int_0^inf (|Pi_a|**2 + (p**2 + c**2 m**2) |Phi_a|**2) / omega dp
                  - vacuum_form ] / (2 pi (alpha - 1))

        with ``Pi_a(p) = int pi(x) exp((i c p - s omega) x) dx``.  The
        ``"kernel"`` method tabulates ``I0``, ``I2`` on a tensor grid.

        ``alpha = 0`` returns the endpoint value 0.
        """
        if alpha == 0.0:
            return QuadratureResult(0.0, 0.0, 0, True)
        self._check_alpha(alpha)
        if method == "momentum":
            continued = self._continued_momentum(data, alpha)
        elif method == "kernel":
            continued = self._continued_kernel(data, alpha)
        else:
            raise DomainError(f"unknown method {method!r}")
        vacuum = self.vacuum_form(data)
        factor = 1.0 / (2.0 * math.pi * (alpha - 1.0))
        out = (continued + vacuum.scaled(-1.0)).scaled(factor)
        if data.interpolation_error:
            out = replace(out, error_estimate=out.error_estimate
                          + 2.0 * data.interpolation_error * abs(vacuum.value * factor))
        log.debug("wedge S_%g [%s] = %.12g +- %.2e", alpha, method, out.value, out.error_estimate)
        return out

    def _continued_momentum(self, data: WedgeCauchyData, alpha: float) -> QuadratureResult:
        c, s = math.cos(math.pi * alpha), math.sin(math.pi * alpha)
        m = data.mass
        a, _ = data.support
        eps = self.regulator

        def integrand(p: np.ndarray) -> np.ndarray:
            om = np.sqrt(p * p + m * m)
            k = c * p + 1j * s * om
            Pi = self._transform(data.pi, data.support, k)
            Phi = self._transform(data.phi, data.support, k)
            return (np.abs(Pi) ** 2 + (p * p + c * c * m * m) * np.abs(Phi) ** 2) * np.exp(-eps * om) / om

        l1_pi = self._l1(data.pi, data.support)
        l1_phi = self._l1(data.phi, data.support)
        rate = s * a
        bound = l1_pi**2 / m + l1_phi**2 / (math.e * s * a)
        if bound == 0.0:
            return QuadratureResult(0.0, 0.0, 0, True)
        return self._quad.damped_momentum_integral(integrand, rate, self.tol, bound=bound,
                                                   half_line=True)

    def _continued_kernel(self, data: WedgeCauchyData, alpha: float, panels: int = 4) -> QuadratureResult:
        """Equal-time kernel pairing on a composite grid, refined up to 16 panels."""
        # back to the (2pi)-normalised half-line form used by the momentum path
        scale = np.pi
        while True:
            x, wk, wg = self._quad.composite_nodes(data.support, panels)
            pi, phi = data.pi(x), data.phi(x)
            norm = (wk @ np.abs(pi)) ** 2 + (wk @ np.abs(phi)) ** 2
            X, Y = np.meshgrid(x, x, indexing="ij")
            iu = np.triu_indices(x.size)
            I0, I2, kernel_err = self.equal_time_momentum_integrals(
                X[iu] - Y[iu], X[iu] + Y[iu], alpha, data.mass, 0.5 * self.tol / (scale * norm)
            )
            K0 = np.zeros_like(X)
            K2 = np.zeros_like(X)
            K0[iu], K2[iu] = I0, I2
            K0 = K0 + np.triu(K0, 1).T
            K2 = K2 + np.triu(K2, 1).T
            form = K0 * np.outer(pi, pi) + K2 * np.outer(phi, phi)
            value = scale * (wk @ form @ wk)
            coarse = scale * (wg @ form @ wg)
            err = abs(value - coarse) + scale * kernel_err * norm
            if err <= self.tol or panels >= 16:
                break
            panels *= 2
        if err > self.tol:
            log.warning("kernel pairing at alpha=%g stopped at %d panels, error %.2e", alpha, panels, err)
        return QuadratureResult(float(value), float(err), int(x.size**2), bool(err <= self.tol))

    def relative_entropy_wedge(self, data: WedgeCauchyData) -> QuadratureResult:
        """Boost Noether charge ``int pi x [pi**2 + phi'**2 + m**2 phi**2] dx``."""
        m2 = data.mass**2

        def integrand(x: np.ndarray) -> np.ndarray:
            return np.pi * x * (data.pi(x) ** 2 + data.phi_prime(x) ** 2 + m2 * data.phi(x) ** 2)

        return self._quad.integrate_1d(integrand, data.support, self.tol)

    def noether_charge(self, data: WedgeCauchyData) -> QuadratureResult:
        """``int 2 pi x T_00 dx``."""
        return self._quad.integrate_1d(
            lambda x: 2.0 * np.pi * x * energy_density(data, x), data.support, self.tol
        )

    def regulator_irrelevance(self, data: WedgeCauchyData, alpha: float) -> float:
        """``|S(eps) - S(eps / 2)|`` for the momentum regulator."""
        full = self.petz_renyi_wedge(data, alpha).value
        halved = WedgeScalar(self._quad, self.tol, 0.5 * self.regulator).petz_renyi_wedge(data, alpha).value
        return abs(full - halved)

    # -- commutator and strip checks --------------------------------------

    def _parseval(
        self, g: Profile, h: Profile, support: tuple[float, float], weight: Callable[[np.ndarray], np.ndarray]
    ) -> complex:
        """``(1/2pi) int weight(p) g^(p) conj(h^(p)) dp`` over the whole line.

        The cutoff doubles until the spectral tail drops below tolerance.
        """
        cutoff = 32.0
        while True:
            edge = np.array([cutoff])
            tail = abs(self._transform(g, support, edge)[0]) * abs(self._transform(h, support, edge)[0])
            if tail * cutoff < self.tol or cutoff > 4096:
                break
            cutoff *= 2.0

        def integrand(p: np.ndarray) -> np.ndarray:
            return weight(p) * self._transform(g, support, p) * np.conj(self._transform(h, support, p))

        res = self._quad.integrate_1d(integrand, (-cutoff, cutoff), self.tol, points=(0.0,))
        return complex(res.value) / (2.0 * np.pi)

    def commutator_position(
        self, g: Profile, h: Profile, support: tuple[float, float], t: float, m: float,
        tol: float | None = None,
    ) -> float:
        """``iint g(x) h(y) E(t, x - y)`` from the closed-form commutator function.

        ``E(t, D) = sgn(t) J0(m sqrt(t**2 - D**2)) / 2`` inside the light
        cone ``|D| < |t|`` and zero outside.
        """
        if t == 0.0:
            return 0.0
        x, wk, _ = self._quad.composite_nodes(support, 64)
        gw = g(x) * wk

        def integrand(D: np.ndarray) -> np.ndarray:
            D = np.asarray(D, dtype=float)
            corr = h(x - D[..., None]) @ gw
            return 0.5 * j0(m * np.sqrt(np.maximum(t * t - D * D, 0.0))) * corr

        res = self._quad.integrate_1d(integrand, (-abs(t), abs(t)), self.tol if tol is None else tol)
        return math.copysign(float(res.value), t)

    def commutator_momentum(
        self, g: Profile, h: Profile, support: tuple[float, float], t: float, m: float
    ) -> float:
        """The same pairing from ``E^(t, p) = sin(omega t) / omega``."""

        def weight(p):
            om = np.sqrt(p * p + m * m)
            return np.sin(om * t) * np.exp(-self.regulator * om) / om

        return self._parseval(g, h, support, weight).real

    def commutator_kernel_checks(self, m: float = 1.0, t: float = 0.5) -> dict[str, float]:
        """Smeared equal-time commutator relations for two bumps ``g``, ``h``.

        Returns
        -------
        dict
            ``equal_time``: imaginary part of the equal-time two-point
            pairing, which is the smeared ``E|_(x0=y0)``.
            ``time_derivative``: ``lim E(tau) / tau`` from the closed form,
            extrapolated in ``tau**2``, against ``int g h`` (``d_0 E = delta``).
            ``light_cone``: momentum against closed-form ``E`` at time ``t``.
            ``antisymmetry``: ``E_gh(t) + E_hg(-t)``.
        """
        if not m > 0:
            raise DomainError(f"mass must be positive, got {m}")
        g, _ = _bump_parts(1.5, 0.5, 1.0)
        h, _ = _bump_parts(1.8, 0.6, 1.0)
        support = (1.0, 2.4)

        def inverse_omega(p):
            om = np.sqrt(p * p + m * m)
            return np.exp(-self.regulator * om) / (2.0 * om)

        taus = (0.02, 0.01, 0.005)
        ratios = [self.commutator_position(g, h, support, tau, m, 1e-2 * self.tol * tau) / tau
                  for tau in taus]
        slope = self._quad.richardson_limit([tau * tau for tau in taus], ratios).extrapolated
        overlap = self._quad.integrate_1d(lambda x: g(x) * h(x), support, self.tol).value
        e_gh = self.commutator_momentum(g, h, support, t, m)
        tight = WedgeScalar(self._quad, 1e-2 * self.tol, self.regulator)
        cone = (tight.commutator_momentum(g, h, support, t, m)
                - tight.commutator_position(g, h, support, t, m))
        report = {
            "equal_time": abs(self._parseval(g, h, support, inverse_omega).imag),
            "time_derivative": abs(slope - overlap),
            "light_cone": abs(cone),
            "antisymmetry": abs(e_gh + self.commutator_momentum(h, g, support, -t, m)),
        }
        log.debug("commutator residuals %s", report)
        return report

    def strip_admissibility(self, z: complex, w: complex, x, y, m: float = 1.0) -> bool:
        """Whether ``(z, w)`` lies in the strip where ``exp(iH)`` stays bounded.

        There ``Im H >= 0``.  When admissible, ``Im H`` is also sampled on
        a momentum grid and a violation is logged.
        """
        if not (in_right_wedge(x) and in_right_wedge(y)):
            raise DomainError("strip test needs points in the closed right wedge")
        ok = BoostParameters(z, w).admissible
        if ok:
            p = np.linspace(-50.0, 50.0, 201)
            worst = float(np.min(imag_H(x, y, z, w, p, m)))
            scale = 1e-12 * (1.0 + float(np.max(np.abs(p))))
            if worst < -scale * (1.0 + abs(x[1]) + abs(y[1])):
                log.warning("Im H = %.3e < 0 inside the admissible strip", worst)
        return ok
