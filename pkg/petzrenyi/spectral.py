"""Layer 2: entropy functionals over discrete spectral measures.

A ``SpectralMeasure`` is a finite set of atoms ``(lambda_i, w_i)``.  For a
state measure the weights sum to one; for a vector measure they sum to
the squared norm of the vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, NormalizationError, UsageError

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class SpectralMeasure:
    """Discrete positive measure on ``(0, inf)``.

    Attributes
    ----------
    lambdas : np.ndarray
        Atom locations, all strictly positive.
    weights : np.ndarray
        Non-negative atom masses.
    label : str
        Provenance of the measure.
    """

    lambdas: np.ndarray
    weights: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        lam = np.asarray(self.lambdas, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if lam.shape != w.shape:
            raise DomainError("lambdas and weights must have the same length")
        if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
            raise DomainError("spectral atoms must be positive and finite")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise DomainError("spectral weights must be non-negative and finite")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[float, float]], label: str = "") -> SpectralMeasure:
        pairs = list(atoms)
        if not pairs:
            return cls.empty(label)
        lam, w = zip(*pairs)
        return cls(np.array(lam, dtype=float), np.array(w, dtype=float), label)

    @classmethod
    def empty(cls, label: str = "") -> SpectralMeasure:
        return cls(np.empty(0), np.empty(0), label)

    # -- moments ------------------------------------------------------------

    @property
    def size(self) -> int:
        return int(self.lambdas.size)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    @property
    def first_moment(self) -> float:
        return math.fsum(self.weights * self.lambdas)

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return abs(self.total_mass - 1.0) <= tol

    def require_state(self, tol: float = NORMALIZATION_TOL) -> None:
        """Raise unless this is a non-empty normalized state measure."""
        if self.size == 0:
            raise DomainError("empty spectral measure")
        if not self.is_normalized(tol):
            raise NormalizationError(self.total_mass, tol)

    def merged(self, rel_tol: float = 1e-9) -> SpectralMeasure:
        """Combine atoms whose locations agree to ``rel_tol``."""
        if self.size == 0:
            return self
        order = np.argsort(self.lambdas, kind="stable")
        lam = self.lambdas[order]
        w = self.weights[order]
        out_lam = [lam[0]]
        out_w = [w[0]]
        for x, y in zip(lam[1:], w[1:]):
            if abs(x - out_lam[-1]) <= rel_tol * max(x, out_lam[-1]):
                out_w[-1] += y
            else:
                out_lam.append(x)
                out_w.append(y)
        return SpectralMeasure(np.array(out_lam), np.array(out_w), self.label)

    def rows(self) -> list[tuple[float, float]]:
        """Atoms as ``(lambda, weight)`` rows, for CSV export."""
        return [(float(x), float(y)) for x, y in zip(self.lambdas, self.weights)]


@dataclass(frozen=True)
class AlphaGrid:
    """Sorted grid of Renyi parameters in ``[0, 1)``.

    ``extrapolation_targets`` holds the dyadic ladder ``1 - 2**-k`` used
    to bridge the interior to the ``alpha -> 1`` closed forms.
    """

    values: tuple[float, ...]
    extrapolation_targets: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        vals = tuple(float(a) for a in self.values)
        if not vals:
            raise UsageError("alpha_grid", "alpha grid is empty")
        for a in vals:
            if not 0.0 <= a < 1.0:
                raise UsageError("alpha_grid", f"alpha {a!r} outside [0, 1)")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise UsageError("alpha_grid", "alpha grid must be strictly increasing")
        object.__setattr__(self, "values", vals)
        targets = tuple(float(a) for a in self.extrapolation_targets)
        if any(not 0.0 < a < 1.0 for a in targets):
            raise UsageError("alpha_grid", "extrapolation targets must lie in (0, 1)")
        object.__setattr__(self, "extrapolation_targets", targets)

    @classmethod
    def parse(cls, text: str) -> AlphaGrid:
        """Parse ``"0.1,0.2,0.3"`` or ``"0.1:0.9:9"`` (start:stop:count)."""
        text = text.strip()
        if not text:
            raise UsageError("alpha_grid", "alpha grid is empty")
        try:
            if ":" in text:
                start, stop, count = text.split(":")
                return cls.uniform(float(start), float(stop), int(count))
            return cls(tuple(float(tok) for tok in text.split(",") if tok.strip()))
        except ValueError as exc:
            raise UsageError("alpha_grid", f"cannot parse {text!r}: {exc}") from exc

    @classmethod
    def uniform(cls, start: float, stop: float, count: int) -> AlphaGrid:
        if count < 1:
            raise UsageError("alpha_grid", "alpha grid is empty")
        vals = np.linspace(start, stop, count)
        return cls(tuple(float(round(a, 15)) for a in vals))

    @staticmethod
    def dyadic(k_first: int, k_last: int) -> tuple[float, ...]:
        """Ladder ``1 - 2**-k`` for ``k = k_first..k_last``."""
        if k_last - k_first < 2 or k_first < 1:
            raise UsageError("ladder_k", "need at least three rungs with k >= 1")
        return tuple(1.0 - 2.0**-k for k in range(k_first, k_last + 1))

    def interior(self) -> AlphaGrid:
        """Return ``self`` after checking every value lies in ``(0, 1)``."""
        if self.values[0] <= 0.0:
            raise UsageError("alpha_grid", "field models need alpha strictly inside (0, 1)")
        return self

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


# -- functionals ---------------------------------------------------------


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"alpha must lie in [0, 1), got {alpha!r}")


def _log_lambdas(m: SpectralMeasure) -> np.ndarray:
    return np.log(m.lambdas)


def log_moment_F(m: SpectralMeasure, r: float) -> float:
    """``F(r) = -ln sum_i w_i lambda_i**r`` for a state measure."""
    m.require_state()
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r must lie in [0, 1], got {r!r}")
    if r == 0.0:
        return -math.log(m.total_mass)
    return -float(logsumexp(r * _log_lambdas(m), b=m.weights))


def petz_renyi_from_measure(m: SpectralMeasure, alpha: float) -> float:
    """Petz-Renyi relative entropy ``ln(sum w lambda**(1-alpha)) / (alpha-1)``.

    Evaluated as ``F(1 - alpha) / (1 - alpha)`` with a log-sum-exp, so
    widely spread spectra do not overflow.
    """
    _check_alpha(alpha)
    m.require_state()
    r = 1.0 - alpha
    return log_moment_F(m, r) / r


def relative_entropy_from_measure(m: SpectralMeasure) -> float:
    """Araki-Uhlmann relative entropy ``-sum w ln lambda``.

    Returns ``math.inf`` when the log-moment diverges.
    """
    m.require_state()
    terms = m.weights * _log_lambdas(m)
    if not np.all(np.isfinite(terms)):
        return math.inf
    value = -math.fsum(terms)
    return value if math.isfinite(value) else math.inf


def renyi_vector_entropy_from_measure(m: SpectralMeasure, alpha: float) -> float:
    """Renyi entropy of a vector: ``sum w (lambda**(1-alpha) - 1) / (alpha - 1)``."""
    _check_alpha(alpha)
    if m.size == 0:
        return 0.0
    r = 1.0 - alpha
    # expm1 keeps lambda near 1 accurate
    terms = m.weights * np.expm1(r * _log_lambdas(m))
    return -math.fsum(terms) / r


def entropy_from_vector_measure(m: SpectralMeasure) -> float:
    """Entropy of a vector: ``-sum w ln lambda`` without normalization."""
    if m.size == 0:
        return 0.0
    return -math.fsum(m.weights * _log_lambdas(m))


def alpha_derivative_from_measure(m: SpectralMeasure, *, vector: bool = False) -> float:
    """Slope of ``S_alpha`` at ``alpha = 1``.

    For a state measure this is half the variance of ``ln lambda``; for a
    vector measure it is ``(1/2) sum w (ln lambda)**2``.
    """
    if m.size == 0:
        return 0.0
    logs = _log_lambdas(m)
    second = math.fsum(m.weights * logs**2)
    if vector:
        return 0.5 * second
    m.require_state()
    first = math.fsum(m.weights * logs)
    return 0.5 * (second - first * first)


def modular_flow_on_strip(m: SpectralMeasure, z: complex) -> complex:
    """``sum_i w_i lambda_i**(i z)`` for ``-1 <= Im z <= 0``."""
    m.require_state()
    z = complex(z)
    if not -1.0 - 1e-15 <= z.imag <= 1e-15:
        raise DomainError(f"z = {z!r} lies outside the strip -1 <= Im z <= 0")
    phases = np.exp(1j * z * _log_lambdas(m))
    return complex(np.sum(m.weights * phases))


def continuation_log(m: SpectralMeasure, z: complex) -> complex:
    """Principal logarithm of ``modular_flow_on_strip(m, z)``."""
    return complex(np.log(modular_flow_on_strip(m, z)))


def random_state_measure(
    rng: np.random.Generator,
    atoms: int,
    log_range: float = 3.0,
    label: str = "random",
) -> SpectralMeasure:
    """Random state measure with ``sum w = 1`` and ``sum w lambda = 1``.

    Weights are Dirichlet distributed; locations are log-uniform and then
    rescaled so the first moment equals one, as for a measure coming from
    a pair of unit vectors.
    """
    if atoms < 1:
        raise DomainError("need at least one atom")
    w = rng.dirichlet(np.ones(atoms))
    lam = np.exp(rng.uniform(-log_range, log_range, size=atoms))
    lam = lam / np.dot(w, lam)
    return SpectralMeasure(lam, w, label)


def grid_values(m: SpectralMeasure, alphas: Sequence[float]) -> np.ndarray:
    """``petz_renyi_from_measure`` over a sequence of alphas."""
    return np.array([petz_renyi_from_measure(m, a) for a in alphas])
