"""Layer 2: brute-force oracle on a truncated bosonic Fock space.

States are occupation-number vectors over ``modes`` single-particle modes
with total occupation at most ``cutoff``.  Mode ``k`` is the ``k``-th
orthonormal basis vector; for the modular oracle this is the ``k``-th
eigenvector of ``delta``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.special import comb
from scipy.stats import poisson

from .errors import DomainError, TruncationError

if TYPE_CHECKING:
    from .subspace import ModularData

log = logging.getLogger(__name__)

TAIL_TOL = 1e-8
AMPLIFICATION_TOL = 1e-10


@lru_cache(maxsize=32)
def _occupation_basis(modes: int, cutoff: int) -> np.ndarray:
    """All occupation tuples with total at most ``cutoff``, vacuum first."""
    states: list[tuple[int, ...]] = []

    def fill(prefix: tuple[int, ...], budget: int) -> None:
        if len(prefix) == modes:
            states.append(prefix)
            return
        for k in range(budget + 1):
            fill(prefix + (k,), budget - k)

    fill((), cutoff)
    states.sort(key=sum)
    return np.array(states, dtype=np.int64).reshape(len(states), modes)


def amplification_bound(mean: float, amplification: float, cutoff: int) -> float:
    """Bound on ``<psi|A|psi>`` lost above ``cutoff`` for a coherent ``psi``.

    ``A`` multiplies an ``m``-particle state by at most
    ``amplification**m``; the coherent occupation is Poisson with
    parameter ``mean``.
    """
    amp = max(amplification, 1.0)
    return math.exp(mean * (amp - 1.0)) * float(poisson.sf(cutoff, mean * amp))


@dataclass(frozen=True)
class CoherentVector:
    """Truncated amplitudes of ``W(f) Omega``.

    ``coefficients`` are the mode coefficients of ``f``;
    ``truncation_error`` is the Poisson tail of mean ``<f, f>`` above the
    cutoff.
    """

    coefficients: np.ndarray
    amplitudes: np.ndarray
    truncation_error: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class TruncatedFock:
    """Symmetric Fock space over ``C^modes`` truncated at total occupation.

    Parameters
    ----------
    modes : int
        Number of single-particle modes ``n``.
    cutoff : int
        Maximum total occupation ``N``; the dimension is ``C(N + n, n)``.
    """

    def __init__(self, modes: int, cutoff: int) -> None:
        if modes < 1 or cutoff < 1:
            raise DomainError("Fock space needs at least one mode and cutoff >= 1")
        self.modes = modes
        self.cutoff = cutoff
        self.occupations = _occupation_basis(modes, cutoff)
        self._keys = self._encode(self.occupations)
        self._order = np.argsort(self._keys)
        self._annihilators = [self._build_annihilator(k) for k in range(modes)]
        log.debug("Fock space: %d modes, cutoff %d, dimension %d", modes, cutoff, self.dim)

    @classmethod
    def for_coherent(
        cls,
        modes: int,
        mean: float,
        amplification: float = 1.0,
        tol: float = AMPLIFICATION_TOL,
        max_cutoff: int = 60,
    ) -> TruncatedFock:
        """Smallest cutoff whose amplified coherent tail is below ``tol``."""
        for cutoff in range(2, max_cutoff + 1):
            if amplification_bound(mean, amplification, cutoff) <= tol:
                return cls(modes, cutoff + 2)
        raise TruncationError(
            f"no cutoff up to {max_cutoff} bounds the coherent tail by {tol:g}",
            suggested_cutoff=max_cutoff + 10,
        )

    # -- basis -------------------------------------------------------------

    @property
    def dim(self) -> int:
        return int(self.occupations.shape[0])

    @staticmethod
    def expected_dim(modes: int, cutoff: int) -> int:
        return int(comb(cutoff + modes, modes, exact=True))

    def _encode(self, occ: np.ndarray) -> np.ndarray:
        base = self.cutoff + 1
        return occ @ (base ** np.arange(self.modes, dtype=np.int64))

    def _index(self, occ: np.ndarray) -> np.ndarray:
        keys = self._encode(occ)
        pos = np.searchsorted(self._keys[self._order], keys)
        return self._order[pos]

    def _build_annihilator(self, k: int) -> sp.csr_matrix:
        occ = self.occupations
        rows_from = np.flatnonzero(occ[:, k] > 0)
        lowered = occ[rows_from].copy()
        lowered[:, k] -= 1
        targets = self._index(lowered)
        data = np.sqrt(occ[rows_from, k].astype(float))
        return sp.csr_matrix((data, (targets, rows_from)), shape=(self.dim, self.dim))

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def total_occupation(self) -> np.ndarray:
        return self.occupations.sum(axis=1)

    def project(self, psi: np.ndarray, max_total: int) -> np.ndarray:
        """Zero all components with total occupation above ``max_total``."""
        out = np.array(psi, dtype=complex)
        out[self.total_occupation() > max_total] = 0.0
        return out

    # -- operators ---------------------------------------------------------

    def annihilator(self, k: int) -> sp.csr_matrix:
        return self._annihilators[k]

    def _coefficients(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=complex).ravel()
        if c.size != self.modes:
            raise DomainError(f"expected {self.modes} mode coefficients, got {c.size}")
        return c

    def field_operator(self, c: np.ndarray) -> sp.csr_matrix:
        """``phi(f) = a(f) + a*(f)`` with ``a(f) = sum_k conj(c_k) a_k``."""
        c = self._coefficients(c)
        a = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for ck, ak in zip(c, self._annihilators):
            if ck != 0:
                a = a + np.conj(ck) * ak
        return (a + a.conj().T).tocsr()

    def weyl_apply(self, c: np.ndarray, psi: np.ndarray) -> np.ndarray:
        """``W(f) psi = exp(i phi(f)) psi``."""
        if not np.any(self._coefficients(c)):
            return np.array(psi, dtype=complex)
        return expm_multiply(1j * self.field_operator(c), np.asarray(psi, dtype=complex))

    def coherent_vector(self, c: np.ndarray, tail_tol: float = TAIL_TOL) -> CoherentVector:
        """``W(f) Omega`` by exponentiating the truncated field operator.

        Raises
        ------
        TruncationError
            If the Poisson tail of mean ``<f, f>`` above the cutoff exceeds
            ``tail_tol``.
        """
        c = self._coefficients(c)
        mean = float(np.vdot(c, c).real)
        tail = float(poisson.sf(self.cutoff, mean)) if mean > 0 else 0.0
        if tail > tail_tol:
            suggested = int(poisson.isf(tail_tol, mean)) + 2
            raise TruncationError(
                f"coherent tail {tail:.3e} above cutoff {self.cutoff}", suggested
            )
        return CoherentVector(c, self.weyl_apply(c, self.vacuum()), tail)

    def relative_coherent_vector(self, c_f: np.ndarray, c_g: np.ndarray) -> np.ndarray:
        """``W(g)* W(f) Omega``: the excitation of ``W(f)Omega`` relative to ``W(g)Omega``."""
        psi = self.weyl_apply(c_f, self.vacuum())
        return self.weyl_apply(-self._coefficients(c_g), psi)

    def second_quantized(self, eigenvalues: np.ndarray, exponent: complex) -> sp.dia_matrix:
        """``Gamma(D**exponent)`` for ``D`` diagonal in the mode basis."""
        logs = np.log(np.asarray(eigenvalues, dtype=float))
        if logs.size != self.modes:
            raise DomainError("one eigenvalue per mode is required")
        diag = np.exp(complex(exponent) * (self.occupations @ logs))
        if np.isrealobj(exponent) or complex(exponent).imag == 0:
            diag = diag.real
        return sp.diags(diag)

    def second_quantized_power(self, M: ModularData, r: float) -> sp.dia_matrix:
        """``Gamma(delta**r)``: multiplies ``|n>`` by ``prod_k lambda_k**(r n_k)``."""
        return self.second_quantized(M.delta_eigenvalues, r)

    def modular_correlation(self, M: ModularData, psi: np.ndarray, z: complex) -> complex:
        """``<psi| Gamma(delta**(iz)) |psi>``."""
        op = self.second_quantized(M.delta_eigenvalues, 1j * complex(z))
        return complex(np.vdot(psi, op @ psi))

    # -- entropies ---------------------------------------------------------

    def expectation_power(self, M: ModularData, psi: np.ndarray, r: float) -> float:
        return float(np.vdot(psi, self.second_quantized_power(M, r) @ psi).real)

    def check_amplification(self, M: ModularData, mean: float, r: float) -> float:
        """Raise ``TruncationError`` when ``Gamma(delta**r)`` amplifies the cut tail."""
        amp = float(np.max(M.delta_eigenvalues ** r))
        bound = amplification_bound(mean, amp, self.cutoff)
        # relative to the smallest possible expectation exp(-mean)
        relative = bound * math.exp(mean)
        if relative > AMPLIFICATION_TOL:
            suggested = self.cutoff
            while amplification_bound(mean, amp, suggested) * math.exp(mean) > AMPLIFICATION_TOL:
                suggested += 1
                if suggested > 10 * self.cutoff + 100:
                    break
            raise TruncationError(
                f"Gamma(delta^{r:g}) amplifies the truncated tail to {relative:.3e}",
                suggested + 2,
            )
        return relative

    def petz_renyi_of_vector(self, M: ModularData, psi: np.ndarray, alpha: float) -> float:
        """``ln<psi|Gamma(delta**(1-alpha))|psi> / (alpha - 1)``."""
        if not 0.0 <= alpha < 1.0:
            raise DomainError(f"alpha must lie in [0, 1), got {alpha!r}")
        value = self.expectation_power(M, psi, 1.0 - alpha)
        return math.log(value) / (alpha - 1.0)

    def petz_renyi_bruteforce(self, M: ModularData, f: np.ndarray, alpha: float) -> float:
        """Petz-Renyi entropy of ``W(f) Omega`` relative to ``Omega``.

        Parameters
        ----------
        M : ModularData
            Modular data of the standard subspace containing ``f``.
        f : np.ndarray
            Real ambient coordinates of ``f``.
        alpha : float
            Renyi parameter in ``[0, 1)``.
        """
        f = np.asarray(f, dtype=float)
        if not np.any(f):
            return 0.0
        if not M.in_subspace(f):
            raise DomainError("vector does not lie in the standard subspace")
        c = M.mode_coefficients(f)
        mean = float(np.vdot(c, c).real)
        self.check_amplification(M, mean, 1.0 - alpha)
        psi = self.coherent_vector(c).amplitudes
        return self.petz_renyi_of_vector(M, psi, alpha)


def closed_form_expectation(M: ModularData, f: np.ndarray, r: float) -> float:
    """``exp(<f, delta**r f> - <f, f>)``, the Gaussian value of the oracle."""
    c = M.mode_coefficients(np.asarray(f, dtype=float))
    w = np.abs(c) ** 2
    return math.exp(math.fsum(w * np.expm1(r * np.log(M.delta_eigenvalues))))
