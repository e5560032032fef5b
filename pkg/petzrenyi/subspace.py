"""Layer 2: modular theory of standard subspaces in finite dimension.

A complex Hilbert space of dimension ``n`` is represented as ``R^(2n)``
with a real metric ``g`` and complex structure ``J``; the complex scalar
product is ``<x, y> = g(x, y) + i g(Jx, y)``.  The Tomita operator is only
real-linear, so all adjoints are taken with respect to ``g``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as la

from .errors import DomainError, FactorialityError, StandardnessError
from .spectral import (
    SpectralMeasure,
    entropy_from_vector_measure,
    renyi_vector_entropy_from_measure,
)

log = logging.getLogger(__name__)

FACTORIALITY_TOL = 1e-8
RANK_TOL = 1e-10
MEMBERSHIP_TOL = 1e-10

_ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


def realify(matrix: np.ndarray) -> np.ndarray:
    """Real ``2n x 2n`` form of a complex ``n x n`` matrix.

    Uses interleaved coordinates ``(Re z_1, Im z_1, Re z_2, ...)``.
    """
    matrix = np.asarray(matrix, dtype=complex)
    return np.kron(matrix.real, np.eye(2)) + np.kron(matrix.imag, _ROTATION)


def to_real(z: np.ndarray) -> np.ndarray:
    """Interleaved real coordinates of a complex vector (or matrix columns)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty((2 * z.shape[0],) + z.shape[1:])
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def from_real(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


@dataclass(frozen=True)
class ComplexHilbertSpaceReal:
    """``C^n`` as ``R^(2n)`` with metric ``g`` and complex structure ``J``."""

    metric: np.ndarray
    complex_structure: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.metric, dtype=float)
        J = np.asarray(self.complex_structure, dtype=float)
        dim = g.shape[0]
        if g.shape != (dim, dim) or J.shape != (dim, dim) or dim % 2:
            raise DomainError("metric and complex structure must be square of even size")
        scale = max(1.0, float(np.max(np.abs(g))))
        if np.max(np.abs(g - g.T)) > 1e-12 * scale:
            raise DomainError("metric is not symmetric")
        if np.min(la.eigvalsh(g)) <= 0:
            raise DomainError("metric is not positive definite")
        if np.max(np.abs(J @ J + np.eye(dim))) > 1e-10:
            raise DomainError("complex structure does not square to -1")
        if np.max(np.abs(J.T @ g @ J - g)) > 1e-10 * scale:
            raise DomainError("complex structure is not orthogonal for the metric")
        object.__setattr__(self, "metric", g)
        object.__setattr__(self, "complex_structure", J)

    @classmethod
    def canonical(cls, n: int) -> ComplexHilbertSpaceReal:
        """``g = identity``, ``J`` = block rotation by +90 degrees."""
        return cls(np.eye(2 * n), realify(1j * np.eye(n)))

    @property
    def dim_complex(self) -> int:
        return self.metric.shape[0] // 2

    @property
    def dim_real(self) -> int:
        return self.metric.shape[0]

    # -- forms --------------------------------------------------------------

    def inner(self, x: np.ndarray, y: np.ndarray) -> complex:
        """Complex scalar product, anti-linear in the first argument."""
        g, J = self.metric, self.complex_structure
        return complex(x @ g @ y + 1j * ((J @ x) @ g @ y))

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(max(x @ self.metric @ x, 0.0)))

    def symplectic(self, x: np.ndarray, y: np.ndarray) -> float:
        """``sigma(x, y) = 2 g(Jx, y)``, twice the imaginary part of ``<x, y>``."""
        return float(2.0 * (self.complex_structure @ x) @ self.metric @ y)

    def adjoint(self, A: np.ndarray) -> np.ndarray:
        """Adjoint of a real-linear map with respect to ``g``."""
        return la.solve(self.metric, A.T @ self.metric, assume_a="pos")

    # -- complex coordinates -------------------------------------------------

    def complex_frame(self) -> np.ndarray:
        """Real ``2n x n`` matrix ``B`` with ``{b_k, J b_k}`` g-orthonormal."""
        g, J = self.metric, self.complex_structure
        frame: list[np.ndarray] = []
        for e in np.eye(self.dim_real):
            v = e.copy()
            for _ in range(2):
                for b in frame:
                    v = v - (b @ g @ v) * b - ((J @ b) @ g @ v) * (J @ b)
            nrm = np.sqrt(v @ g @ v)
            if nrm > 1e-8:
                frame.append(v / nrm)
            if len(frame) == self.dim_complex:
                break
        return np.column_stack(frame)

    def coordinate_maps(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(C, B)`` with ``c = C x`` and ``x = B Re(c) + J B Im(c)``.

        ``C`` is complex ``n x 2n``; the returned ``B`` is the real frame
        from :meth:`complex_frame`.
        """
        B = self.complex_frame()
        C = B.T @ self.metric + 1j * (self.complex_structure @ B).T @ self.metric
        return C, B

    def complex_linear_to_real(self, Mc: np.ndarray, C: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Real matrix of the complex-linear map ``Mc`` written in frame ``B``."""
        JB = self.complex_structure @ B
        Cre, Cim = C.real, C.imag
        Mre, Mim = Mc.real, Mc.imag
        return B @ (Mre @ Cre - Mim @ Cim) + JB @ (Mim @ Cre + Mre @ Cim)


@dataclass(frozen=True)
class StandardSubspace:
    """Real-linear span of the columns of ``basis`` inside ``ambient``."""

    ambient: ComplexHilbertSpaceReal
    basis: np.ndarray

    def __post_init__(self) -> None:
        B = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if B.shape[0] != self.ambient.dim_real:
            raise DomainError("basis vectors do not match the ambient dimension")
        object.__setattr__(self, "basis", B)

    def check_standard(self) -> None:
        """Rank tests for ``L cap JL = 0`` and ``L + JL = whole space``."""
        B = self.basis
        J = self.ambient.complex_structure
        n2 = self.ambient.dim_real
        if _rank(B) < B.shape[1]:
            raise StandardnessError("basis columns are linearly dependent")
        rank = _rank(np.hstack([B, J @ B]))
        if rank < 2 * B.shape[1]:
            raise StandardnessError("L and JL intersect", f"rank {rank} < {2 * B.shape[1]}")
        if rank < n2:
            raise StandardnessError("L + JL is not the whole space", f"rank {rank} < {n2}")

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        coeffs, *_ = la.lstsq(self.basis, x)
        resid = np.linalg.norm(self.basis @ coeffs - x)
        return bool(resid <= tol * max(1.0, np.linalg.norm(x)))

    def symplectic_complement(self) -> np.ndarray:
        """Basis of ``L' = {x : sigma(x, h) = 0 for all h in L}``."""
        J, g = self.ambient.complex_structure, self.ambient.metric
        return la.null_space((J.T @ g @ self.basis).T)

    def is_factorial(self) -> bool:
        """``L cap L' = {0}``, tested by rank."""
        comp = self.symplectic_complement()
        stacked = np.hstack([self.basis, comp])
        return _rank(stacked) == self.basis.shape[1] + comp.shape[1]

    def random_vector(self, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
        """Random element of ``L`` with complex norm ``norm``."""
        x = self.basis @ rng.standard_normal(self.basis.shape[1])
        return x * (norm / self.ambient.norm(x))


def _rank(A: np.ndarray) -> int:
    sv = la.svdvals(A)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > RANK_TOL * sv[0]))


@dataclass(frozen=True)
class ModularData:
    """Modular objects ``s = j delta^(1/2)`` of a factorial standard subspace.

    ``delta_eigenvalues`` lists the ``n`` complex eigenvalues; the real
    frame ``delta_eigenvectors`` carries each eigenvector ``e_k`` followed
    by ``J e_k``.
    """

    ambient: ComplexHilbertSpaceReal
    delta_eigenvalues: np.ndarray
    delta_eigenvectors: np.ndarray
    j_matrix: np.ndarray
    s_matrix: np.ndarray
    delta_matrix: np.ndarray
    unitary: np.ndarray
    coordinates: np.ndarray
    frame: np.ndarray

    @property
    def modes(self) -> int:
        return int(self.delta_eigenvalues.size)

    def power(self, z: complex) -> np.ndarray:
        """Real matrix of ``delta**z`` for complex ``z``."""
        phases = np.exp(complex(z) * np.log(self.delta_eigenvalues))
        Mc = (self.unitary * phases) @ self.unitary.conj().T
        return self.ambient.complex_linear_to_real(Mc, self.coordinates, self.frame)

    def mode_coefficients(self, f: np.ndarray) -> np.ndarray:
        """``c_k = <e_k, f>`` in the orthonormal delta-eigenbasis."""
        return self.unitary.conj().T @ (self.coordinates @ f)

    def from_modes(self, c: np.ndarray) -> np.ndarray:
        """Real vector with mode coefficients ``c``."""
        z = self.unitary @ np.asarray(c, dtype=complex)
        J = self.ambient.complex_structure
        return self.frame @ z.real + J @ self.frame @ z.imag

    def in_subspace(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        """``x`` lies in ``L`` exactly when ``s x = x``."""
        resid = self.ambient.norm(self.s_matrix @ x - x)
        return resid <= tol * max(1.0, self.ambient.norm(x))

    def residuals(self) -> dict[str, float]:
        """Matrix residuals of the defining modular identities."""
        J = self.ambient.complex_structure
        delta, j, s = self.delta_matrix, self.j_matrix, self.s_matrix
        inv = self.power(-1.0)
        ident = np.eye(delta.shape[0])
        return {
            "j_delta_j": float(np.max(np.abs(j @ delta @ j - inv))),
            "delta_J": float(np.max(np.abs(delta @ J - J @ delta))),
            "j_involution": float(np.max(np.abs(j @ j - ident))),
            "j_antilinear": float(np.max(np.abs(j @ J + J @ j))),
            "s_polar": float(np.max(np.abs(j @ self.power(0.5) - s))),
        }

    def spectrum_pairing(self) -> float:
        """Largest relative gap between ``lambda`` and the nearest ``1/mu``."""
        lam = np.sort(self.delta_eigenvalues)
        inv = np.sort(1.0 / lam)
        return float(np.max(np.abs(lam - inv) / lam))

    def spectrum_rows(self, f: np.ndarray | None = None) -> list[tuple[int, float, float]]:
        """``(mode, lambda, weight)`` per eigenvalue, unmerged.

        ``weight`` is ``|c_k|**2`` for the mode coefficients of ``f``, or
        ``nan`` without a vector.
        """
        if f is None:
            weights = np.full(self.modes, np.nan)
        else:
            weights = np.abs(self.mode_coefficients(np.asarray(f, dtype=float))) ** 2
        pairs = zip(self.delta_eigenvalues, weights)
        return [(k, float(lam), float(w)) for k, (lam, w) in enumerate(pairs)]


# -- modular construction ------------------------------------------------


def build_tomita(L: StandardSubspace) -> np.ndarray:
    """Real matrix ``S`` with ``S(h + Jk) = h - Jk`` for ``h, k`` in ``L``."""
    L.check_standard()
    J = L.ambient.complex_structure
    B = L.basis
    return np.hstack([B, -J @ B]) @ la.inv(np.hstack([B, J @ B]))


def modular_operator(L: StandardSubspace, *, check_factorial: bool = True) -> ModularData:
    """Polar decomposition of the Tomita operator.

    Raises
    ------
    FactorialityError
        If an eigenvalue of ``delta`` lies within ``FACTORIALITY_TOL`` of 1.
    """
    S = build_tomita(L)
    H = L.ambient
    delta = H.adjoint(S) @ S
    C, B = H.coordinate_maps()
    delta_c = C @ delta @ B
    delta_c = 0.5 * (delta_c + delta_c.conj().T)
    lam, U = la.eigh(delta_c)
    log.debug("modular spectrum %s", lam)
    if np.min(lam) <= 0:
        raise StandardnessError("modular operator is not positive definite")
    if check_factorial:
        close = np.abs(lam - 1.0) < FACTORIALITY_TOL
        if np.any(close):
            raise FactorialityError(float(lam[np.argmax(close)]))

    J = H.complex_structure
    vecs = []
    for k in range(lam.size):
        e = B @ U[:, k].real + J @ B @ U[:, k].imag
        vecs.extend([e, J @ e])
    frame = np.column_stack(vecs)

    unfinished = ModularData(
        ambient=H,
        delta_eigenvalues=lam,
        delta_eigenvectors=frame,
        j_matrix=np.zeros_like(S),
        s_matrix=S,
        delta_matrix=delta,
        unitary=U,
        coordinates=C,
        frame=B,
    )
    return replace(unfinished, j_matrix=S @ unfinished.power(-0.5))


def flow_residual(M: ModularData, L: StandardSubspace, t: float) -> float:
    """How far ``delta**(it)`` moves the basis of ``L`` out of ``L``."""
    U = M.power(1j * t)
    worst = 0.0
    for h in L.basis.T:
        x = U @ h
        resid = M.ambient.norm(M.s_matrix @ x - x) / max(M.ambient.norm(x), 1e-300)
        worst = max(worst, resid)
    return worst


def vector_spectral_measure(M: ModularData, f: np.ndarray, label: str = "") -> SpectralMeasure:
    """Spectral measure ``d(f, e_lambda f)`` of ``f`` in ``L``."""
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        return SpectralMeasure.empty(label)
    if not M.in_subspace(f):
        raise DomainError("vector does not lie in the standard subspace")
    c = M.mode_coefficients(f)
    measure = SpectralMeasure(M.delta_eigenvalues, np.abs(c) ** 2, label)
    return measure.merged()


def renyi_entropy_of_vector(L: StandardSubspace, f: np.ndarray, alpha: float) -> float:
    """Renyi entropy of ``f`` in ``L`` at parameter ``alpha``."""
    M = modular_operator(L)
    return renyi_vector_entropy_from_measure(vector_spectral_measure(M, f), alpha)


def entropy_of_vector(L: StandardSubspace, f: np.ndarray) -> float:
    """Entropy ``-(f, ln(delta) f)`` of ``f`` in ``L``."""
    M = modular_operator(L)
    return entropy_from_vector_measure(vector_spectral_measure(M, f))


def log_correlation(M: ModularData, f: np.ndarray, z: complex) -> complex:
    """``<f, delta**(iz) f> - <f, f>``: log of the coherent modular correlation."""
    c = M.mode_coefficients(np.asarray(f, dtype=float))
    phases = np.exp(1j * complex(z) * np.log(M.delta_eigenvalues))
    return complex(np.sum(np.abs(c) ** 2 * (phases - 1.0)))


def log_correlation_symplectic(M: ModularData, f: np.ndarray, t: float) -> complex:
    """Same quantity for real ``t`` through the symplectic form.

    ``-(1/2)||f_{t/2} - f_{-t/2}||**2 + (i/2) sigma(f_{-t/2}, f_{t/2})``
    with ``f_t = delta**(it) f``.
    """
    H = M.ambient
    plus = M.power(0.5j * t) @ f
    minus = M.power(-0.5j * t) @ f
    diff = plus - minus
    return complex(-0.5 * H.norm(diff) ** 2 + 0.5j * H.symplectic(minus, plus))


# -- example subspaces ---------------------------------------------------


def canonical_factorial_subspace(lam: float) -> StandardSubspace:
    """``L = {(z, sqrt(lam) conj z)}`` in ``C^2``; ``delta = diag(lam, 1/lam)``."""
    if lam <= 0 or abs(lam - 1.0) < FACTORIALITY_TOL:
        raise DomainError(f"mode-pair eigenvalue must be positive and not 1, got {lam}")
    r = np.sqrt(lam)
    basis = np.array([[1.0, 0.0], [0.0, 1.0], [r, 0.0], [0.0, -r]])
    return StandardSubspace(ComplexHilbertSpaceReal.canonical(2), basis)


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_factorial_subspace(
    rng: np.random.Generator,
    pairs: int,
    lam_range: tuple[float, float] = (0.2, 5.0),
    gap: tuple[float, float] = (0.8, 1.25),
) -> tuple[StandardSubspace, np.ndarray]:
    """Random factorial standard subspace of complex dimension ``2 * pairs``.

    Built as a random unitary image of a direct sum of canonical mode
    pairs, then expressed in a random compatible metric and a random real
    basis.  Returns the subspace and the mode-pair eigenvalues ``lambda_k``
    (the full spectrum is ``{lambda_k, 1/lambda_k}``).
    """
    lo, hi = np.log(lam_range[0]), np.log(lam_range[1])
    glo, ghi = np.log(gap[0]), np.log(gap[1])
    lams = []
    while len(lams) < pairs:
        x = rng.uniform(lo, hi)
        if not glo <= x <= ghi:
            lams.append(float(np.exp(x)))
    lams_arr = np.array(lams)

    n = 2 * pairs
    cols = []
    for k, lam in enumerate(lams_arr):
        r = np.sqrt(lam)
        z1 = np.zeros(n, dtype=complex)
        z2 = np.zeros(n, dtype=complex)
        z1[2 * k], z1[2 * k + 1] = 1.0, r
        z2[2 * k], z2[2 * k + 1] = 1j, -1j * r
        cols.extend([z1, z2])
    Z = np.column_stack(cols)

    U = _random_unitary(rng, n)
    A = np.eye(n) + 0.3 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(n)
    Ar = realify(A)
    Ar_inv = la.inv(Ar)
    g = Ar_inv.T @ Ar_inv
    g = 0.5 * (g + g.T)
    ambient = ComplexHilbertSpaceReal(g, realify(1j * np.eye(n)))
    R = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    basis = Ar @ to_real(U @ Z) @ R
    return StandardSubspace(ambient, basis), lams_arr
