"""Exception hierarchy shared by every layer.

Each exception carries the process exit code the command-line front end
reports for it.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .quadrature import QuadratureResult


class PetzRenyiError(Exception):
    """Root of all errors raised by ``petzrenyi``."""

    exit_code: int = 1


class DomainError(PetzRenyiError, ValueError):
    """Argument outside the domain of the requested operation."""

    exit_code = 2


class NormalizationError(DomainError):
    """State measure whose total mass is not 1."""

    def __init__(self, total_mass: float, tol: float) -> None:
        super().__init__(
            f"state measure has total mass {total_mass!r}, "
            f"expected 1 within {tol:g}"
        )
        self.total_mass = total_mass


class StandardnessError(DomainError):
    """Real subspace failing one of the standardness rank tests."""

    def __init__(self, condition: str, detail: str = "") -> None:
        msg = f"subspace is not standard: {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.condition = condition


class UsageError(PetzRenyiError):
    """Invalid run configuration; names the offending key."""

    exit_code = 2

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


class ConvergenceError(PetzRenyiError):
    """Numerical procedure that could not honour its tolerance."""

    exit_code = 3

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result: QuadratureResult | Any = result


class TruncationError(ConvergenceError):
    """Fock-space cutoff too small for the requested accuracy."""

    def __init__(self, message: str, suggested_cutoff: int) -> None:
        super().__init__(f"{message}; try cutoff >= {suggested_cutoff}")
        self.suggested_cutoff = suggested_cutoff


class FactorialityError(PetzRenyiError):
    """Modular operator with eigenvalue 1 (subspace not factorial)."""

    exit_code = 4

    def __init__(self, eigenvalue: float) -> None:
        super().__init__(
            f"modular operator has eigenvalue {eigenvalue!r} within "
            "tolerance of 1; subspace is not factorial"
        )
        self.eigenvalue = eigenvalue
