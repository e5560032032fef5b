"""Shared fixtures -- a seeded generator, a shared Quadrature and the
built-in test functions, Cauchy data and subspaces, so tests run against
the same inputs the command-line front end uses."""

from __future__ import annotations

import numpy as np
import pytest

from petzrenyi.chiral import ChiralCurrent, HalfLineTestFunction
from petzrenyi.quadrature import Quadrature
from petzrenyi.subspace import StandardSubspace, canonical_factorial_subspace
from petzrenyi.sweep import Sweep
from petzrenyi.wedge import WedgeCauchyData, WedgeScalar


@pytest.fixture
def rng() -> np.random.Generator:
    """Fresh generator with a fixed seed for each test."""
    return np.random.default_rng(20240607)


@pytest.fixture
def quad() -> Quadrature:
    return Quadrature(tol=1e-10)


@pytest.fixture
def field_quad() -> Quadrature:
    """Looser engine for the two-dimensional field-model integrals."""
    return Quadrature(tol=1e-8)


@pytest.fixture
def chiral(field_quad: Quadrature) -> ChiralCurrent:
    return ChiralCurrent(field_quad)


@pytest.fixture
def wedge(field_quad: Quadrature) -> WedgeScalar:
    return WedgeScalar(field_quad)


@pytest.fixture
def sweep(field_quad: Quadrature, chiral: ChiralCurrent, wedge: WedgeScalar) -> Sweep:
    return Sweep(field_quad, chiral, wedge)


@pytest.fixture
def bump() -> HalfLineTestFunction:
    """The standard chiral test function, supported on (0.5, 1.5)."""
    return HalfLineTestFunction.bump(0.5, 1.5)


@pytest.fixture
def gauss_data() -> WedgeCauchyData:
    """Built-in ``gauss-bump 2 1`` data with unit mass."""
    return WedgeCauchyData.gauss_bump(2.0, 1.0)


@pytest.fixture
def canonical() -> StandardSubspace:
    """One ``(2, 1/2)`` mode pair in ``C^2``."""
    return canonical_factorial_subspace(2.0)
