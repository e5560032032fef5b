"""Tests for engine.py -- facade wiring and shortcuts."""

import math

import pytest

from petzrenyi import PetzRenyiEngine
from petzrenyi.config import RunConfig
from petzrenyi.subspace import canonical_factorial_subspace


@pytest.fixture(scope="module")
def engine():
    return PetzRenyiEngine(tol=1e-8)


class TestEngine:
    def test_layers_share_quadrature(self, engine):
        assert engine.chiral._quad is engine.quad
        assert engine.wedge._quad is engine.quad

    def test_from_config(self):
        engine = PetzRenyiEngine.from_config(RunConfig(tol=1e-7, epsilons=(1e-2, 1e-3)))
        assert engine.quad.tol == 1e-7
        assert engine.chiral.epsilons == (1e-2, 1e-3)

    def test_chiral_shortcuts(self, engine, bump):
        s = engine.chiral_entropy(bump, 1.0, 0.5)
        assert 0 < s.value < engine.chiral_relative_entropy(bump, 1.0).value

    def test_wedge_shortcuts(self, engine, gauss_data):
        s = engine.wedge_entropy(gauss_data, 0.5)
        assert 0 < s.value < engine.wedge_relative_entropy(gauss_data).value

    def test_subspace_shortcuts(self, engine):
        L = canonical_factorial_subspace(2.0)
        f = L.basis[:, 0] / math.sqrt(6.0)
        exact = engine.subspace_entropy(L, f, 0.5)
        assert engine.fock_entropy(L, f, 0.5, cutoff=30) == pytest.approx(exact, abs=1e-6)
